// Copyright 2026 The VitaLink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
////////////////////////////////////////////////////////////////////////////////

#ifndef VITALINK_AEAD_HPP
#define VITALINK_AEAD_HPP

// AES-128-GCM. Counter-mode encryption plus a GHASH tag over AAD and
// ciphertext. open() decrypts, recomputes the tag and compares it in constant
// time; on mismatch the decrypted buffer is wiped and AuthFailure is thrown.
//
// GHASH bit order: a block is read as a polynomial whose x^0 coefficient is
// the most significant bit of byte 0. So the multiplicative identity is
// 80 00 .. 00, the element "x" is 40 00 .. 00, and the reduction constant
// x^128 = x^7 + x^2 + x + 1 appears as E1 00 .. 00 when V is shifted right.
// Worked example: gf128_mul(40 00..00, 40 00..00) = 20 00..00 (x * x = x^2),
// and gf128_mul(00..00 01, 40 00..00) = E1 00..00 (x^127 * x reduces).

#include <array>
#include <cstdint>
#include <cstring>

#include "vitalink/bytes.hpp"
#include "vitalink/error.hpp"

namespace vitalink::aead {

inline constexpr std::size_t kKeySize = 16;
inline constexpr std::size_t kBlockSize = 16;
inline constexpr std::size_t kNonceSize = 12;
inline constexpr std::size_t kTagSize = 16;
inline constexpr std::size_t kMaxPlaintext = 64 * 1024;

using Block = std::array<std::uint8_t, kBlockSize>;
using Nonce = std::array<std::uint8_t, kNonceSize>;
using Tag = std::array<std::uint8_t, kTagSize>;

class AeadKey {
 public:
  AeadKey() = default;
  explicit AeadKey(const std::array<std::uint8_t, kKeySize>& k) : bytes_(k) {}

  static AeadKey from(ByteView b) {
    if (b.size() != kKeySize) throw Error(Errc::InvalidLength, "AES-128 key must be 16 bytes");
    AeadKey k;
    std::memcpy(k.bytes_.data(), b.data(), kKeySize);
    return k;
  }

  AeadKey(const AeadKey&) = default;
  AeadKey& operator=(const AeadKey&) = default;
  ~AeadKey() { wipe(); }

  const std::array<std::uint8_t, kKeySize>& bytes() const { return bytes_; }
  void wipe() { secure_zero(bytes_); }

  friend bool operator==(const AeadKey& a, const AeadKey& b) { return ct_equal(a.bytes_, b.bytes_); }

 private:
  std::array<std::uint8_t, kKeySize> bytes_{};
};

struct SealedRecord {
  Bytes ciphertext;
  Tag tag{};

  // ciphertext || tag
  Bytes wire() const {
    Bytes out = ciphertext;
    append(out, tag);
    return out;
  }

  static SealedRecord from_wire(ByteView body) {
    if (body.size() < kTagSize) throw Error(Errc::AuthFailure);
    SealedRecord r;
    r.ciphertext.assign(body.begin(), body.end() - kTagSize);
    std::memcpy(r.tag.data(), body.data() + body.size() - kTagSize, kTagSize);
    return r;
  }
};

namespace detail {

inline constexpr std::uint8_t kSbox[256] = {
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16};

constexpr std::array<std::uint8_t, 256> make_inv_sbox() {
  std::array<std::uint8_t, 256> inv{};
  for (int i = 0; i < 256; ++i) inv[kSbox[i]] = static_cast<std::uint8_t>(i);
  return inv;
}
inline constexpr auto kInvSbox = make_inv_sbox();

constexpr std::uint8_t xtime(std::uint8_t x) {
  return static_cast<std::uint8_t>((x << 1) ^ ((x & 0x80) ? 0x1b : 0));
}

constexpr std::uint8_t gmul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t r = 0;
  while (b) {
    if (b & 1) r ^= a;
    a = xtime(a);
    b >>= 1;
  }
  return r;
}

}  // namespace detail

// AES-128 with an expanded key schedule.
class Aes128 {
 public:
  explicit Aes128(const AeadKey& key) {
    const auto& k = key.bytes();
    std::memcpy(rk_.data(), k.data(), kKeySize);
    std::uint8_t rcon = 1;
    for (std::size_t i = 16; i < rk_.size(); i += 4) {
      std::uint8_t t[4] = {rk_[i - 4], rk_[i - 3], rk_[i - 2], rk_[i - 1]};
      if (i % 16 == 0) {
        std::uint8_t first = t[0];
        t[0] = detail::kSbox[t[1]] ^ rcon;
        t[1] = detail::kSbox[t[2]];
        t[2] = detail::kSbox[t[3]];
        t[3] = detail::kSbox[first];
        rcon = detail::xtime(rcon);
      }
      for (int j = 0; j < 4; ++j) rk_[i + j] = rk_[i - 16 + j] ^ t[j];
    }
  }
  ~Aes128() { secure_zero(rk_); }
  Aes128(const Aes128&) = delete;
  Aes128& operator=(const Aes128&) = delete;

  Block encrypt(const Block& in) const {
    Block s = in;
    add_round_key(s, 0);
    for (int round = 1; round < 10; ++round) {
      for (auto& b : s) b = detail::kSbox[b];
      shift_rows(s);
      mix_columns(s);
      add_round_key(s, round);
    }
    for (auto& b : s) b = detail::kSbox[b];
    shift_rows(s);
    add_round_key(s, 10);
    return s;
  }

  Block decrypt(const Block& in) const {
    Block s = in;
    add_round_key(s, 10);
    for (int round = 9; round >= 1; --round) {
      inv_shift_rows(s);
      for (auto& b : s) b = detail::kInvSbox[b];
      add_round_key(s, round);
      inv_mix_columns(s);
    }
    inv_shift_rows(s);
    for (auto& b : s) b = detail::kInvSbox[b];
    add_round_key(s, 0);
    return s;
  }

 private:
  void add_round_key(Block& s, int round) const {
    for (std::size_t i = 0; i < 16; ++i) s[i] ^= rk_[16 * static_cast<std::size_t>(round) + i];
  }

  // State is column-major: byte index = 4*col + row.
  static void shift_rows(Block& s) {
    Block t = s;
    for (int c = 0; c < 4; ++c)
      for (int r = 1; r < 4; ++r) s[4 * c + r] = t[4 * ((c + r) % 4) + r];
  }
  static void inv_shift_rows(Block& s) {
    Block t = s;
    for (int c = 0; c < 4; ++c)
      for (int r = 1; r < 4; ++r) s[4 * ((c + r) % 4) + r] = t[4 * c + r];
  }
  static void mix_columns(Block& s) {
    using detail::xtime;
    for (int c = 0; c < 4; ++c) {
      std::uint8_t* col = &s[4 * static_cast<std::size_t>(c)];
      std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
      std::uint8_t all = a0 ^ a1 ^ a2 ^ a3;
      col[0] ^= all ^ xtime(a0 ^ a1);
      col[1] ^= all ^ xtime(a1 ^ a2);
      col[2] ^= all ^ xtime(a2 ^ a3);
      col[3] ^= all ^ xtime(a3 ^ a0);
    }
  }
  static void inv_mix_columns(Block& s) {
    using detail::gmul;
    for (int c = 0; c < 4; ++c) {
      std::uint8_t* col = &s[4 * static_cast<std::size_t>(c)];
      std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
      col[0] = gmul(a0, 14) ^ gmul(a1, 11) ^ gmul(a2, 13) ^ gmul(a3, 9);
      col[1] = gmul(a0, 9) ^ gmul(a1, 14) ^ gmul(a2, 11) ^ gmul(a3, 13);
      col[2] = gmul(a0, 13) ^ gmul(a1, 9) ^ gmul(a2, 14) ^ gmul(a3, 11);
      col[3] = gmul(a0, 11) ^ gmul(a1, 13) ^ gmul(a2, 9) ^ gmul(a3, 14);
    }
  }

  std::array<std::uint8_t, 176> rk_{};
};

inline Block block_encrypt(const AeadKey& key, const Block& block) {
  return Aes128(key).encrypt(block);
}

inline Block block_decrypt(const AeadKey& key, const Block& block) {
  return Aes128(key).decrypt(block);
}

// Product in GF(2^128) with the GCM polynomial and bit order.
inline Block gf128_mul(const Block& x, const Block& y) {
  std::uint64_t vh = get_be64(y.data()), vl = get_be64(y.data() + 8);
  std::uint64_t zh = 0, zl = 0;
  for (int i = 0; i < 128; ++i) {
    if ((x[static_cast<std::size_t>(i / 8)] >> (7 - i % 8)) & 1) {
      zh ^= vh;
      zl ^= vl;
    }
    bool lsb = vl & 1;
    vl = (vl >> 1) | (vh << 63);
    vh >>= 1;
    if (lsb) vh ^= 0xE100000000000000ULL;
  }
  Block out{};
  for (int i = 0; i < 8; ++i) {
    out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(zh >> (56 - 8 * i));
    out[static_cast<std::size_t>(8 + i)] = static_cast<std::uint8_t>(zl >> (56 - 8 * i));
  }
  return out;
}

namespace detail {

inline void ghash_update(Block& acc, const Block& h, ByteView data) {
  for (std::size_t off = 0; off < data.size(); off += kBlockSize) {
    std::size_t n = std::min(kBlockSize, data.size() - off);
    for (std::size_t i = 0; i < n; ++i) acc[i] ^= data[off + i];
    acc = gf128_mul(acc, h);
  }
}

inline Block ghash(const Block& h, ByteView aad, ByteView ct) {
  Block acc{};
  ghash_update(acc, h, aad);
  ghash_update(acc, h, ct);
  Bytes lens;
  put_be64(lens, static_cast<std::uint64_t>(aad.size()) * 8);
  put_be64(lens, static_cast<std::uint64_t>(ct.size()) * 8);
  ghash_update(acc, h, lens);
  return acc;
}

inline void inc32(Block& ctr) {
  for (int i = 15; i >= 12; --i)
    if (++ctr[static_cast<std::size_t>(i)]) break;
}

inline void ctr_xor(const Aes128& aes, Block ctr, ByteView in, std::uint8_t* out) {
  for (std::size_t off = 0; off < in.size(); off += kBlockSize) {
    inc32(ctr);
    Block ks = aes.encrypt(ctr);
    std::size_t n = std::min(kBlockSize, in.size() - off);
    for (std::size_t i = 0; i < n; ++i) out[off + i] = in[off + i] ^ ks[i];
    secure_zero(ks);
  }
}

inline Tag compute_tag(const Aes128& aes, const Block& j0, ByteView aad, ByteView ct) {
  Block h = aes.encrypt(Block{});
  Block s = ghash(h, aad, ct);
  Block ek = aes.encrypt(j0);
  Tag t{};
  for (std::size_t i = 0; i < kTagSize; ++i) t[i] = s[i] ^ ek[i];
  return t;
}

inline Block initial_counter(ByteView nonce) {
  if (nonce.size() != kNonceSize) throw Error(Errc::InvalidLength, "GCM nonce must be 12 bytes");
  Block j0{};
  std::memcpy(j0.data(), nonce.data(), kNonceSize);
  j0[15] = 1;
  return j0;
}

}  // namespace detail

inline SealedRecord seal(const AeadKey& key, ByteView nonce, ByteView aad, ByteView plaintext) {
  if (plaintext.size() > kMaxPlaintext) throw Error(Errc::PayloadTooLarge);
  Block j0 = detail::initial_counter(nonce);
  Aes128 aes(key);
  SealedRecord rec;
  rec.ciphertext.resize(plaintext.size());
  detail::ctr_xor(aes, j0, plaintext, rec.ciphertext.data());
  rec.tag = detail::compute_tag(aes, j0, aad, rec.ciphertext);
  return rec;
}

inline Bytes open(const AeadKey& key, ByteView nonce, ByteView aad, const SealedRecord& rec) {
  if (rec.ciphertext.size() > kMaxPlaintext) throw Error(Errc::PayloadTooLarge);
  Block j0 = detail::initial_counter(nonce);
  Aes128 aes(key);
  Bytes plaintext(rec.ciphertext.size());
  detail::ctr_xor(aes, j0, rec.ciphertext, plaintext.data());
  Tag expected = detail::compute_tag(aes, j0, aad, rec.ciphertext);
  if (!ct_equal(expected, rec.tag)) {
    secure_zero(plaintext);
    throw Error(Errc::AuthFailure);
  }
  return plaintext;
}

}  // namespace vitalink::aead

#endif  // VITALINK_AEAD_HPP
