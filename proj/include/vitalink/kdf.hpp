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

#ifndef VITALINK_KDF_HPP
#define VITALINK_KDF_HPP

// SHA-256, HMAC-SHA-256 and HKDF (extract/expand). These turn the ECDH shared
// secret and the handshake transcript into the session key schedule.

#include <array>
#include <cstdint>
#include <cstring>
#include <string_view>

#include "vitalink/bytes.hpp"
#include "vitalink/error.hpp"

namespace vitalink::kdf {

inline constexpr std::size_t kDigestSize = 32;
inline constexpr std::size_t kBlockSize = 64;

using Digest = std::array<std::uint8_t, kDigestSize>;

// Key-schedule labels, frozen for interop.
inline constexpr std::string_view kLabelC2sKey = "vl c2s key";
inline constexpr std::string_view kLabelS2cKey = "vl s2c key";
inline constexpr std::string_view kLabelC2sSalt = "vl c2s salt";
inline constexpr std::string_view kLabelS2cSalt = "vl s2c salt";
inline constexpr std::string_view kLabelClientFin = "vl c fin";
inline constexpr std::string_view kLabelServerFin = "vl s fin";

class Sha256 {
 public:
  Sha256() { reset(); }

  void reset() {
    state_ = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
              0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    buffered_ = 0;
    total_bits_ = 0;
  }

  Sha256& update(ByteView data) {
    total_bits_ += static_cast<std::uint64_t>(data.size()) * 8;
    const std::uint8_t* p = data.data();
    std::size_t n = data.size();
    if (buffered_) {
      std::size_t take = std::min(n, kBlockSize - buffered_);
      std::memcpy(buffer_.data() + buffered_, p, take);
      buffered_ += take;
      p += take;
      n -= take;
      if (buffered_ == kBlockSize) {
        compress(buffer_.data());
        buffered_ = 0;
      }
    }
    for (; n >= kBlockSize; n -= kBlockSize, p += kBlockSize) compress(p);
    if (n) {
      std::memcpy(buffer_.data(), p, n);
      buffered_ = n;
    }
    return *this;
  }

  Sha256& update(std::string_view s) {
    return update(ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  }

  Digest finish() {
    const std::uint64_t bits = total_bits_;
    std::array<std::uint8_t, kBlockSize> pad{};
    pad[0] = 0x80;
    std::size_t pad_len = (buffered_ < 56) ? 56 - buffered_ : 120 - buffered_;
    update(ByteView(pad.data(), pad_len));
    std::array<std::uint8_t, 8> len{};
    for (int i = 0; i < 8; ++i) len[i] = static_cast<std::uint8_t>(bits >> (56 - 8 * i));
    update(ByteView(len.data(), len.size()));
    Digest out{};
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 4; ++j)
        out[4 * i + j] = static_cast<std::uint8_t>(state_[i] >> (24 - 8 * j));
    reset();
    return out;
  }

 private:
  static constexpr std::uint32_t rotr(std::uint32_t x, int n) {
    return (x >> n) | (x << (32 - n));
  }

  void compress(const std::uint8_t* block) {
    static constexpr std::uint32_t k[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
        0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
        0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
        0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
        0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
        0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
        0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
        0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
        0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
        0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i) w[i] = get_be32(block + 4 * i);
    for (int i = 16; i < 64; ++i) {
      std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    auto [a, b, c, d, e, f, g, h] = state_;
    for (int i = 0; i < 64; ++i) {
      std::uint32_t t1 = h + (rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25)) +
                         ((e & f) ^ (~e & g)) + k[i] + w[i];
      std::uint32_t t2 = (rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22)) +
                         ((a & b) ^ (a & c) ^ (b & c));
      h = g;
      g = f;
      f = e;
      e = d + t1;
      d = c;
      c = b;
      b = a;
      a = t1 + t2;
    }
    state_[0] += a; state_[1] += b; state_[2] += c; state_[3] += d;
    state_[4] += e; state_[5] += f; state_[6] += g; state_[7] += h;
  }

  std::array<std::uint32_t, 8> state_{};
  std::array<std::uint8_t, kBlockSize> buffer_{};
  std::size_t buffered_ = 0;
  std::uint64_t total_bits_ = 0;
};

inline Digest hash(ByteView msg) { return Sha256().update(msg).finish(); }

inline Digest hmac(ByteView key, ByteView msg) {
  std::array<std::uint8_t, kBlockSize> k{};
  if (key.size() > kBlockSize) {
    Digest kh = hash(key);
    std::memcpy(k.data(), kh.data(), kh.size());
  } else if (!key.empty()) {
    std::memcpy(k.data(), key.data(), key.size());
  }
  std::array<std::uint8_t, kBlockSize> ipad{}, opad{};
  for (std::size_t i = 0; i < kBlockSize; ++i) {
    ipad[i] = k[i] ^ 0x36;
    opad[i] = k[i] ^ 0x5c;
  }
  Digest inner = Sha256().update(ipad).update(msg).finish();
  Digest out = Sha256().update(opad).update(inner).finish();
  secure_zero(k);
  secure_zero(ipad);
  secure_zero(opad);
  return out;
}

// An empty salt is treated as kDigestSize zero bytes; HMAC zero-pads short
// keys, so the two are the same key.
inline Digest hkdf_extract(ByteView salt, ByteView ikm) {
  if (salt.empty()) {
    std::array<std::uint8_t, kDigestSize> zeros{};
    return hmac(zeros, ikm);
  }
  return hmac(salt, ikm);
}

inline Bytes hkdf_expand(const Digest& prk, ByteView info, std::size_t out_len) {
  if (out_len < 1 || out_len > 255 * kDigestSize)
    throw Error(Errc::InvalidLength, "hkdf_expand out_len " + std::to_string(out_len));
  Bytes out;
  out.reserve(out_len);
  Bytes block;
  for (std::uint8_t counter = 1; out.size() < out_len; ++counter) {
    Bytes input = block;
    append(input, info);
    input.push_back(counter);
    Digest t = hmac(prk, input);
    block.assign(t.begin(), t.end());
    std::size_t take = std::min(kDigestSize, out_len - out.size());
    out.insert(out.end(), t.begin(), t.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return out;
}

}  // namespace vitalink::kdf

#endif  // VITALINK_KDF_HPP
