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

#ifndef VITALINK_U256_HPP
#define VITALINK_U256_HPP

// Fixed-width 256-bit unsigned integers and Montgomery arithmetic modulo an
// odd modulus below 2^256. Enough for prime-field and scalar arithmetic on
// both curve suites. Not constant time.

#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string_view>

#include "vitalink/bytes.hpp"

namespace vitalink {

struct U256 {
  // Little-endian 64-bit limbs.
  std::array<std::uint64_t, 4> limb{};

  constexpr U256() = default;
  constexpr explicit U256(std::uint64_t v) : limb{v, 0, 0, 0} {}

  static U256 from_hex(std::string_view hex) {
    U256 r;
    int bit = 0;
    for (auto it = hex.rbegin(); it != hex.rend(); ++it) {
      char c = *it;
      if (c == ' ' || c == '_') continue;
      std::uint64_t d;
      if (c >= '0' && c <= '9') d = c - '0';
      else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
      else throw std::invalid_argument("bad hex digit");
      if (bit >= 256) {
        if (d) throw std::out_of_range("hex exceeds 256 bits");
        continue;
      }
      r.limb[bit / 64] |= d << (bit % 64);
      bit += 4;
    }
    return r;
  }

  // Big-endian bytes, at most 32 of them.
  static U256 from_be(ByteView b) {
    if (b.size() > 32) throw std::out_of_range("more than 32 bytes");
    U256 r;
    for (std::size_t i = 0; i < b.size(); ++i) {
      std::size_t shift = (b.size() - 1 - i) * 8;
      r.limb[shift / 64] |= std::uint64_t{b[i]} << (shift % 64);
    }
    return r;
  }

  // Big-endian encoding into exactly len bytes; throws if the value does not fit.
  Bytes to_be(std::size_t len) const {
    if (bits() > len * 8) throw std::out_of_range("value wider than encoding");
    Bytes out(len);
    for (std::size_t i = 0; i < len; ++i) {
      std::size_t shift = (len - 1 - i) * 8;
      out[i] = shift < 256 ? static_cast<std::uint8_t>(limb[shift / 64] >> (shift % 64)) : 0;
    }
    return out;
  }

  bool is_zero() const { return (limb[0] | limb[1] | limb[2] | limb[3]) == 0; }
  bool bit(std::size_t i) const { return (limb[i / 64] >> (i % 64)) & 1; }

  std::size_t bits() const {
    for (int i = 3; i >= 0; --i)
      if (limb[i]) return 64 * static_cast<std::size_t>(i) + 64 - static_cast<std::size_t>(__builtin_clzll(limb[i]));
    return 0;
  }

  friend bool operator==(const U256&, const U256&) = default;
  friend std::strong_ordering operator<=>(const U256& a, const U256& b) {
    for (int i = 3; i >= 0; --i)
      if (a.limb[i] != b.limb[i]) return a.limb[i] <=> b.limb[i];
    return std::strong_ordering::equal;
  }
};

// r = a + b, returns carry out.
inline std::uint64_t add_to(U256& r, const U256& a, const U256& b) {
  unsigned __int128 carry = 0;
  for (int i = 0; i < 4; ++i) {
    carry += static_cast<unsigned __int128>(a.limb[i]) + b.limb[i];
    r.limb[i] = static_cast<std::uint64_t>(carry);
    carry >>= 64;
  }
  return static_cast<std::uint64_t>(carry);
}

// r = a - b, returns borrow out.
inline std::uint64_t sub_to(U256& r, const U256& a, const U256& b) {
  std::uint64_t borrow = 0;
  for (int i = 0; i < 4; ++i) {
    unsigned __int128 d = static_cast<unsigned __int128>(a.limb[i]) - b.limb[i] - borrow;
    r.limb[i] = static_cast<std::uint64_t>(d);
    borrow = static_cast<std::uint64_t>(d >> 64) & 1;
  }
  return borrow;
}

// x mod m for any nonzero m, by shift-and-subtract.
inline U256 reduce(const U256& x, const U256& m) {
  if (m.is_zero()) throw std::domain_error("zero modulus");
  U256 r;
  for (int i = 255; i >= 0; --i) {
    std::uint64_t top = r.limb[3] >> 63;
    for (int j = 3; j > 0; --j) r.limb[j] = (r.limb[j] << 1) | (r.limb[j - 1] >> 63);
    r.limb[0] = (r.limb[0] << 1) | (x.bit(static_cast<std::size_t>(i)) ? 1 : 0);
    if (top || r >= m) sub_to(r, r, m);
  }
  return r;
}

// Arithmetic modulo an odd m < 2^256. Elements passed to mul/add/sub must be
// reduced (< m); mul operates on Montgomery representatives.
class MontgomeryField {
 public:
  explicit MontgomeryField(const U256& modulus) : m_(modulus) {
    if (!(m_.limb[0] & 1)) throw std::invalid_argument("modulus must be odd");
    // -m^{-1} mod 2^64 by Newton iteration.
    std::uint64_t inv = 1;
    for (int i = 0; i < 7; ++i) inv *= 2 - m_.limb[0] * inv;
    m_inv_neg_ = ~inv + 1;
    // R mod m and R^2 mod m, R = 2^256.
    r_ = reduce_pow2(256);
    U256 r2 = r_;
    for (int i = 0; i < 256; ++i) r2 = add(r2, r2);
    r2_ = r2;
  }

  const U256& modulus() const { return m_; }

  U256 add(const U256& a, const U256& b) const {
    U256 r;
    std::uint64_t carry = add_to(r, a, b);
    if (carry || r >= m_) sub_to(r, r, m_);
    return r;
  }

  U256 sub(const U256& a, const U256& b) const {
    U256 r;
    if (sub_to(r, a, b)) add_to(r, r, m_);
    return r;
  }

  U256 neg(const U256& a) const { return a.is_zero() ? a : sub(m_, a); }

  // Montgomery product a*b*R^{-1} mod m (CIOS).
  U256 mul(const U256& a, const U256& b) const {
    std::uint64_t t[6] = {0, 0, 0, 0, 0, 0};
    for (int i = 0; i < 4; ++i) {
      unsigned __int128 c = 0;
      for (int j = 0; j < 4; ++j) {
        c += static_cast<unsigned __int128>(a.limb[j]) * b.limb[i] + t[j];
        t[j] = static_cast<std::uint64_t>(c);
        c >>= 64;
      }
      c += t[4];
      t[4] = static_cast<std::uint64_t>(c);
      t[5] = static_cast<std::uint64_t>(c >> 64);

      std::uint64_t u = t[0] * m_inv_neg_;
      c = static_cast<unsigned __int128>(u) * m_.limb[0] + t[0];
      c >>= 64;
      for (int j = 1; j < 4; ++j) {
        c += static_cast<unsigned __int128>(u) * m_.limb[j] + t[j];
        t[j - 1] = static_cast<std::uint64_t>(c);
        c >>= 64;
      }
      c += t[4];
      t[3] = static_cast<std::uint64_t>(c);
      t[4] = t[5] + static_cast<std::uint64_t>(c >> 64);
    }
    U256 r;
    for (int i = 0; i < 4; ++i) r.limb[i] = t[i];
    if (t[4] || r >= m_) sub_to(r, r, m_);
    return r;
  }

  U256 sqr(const U256& a) const { return mul(a, a); }

  U256 to_mont(const U256& a) const { return mul(a, r2_); }
  U256 from_mont(const U256& a) const { return mul(a, U256(1)); }
  const U256& one() const { return r_; }

  // a^e in Montgomery form (a in Montgomery form, e plain).
  U256 pow(const U256& a, const U256& e) const {
    U256 r = r_;
    for (int i = static_cast<int>(e.bits()) - 1; i >= 0; --i) {
      r = sqr(r);
      if (e.bit(static_cast<std::size_t>(i))) r = mul(r, a);
    }
    return r;
  }

  // Inverse by Fermat; requires prime modulus and a != 0.
  U256 inv(const U256& a) const {
    U256 e;
    sub_to(e, m_, U256(2));
    return pow(a, e);
  }

  // Plain-domain convenience helpers.
  U256 mul_plain(const U256& a, const U256& b) const {
    return from_mont(mul(to_mont(a), to_mont(b)));
  }
  U256 inv_plain(const U256& a) const { return from_mont(inv(to_mont(a))); }

 private:
  U256 reduce_pow2(int k) const {
    // 2^k mod m via doubling from 1 (k <= 256).
    U256 r(1);
    r = reduce(r, m_);
    for (int i = 0; i < k; ++i) r = add(r, r);
    return r;
  }

  U256 m_;
  U256 r_;
  U256 r2_;
  std::uint64_t m_inv_neg_ = 0;
};

}  // namespace vitalink

#endif  // VITALINK_U256_HPP
