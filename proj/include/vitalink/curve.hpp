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

#ifndef VITALINK_CURVE_HPP
#define VITALINK_CURVE_HPP

// Short-Weierstrass elliptic-curve group arithmetic and ECDH.
//
// Two suites are provided: NIST P-256 for real sessions, and a toy curve
// y^2 = x^3 + 2x + 2 over F_17 whose group is small enough to enumerate.
// Peer points are always validated on-curve before use. Nothing here is
// constant time.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "vitalink/bytes.hpp"
#include "vitalink/error.hpp"
#include "vitalink/random.hpp"
#include "vitalink/u256.hpp"

namespace vitalink::curve {

class CurvePoint {
 public:
  CurvePoint() = default;  // identity
  CurvePoint(const U256& x, const U256& y) : x_(x), y_(y), identity_(false) {}

  static CurvePoint identity() { return CurvePoint(); }

  bool is_identity() const { return identity_; }
  const U256& x() const { return x_; }
  const U256& y() const { return y_; }

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;

 private:
  U256 x_;
  U256 y_;
  bool identity_ = true;
};

struct CurveSuite {
  std::uint16_t id;
  std::string name;
  U256 p;
  U256 a;
  U256 b;
  CurvePoint g;
  U256 n;
  std::size_t field_len;   // bytes per field element
  std::size_t scalar_len;  // bytes per scalar mod n
  MontgomeryField fp;
  MontgomeryField fn;

  std::size_t point_len() const { return 1 + 2 * field_len; }

  bool on_curve(const CurvePoint& pt) const {
    if (pt.is_identity()) return false;
    if (pt.x() >= p || pt.y() >= p) return false;
    U256 x = fp.to_mont(pt.x());
    U256 y = fp.to_mont(pt.y());
    U256 lhs = fp.sqr(y);
    U256 rhs = fp.add(fp.add(fp.mul(fp.sqr(x), x), fp.mul(fp.to_mont(a), x)),
                      fp.to_mont(b));
    return lhs == rhs;
  }
};

inline constexpr std::uint16_t kSuiteP256 = 0x0017;
inline constexpr std::uint16_t kSuiteToy = 0x7E57;

namespace detail {

inline std::size_t byte_len(const U256& v) { return (v.bits() + 7) / 8; }

inline CurvePoint affine_add(const CurvePoint& P, const CurvePoint& Q, const U256& a,
                             const MontgomeryField& f) {
  if (P.is_identity()) return Q;
  if (Q.is_identity()) return P;
  U256 x1 = f.to_mont(P.x()), y1 = f.to_mont(P.y());
  U256 x2 = f.to_mont(Q.x()), y2 = f.to_mont(Q.y());
  U256 lambda;
  if (x1 == x2) {
    if (y1 != y2 || y1.is_zero()) return CurvePoint::identity();
    // (3x^2 + a) / 2y
    U256 x_sq = f.sqr(x1);
    U256 num = f.add(f.add(f.add(x_sq, x_sq), x_sq), f.to_mont(a));
    lambda = f.mul(num, f.inv(f.add(y1, y1)));
  } else {
    lambda = f.mul(f.sub(y2, y1), f.inv(f.sub(x2, x1)));
  }
  U256 x3 = f.sub(f.sub(f.sqr(lambda), x1), x2);
  U256 y3 = f.sub(f.mul(lambda, f.sub(x1, x3)), y1);
  return CurvePoint(f.from_mont(x3), f.from_mont(y3));
}

inline CurveSuite make_suite(std::uint16_t id, std::string name, const U256& p,
                             const U256& a, const U256& b, const CurvePoint& g,
                             const U256& n) {
  return CurveSuite{id, std::move(name), p, a, b, g, n,
                    byte_len(p), byte_len(n), MontgomeryField(p), MontgomeryField(n)};
}

// Order of g found by walking the cyclic subgroup.
inline U256 enumerate_order(const CurvePoint& g, const U256& p, const U256& a) {
  MontgomeryField f(p);
  CurvePoint acc = g;
  std::uint64_t k = 1;
  while (!acc.is_identity()) {
    acc = affine_add(acc, g, a, f);
    ++k;
    if (k > (std::uint64_t{1} << 20)) throw std::logic_error("toy order walk did not terminate");
  }
  return U256(k);
}

// Jacobian coordinates in Montgomery form; Z == 0 is the identity.
struct Jacobian {
  U256 X, Y, Z;
};

inline Jacobian to_jacobian(const CurveSuite& s, const CurvePoint& P) {
  if (P.is_identity()) return {s.fp.one(), s.fp.one(), U256()};
  return {s.fp.to_mont(P.x()), s.fp.to_mont(P.y()), s.fp.one()};
}

inline CurvePoint to_affine(const CurveSuite& s, const Jacobian& J) {
  const auto& f = s.fp;
  if (J.Z.is_zero()) return CurvePoint::identity();
  U256 zi = f.inv(J.Z);
  U256 zi2 = f.sqr(zi);
  U256 zi3 = f.mul(zi2, zi);
  return CurvePoint(f.from_mont(f.mul(J.X, zi2)), f.from_mont(f.mul(J.Y, zi3)));
}

inline Jacobian jac_double(const CurveSuite& s, const Jacobian& P, const U256& a_mont) {
  const auto& f = s.fp;
  if (P.Z.is_zero() || P.Y.is_zero()) return {f.one(), f.one(), U256()};
  U256 xx = f.sqr(P.X);
  U256 yy = f.sqr(P.Y);
  U256 yyyy = f.sqr(yy);
  U256 zz = f.sqr(P.Z);
  U256 t = f.add(P.X, yy);
  U256 s4 = f.sub(f.sub(f.sqr(t), xx), yyyy);
  s4 = f.add(s4, s4);
  U256 m = f.add(f.add(f.add(xx, xx), xx), f.mul(a_mont, f.sqr(zz)));
  U256 x3 = f.sub(f.sqr(m), f.add(s4, s4));
  U256 y8 = f.add(yyyy, yyyy);
  y8 = f.add(y8, y8);
  y8 = f.add(y8, y8);
  U256 y3 = f.sub(f.mul(m, f.sub(s4, x3)), y8);
  U256 z3 = f.sub(f.sub(f.sqr(f.add(P.Y, P.Z)), yy), zz);
  return {x3, y3, z3};
}

inline Jacobian jac_add(const CurveSuite& s, const Jacobian& P, const Jacobian& Q,
                        const U256& a_mont) {
  const auto& f = s.fp;
  if (P.Z.is_zero()) return Q;
  if (Q.Z.is_zero()) return P;
  U256 z1z1 = f.sqr(P.Z);
  U256 z2z2 = f.sqr(Q.Z);
  U256 u1 = f.mul(P.X, z2z2);
  U256 u2 = f.mul(Q.X, z1z1);
  U256 s1 = f.mul(f.mul(P.Y, Q.Z), z2z2);
  U256 s2 = f.mul(f.mul(Q.Y, P.Z), z1z1);
  U256 h = f.sub(u2, u1);
  U256 r = f.sub(s2, s1);
  if (h.is_zero()) {
    if (r.is_zero()) return jac_double(s, P, a_mont);
    return {f.one(), f.one(), U256()};
  }
  U256 i = f.sqr(f.add(h, h));
  U256 j = f.mul(h, i);
  r = f.add(r, r);
  U256 v = f.mul(u1, i);
  U256 x3 = f.sub(f.sub(f.sqr(r), j), f.add(v, v));
  U256 s1j = f.mul(s1, j);
  U256 y3 = f.sub(f.mul(r, f.sub(v, x3)), f.add(s1j, s1j));
  U256 z3 = f.mul(f.sub(f.sub(f.sqr(f.add(P.Z, Q.Z)), z1z1), z2z2), h);
  return {x3, y3, z3};
}

}  // namespace detail

// NIST P-256 domain parameters.
inline const CurveSuite& p256() {
  static const CurveSuite suite = [] {
    U256 p = U256::from_hex("ffffffff 00000001 00000000 00000000 00000000 ffffffff ffffffff ffffffff");
    U256 a = U256::from_hex("ffffffff 00000001 00000000 00000000 00000000 ffffffff ffffffff fffffffc");
    U256 b = U256::from_hex("5ac635d8 aa3a93e7 b3ebbd55 769886bc 651d06b0 cc53b0f6 3bce3c3e 27d2604b");
    U256 gx = U256::from_hex("6b17d1f2 e12c4247 f8bce6e5 63a440f2 77037d81 2deb33a0 f4a13945 d898c296");
    U256 gy = U256::from_hex("4fe342e2 fe1a7f9b 8ee7eb4a 7c0f9e16 2bce3357 6b315ece cbb64068 37bf51f5");
    U256 n = U256::from_hex("ffffffff 00000000 ffffffff ffffffff bce6faad a7179e84 f3b9cac2 fc632551");
    return detail::make_suite(kSuiteP256, "P-256", p, a, b, CurvePoint(gx, gy), n);
  }();
  return suite;
}

// y^2 = x^3 + 2x + 2 over F_17 with generator (5, 1). The group order is
// discovered by walking the subgroup generated by G.
inline const CurveSuite& toy() {
  static const CurveSuite suite = [] {
    U256 p(17), a(2), b(2);
    CurvePoint g(U256(5), U256(1));
    U256 n = detail::enumerate_order(g, p, a);
    return detail::make_suite(kSuiteToy, "TOY", p, a, b, g, n);
  }();
  return suite;
}

inline const CurveSuite* find_suite(std::uint16_t id) {
  if (id == kSuiteP256) return &p256();
  if (id == kSuiteToy) return &toy();
  return nullptr;
}

inline const CurveSuite& suite_by_id(std::uint16_t id) {
  if (const auto* s = find_suite(id)) return *s;
  throw Error(Errc::UnsupportedSuite, "suite id " + std::to_string(id));
}

// Private scalar in [1, n-1]. Wiped on destruction.
class Scalar {
 public:
  Scalar() = default;

  static Scalar from(const CurveSuite& suite, const U256& v) {
    if (v.is_zero() || v >= suite.n) throw std::out_of_range("scalar outside [1, n-1]");
    Scalar s;
    s.value_ = v;
    return s;
  }

  static Scalar from_bytes(const CurveSuite& suite, ByteView be) {
    if (be.size() != suite.scalar_len) throw std::out_of_range("scalar encoding length");
    return from(suite, U256::from_be(be));
  }

  Scalar(const Scalar&) = default;
  Scalar& operator=(const Scalar&) = default;
  ~Scalar() { wipe(); }

  const U256& value() const { return value_; }
  Bytes to_bytes(const CurveSuite& suite) const { return value_.to_be(suite.scalar_len); }
  void wipe() { secure_zero(value_.limb.data(), sizeof(value_.limb)); }

  friend bool operator==(const Scalar&, const Scalar&) = default;

 private:
  U256 value_;
};

struct KeyPair {
  Scalar priv;
  CurvePoint pub;
};

inline CurvePoint negate(const CurvePoint& P, const CurveSuite& suite) {
  if (P.is_identity()) return P;
  return CurvePoint(P.x(), suite.fp.neg(P.y()));
}

inline CurvePoint point_add(const CurvePoint& P, const CurvePoint& Q, const CurveSuite& suite) {
  return detail::affine_add(P, Q, suite.a, suite.fp);
}

// k*P for any k (including 0 and n) by left-to-right double-and-add.
inline CurvePoint scalar_mul(const U256& k, const CurvePoint& P, const CurveSuite& suite) {
  U256 a_mont = suite.fp.to_mont(suite.a);
  detail::Jacobian base = detail::to_jacobian(suite, P);
  detail::Jacobian acc{suite.fp.one(), suite.fp.one(), U256()};
  for (int i = static_cast<int>(k.bits()) - 1; i >= 0; --i) {
    acc = detail::jac_double(suite, acc, a_mont);
    if (k.bit(static_cast<std::size_t>(i))) acc = detail::jac_add(suite, acc, base, a_mont);
  }
  return detail::to_affine(suite, acc);
}

inline CurvePoint scalar_mul(const Scalar& k, const CurvePoint& P, const CurveSuite& suite) {
  return scalar_mul(k.value(), P, suite);
}

// Uniform scalar in [1, n-1] by rejection sampling on bits(n)-bit candidates.
inline Scalar random_scalar(RandomSource& rng, const CurveSuite& suite) {
  constexpr int kMaxAttempts = 256;
  const std::size_t nbits = suite.n.bits();
  Bytes buf(suite.scalar_len);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    rng.fill(buf);
    std::size_t excess = buf.size() * 8 - nbits;
    if (excess) buf[0] &= static_cast<std::uint8_t>(0xFF >> excess);
    U256 v = U256::from_be(buf);
    if (!v.is_zero() && v < suite.n) {
      secure_zero(buf);
      return Scalar::from(suite, v);
    }
  }
  secure_zero(buf);
  throw Error(Errc::GenerationFailure, "entropy source failed rejection sampling");
}

inline KeyPair keypair_from_scalar(const Scalar& d, const CurveSuite& suite) {
  return KeyPair{d, scalar_mul(d, suite.g, suite)};
}

inline KeyPair keypair_gen(RandomSource& rng, const CurveSuite& suite) {
  return keypair_from_scalar(random_scalar(rng, suite), suite);
}

// Uncompressed SEC1 layout: 0x04 || x || y.
inline Bytes point_encode(const CurvePoint& P, const CurveSuite& suite) {
  if (P.is_identity()) throw std::invalid_argument("cannot encode the identity");
  Bytes out;
  out.reserve(suite.point_len());
  out.push_back(0x04);
  append(out, P.x().to_be(suite.field_len));
  append(out, P.y().to_be(suite.field_len));
  return out;
}

inline CurvePoint point_decode(ByteView in, const CurveSuite& suite) {
  if (in.size() != suite.point_len()) throw Error(Errc::MalformedPoint, "bad length");
  if (in[0] != 0x04) throw Error(Errc::MalformedPoint, "bad prefix");
  CurvePoint P(U256::from_be(in.subspan(1, suite.field_len)),
               U256::from_be(in.subspan(1 + suite.field_len, suite.field_len)));
  if (!suite.on_curve(P)) throw Error(Errc::MalformedPoint, "point not on curve");
  return P;
}

// x-coordinate of d_local * Q_remote, big-endian, field_len bytes.
inline Bytes shared_secret(const Scalar& d_local, const CurvePoint& q_remote,
                           const CurveSuite& suite) {
  if (!suite.on_curve(q_remote)) throw Error(Errc::InvalidPeerKey, "peer point not on curve");
  CurvePoint c = scalar_mul(d_local, q_remote, suite);
  if (c.is_identity()) throw Error(Errc::InvalidPeerKey, "shared point is the identity");
  return c.x().to_be(suite.field_len);
}

}  // namespace vitalink::curve

#endif  // VITALINK_CURVE_HPP
