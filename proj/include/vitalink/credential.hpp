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

#ifndef VITALINK_CREDENTIAL_HPP
#define VITALINK_CREDENTIAL_HPP

// Schnorr signatures over the protocol curve, and two-level signed identity
// credentials (self-signed issuer root -> device/server leaf).
//
// Credential wire layout (file extension .vlc, stored raw):
//   version(1) || subject_id(16) || role(1) || static_pub(point) ||
//   valid_from(BE64) || valid_to(BE64) || issuer_id(16) ||
//   R(point) || s(BE, scalar_len)
// The to-be-signed bytes are everything before R. All fields are fixed width
// for a given suite, so the suite is recovered from the total length.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "vitalink/bytes.hpp"
#include "vitalink/curve.hpp"
#include "vitalink/error.hpp"
#include "vitalink/kdf.hpp"
#include "vitalink/random.hpp"

namespace vitalink::credential {

using curve::CurvePoint;
using curve::CurveSuite;
using curve::Scalar;

struct SchnorrSig {
  CurvePoint r;
  U256 s;

  friend bool operator==(const SchnorrSig&, const SchnorrSig&) = default;
};

inline std::size_t sig_len(const CurveSuite& suite) { return suite.point_len() + suite.scalar_len; }

inline Bytes sig_encode(const SchnorrSig& sig, const CurveSuite& suite) {
  Bytes out = curve::point_encode(sig.r, suite);
  append(out, sig.s.to_be(suite.scalar_len));
  return out;
}

inline SchnorrSig sig_decode(ByteView in, const CurveSuite& suite) {
  if (in.size() != sig_len(suite)) throw Error(Errc::MalformedSignature, "bad length");
  SchnorrSig sig;
  try {
    sig.r = curve::point_decode(in.first(suite.point_len()), suite);
  } catch (const Error&) {
    throw Error(Errc::MalformedSignature, "commitment is not a curve point");
  }
  sig.s = U256::from_be(in.subspan(suite.point_len()));
  if (sig.s >= suite.n) throw Error(Errc::MalformedSignature, "s out of range");
  return sig;
}

// e = H(encode(R) || encode(Q) || msg) mod n
inline U256 challenge(const CurvePoint& r, const CurvePoint& q, ByteView msg,
                      const CurveSuite& suite) {
  kdf::Sha256 h;
  h.update(curve::point_encode(r, suite));
  h.update(curve::point_encode(q, suite));
  h.update(msg);
  kdf::Digest d = h.finish();
  return reduce(U256::from_be(d), suite.n);
}

// Signing with a caller-chosen nonce k. Exposed for known-answer tests.
inline SchnorrSig schnorr_sign_with_nonce(const Scalar& d, const Scalar& k, ByteView msg,
                                          const CurveSuite& suite) {
  const auto& fn = suite.fn;
  CurvePoint r = curve::scalar_mul(k, suite.g, suite);
  CurvePoint q = curve::scalar_mul(d, suite.g, suite);
  U256 e = challenge(r, q, msg, suite);
  U256 ed = fn.mul_plain(e, d.value());
  U256 s = fn.add(reduce(k.value(), suite.n), ed);
  return SchnorrSig{r, s};
}

inline SchnorrSig schnorr_sign(const Scalar& d, ByteView msg, RandomSource& rng,
                               const CurveSuite& suite) {
  Scalar k = curve::random_scalar(rng, suite);
  return schnorr_sign_with_nonce(d, k, msg, suite);
}

// s*G == R + e*Q
inline bool schnorr_verify(const CurvePoint& q, ByteView msg, const SchnorrSig& sig,
                           const CurveSuite& suite) {
  if (!suite.on_curve(q) || !suite.on_curve(sig.r) || sig.s >= suite.n) return false;
  U256 e = challenge(sig.r, q, msg, suite);
  CurvePoint lhs = curve::scalar_mul(sig.s, suite.g, suite);
  CurvePoint rhs = curve::point_add(sig.r, curve::scalar_mul(e, q, suite), suite);
  return lhs == rhs;
}

// Decodes then verifies; a malformed encoding throws MalformedSignature
// rather than returning false.
inline bool schnorr_verify(const CurvePoint& q, ByteView msg, ByteView sig_bytes,
                           const CurveSuite& suite) {
  return schnorr_verify(q, msg, sig_decode(sig_bytes, suite), suite);
}

enum class Role : std::uint8_t { Device = 0, Server = 1, Issuer = 2 };

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::Device: return "device";
    case Role::Server: return "server";
    case Role::Issuer: return "issuer";
  }
  return "unknown";
}

inline std::optional<Role> role_from_string(std::string_view s) {
  if (s == "device") return Role::Device;
  if (s == "server") return Role::Server;
  if (s == "issuer") return Role::Issuer;
  return std::nullopt;
}

inline constexpr std::uint8_t kCredentialVersion = 1;
inline constexpr std::size_t kIdSize = 16;

using Id = std::array<std::uint8_t, kIdSize>;

// UTF-8 name, zero padded to 16 bytes.
inline Id make_id(std::string_view name) {
  if (name.empty() || name.size() > kIdSize)
    throw Error(Errc::InvalidCredentialFields, "subject id must be 1..16 bytes");
  Id id{};
  std::memcpy(id.data(), name.data(), name.size());
  return id;
}

inline std::string id_string(const Id& id) {
  std::size_t len = 0;
  while (len < id.size() && id[len]) ++len;
  return std::string(reinterpret_cast<const char*>(id.data()), len);
}

struct CredentialFields {
  Id subject_id{};
  Role role = Role::Device;
  CurvePoint static_pub;
  std::int64_t valid_from = 0;
  std::int64_t valid_to = 0;
  Id issuer_id{};
};

struct Credential {
  std::uint8_t version = kCredentialVersion;
  CredentialFields fields;
  SchnorrSig signature;
  std::uint16_t suite_id = curve::kSuiteP256;

  const CurveSuite& suite() const { return curve::suite_by_id(suite_id); }
  std::string subject() const { return id_string(fields.subject_id); }
};

inline std::size_t credential_len(const CurveSuite& suite) {
  return 1 + kIdSize + 1 + suite.point_len() + 8 + 8 + kIdSize + sig_len(suite);
}

inline Bytes to_be_signed(std::uint8_t version, const CredentialFields& f,
                          const CurveSuite& suite) {
  Bytes out;
  out.push_back(version);
  append(out, f.subject_id);
  out.push_back(static_cast<std::uint8_t>(f.role));
  append(out, curve::point_encode(f.static_pub, suite));
  put_be64(out, static_cast<std::uint64_t>(f.valid_from));
  put_be64(out, static_cast<std::uint64_t>(f.valid_to));
  append(out, f.issuer_id);
  return out;
}

inline Bytes credential_encode(const Credential& c) {
  const auto& suite = c.suite();
  Bytes out = to_be_signed(c.version, c.fields, suite);
  append(out, sig_encode(c.signature, suite));
  return out;
}

inline Credential credential_decode(ByteView in, const CurveSuite& suite) {
  if (in.size() != credential_len(suite))
    throw Error(Errc::MalformedCredential, "length does not match suite " + suite.name);
  Reader rd(in, [] { throw Error(Errc::MalformedCredential, "truncated"); });
  Credential c;
  c.suite_id = suite.id;
  c.version = rd.u8();
  if (c.version != kCredentialVersion) throw Error(Errc::MalformedCredential, "unknown version");
  auto sid = rd.take(kIdSize);
  std::copy(sid.begin(), sid.end(), c.fields.subject_id.begin());
  std::uint8_t role = rd.u8();
  if (role > 2) throw Error(Errc::MalformedCredential, "unknown role");
  c.fields.role = static_cast<Role>(role);
  try {
    c.fields.static_pub = curve::point_decode(rd.take(suite.point_len()), suite);
  } catch (const Error& e) {
    throw Error(Errc::MalformedCredential, e.what());
  }
  c.fields.valid_from = static_cast<std::int64_t>(rd.u64());
  c.fields.valid_to = static_cast<std::int64_t>(rd.u64());
  auto iid = rd.take(kIdSize);
  std::copy(iid.begin(), iid.end(), c.fields.issuer_id.begin());
  try {
    c.signature = sig_decode(rd.take(sig_len(suite)), suite);
  } catch (const Error& e) {
    throw Error(Errc::MalformedCredential, e.what());
  }
  return c;
}

// Suite inferred from the encoding length.
inline Credential credential_decode(ByteView in) {
  for (std::uint16_t id : {curve::kSuiteP256, curve::kSuiteToy}) {
    const auto& s = curve::suite_by_id(id);
    if (in.size() == credential_len(s)) return credential_decode(in, s);
  }
  throw Error(Errc::MalformedCredential, "length matches no suite");
}

inline Credential credential_issue(const Scalar& issuer_priv, const Id& issuer_id,
                                   const CredentialFields& fields, RandomSource& rng,
                                   const CurveSuite& suite) {
  if (fields.valid_from >= fields.valid_to)
    throw Error(Errc::InvalidCredentialFields, "valid_from must precede valid_to");
  if (!suite.on_curve(fields.static_pub))
    throw Error(Errc::InvalidCredentialFields, "static_pub is not a curve point");
  if (fields.subject_id[0] == 0) throw Error(Errc::InvalidCredentialFields, "empty subject id");
  Credential c;
  c.suite_id = suite.id;
  c.fields = fields;
  c.fields.issuer_id = issuer_id;
  c.signature = schnorr_sign(issuer_priv, to_be_signed(c.version, c.fields, suite), rng, suite);
  return c;
}

enum class Status {
  Ok,
  BadSignature,
  Expired,
  NotYetValid,
  UnknownIssuer,
  RoleMismatch,
};

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::Ok: return "ok";
    case Status::BadSignature: return "BadSignature";
    case Status::Expired: return "Expired";
    case Status::NotYetValid: return "NotYetValid";
    case Status::UnknownIssuer: return "UnknownIssuer";
    case Status::RoleMismatch: return "RoleMismatch";
  }
  return "unknown";
}

// Clock-skew tolerance used by the network endpoints.
inline constexpr std::int64_t kClockSkewSeconds = 300;

inline bool signature_valid(const Credential& cred, const CurvePoint& issuer_pub) {
  const auto& suite = cred.suite();
  return schnorr_verify(issuer_pub, to_be_signed(cred.version, cred.fields, suite),
                        cred.signature, suite);
}

// A usable trust root is a self-signed issuer credential.
inline bool is_trust_root(const Credential& root) {
  return root.fields.role == Role::Issuer && root.fields.issuer_id == root.fields.subject_id &&
         signature_valid(root, root.fields.static_pub);
}

// Checks, in order: issuer is the trust root, signature, validity window
// (widened by skew_seconds on both sides), then role.
inline Status credential_verify(const Credential& cred, const Credential& trust_root,
                                std::int64_t now, std::optional<Role> expected_role = std::nullopt,
                                std::int64_t skew_seconds = 0) {
  if (cred.suite_id != trust_root.suite_id || !is_trust_root(trust_root) ||
      cred.fields.issuer_id != trust_root.fields.subject_id)
    return Status::UnknownIssuer;
  if (!signature_valid(cred, trust_root.fields.static_pub)) return Status::BadSignature;
  if (now < cred.fields.valid_from - skew_seconds) return Status::NotYetValid;
  if (now > cred.fields.valid_to + skew_seconds) return Status::Expired;
  if (expected_role && cred.fields.role != *expected_role) return Status::RoleMismatch;
  return Status::Ok;
}

}  // namespace vitalink::credential

#endif  // VITALINK_CREDENTIAL_HPP
