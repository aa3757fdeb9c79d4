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

#ifndef VITALINK_HANDSHAKE_HPP
#define VITALINK_HANDSHAKE_HPP

// Three-message mutually authenticated key exchange (sign-and-MAC pattern).
//
//   ClientHello  = suite_id(2) || client_random(32) || var16(eph_pub)
//   ServerHello  = server_random(32) || var16(eph_pub) || var16(credential)
//                  || var16(sig) || fin_mac(32)
//   ClientFinish = var16(credential) || var16(sig) || fin_mac(32)
//
// var16 fields carry a 16-bit big-endian length prefix. Each side signs and
// MACs the transcript up to (not including) its own signature field:
//
//   server sig = Sign(server_static, H("vl srv" || CH || SH[..sig]))
//   server mac = HMAC(server_fin_key, H(CH || SH[..sig]))
//   client sig = Sign(client_static, H("vl cli" || CH || SH || CF[..sig]))
//   client mac = HMAC(client_fin_key, H(CH || SH || CF[..sig]))
//
// Session keys come from the ephemeral ECDH secret and H(CH || SH[..sig]);
// the session id is H(CH || SH || CF). Receivers check credential, then MAC,
// then signature, and any failure wipes ephemeral and derived keys.

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "vitalink/aead.hpp"
#include "vitalink/bytes.hpp"
#include "vitalink/credential.hpp"
#include "vitalink/curve.hpp"
#include "vitalink/error.hpp"
#include "vitalink/kdf.hpp"
#include "vitalink/random.hpp"

namespace vitalink::handshake {

inline constexpr std::size_t kRandomSize = 32;
inline constexpr std::size_t kSaltSize = 4;
inline constexpr std::string_view kServerSigLabel = "vl srv";
inline constexpr std::string_view kClientSigLabel = "vl cli";

using Salt = std::array<std::uint8_t, kSaltSize>;

struct SessionKeys {
  aead::AeadKey c2s_key;
  aead::AeadKey s2c_key;
  Salt c2s_salt{};
  Salt s2c_salt{};
  kdf::Digest client_fin_key{};
  kdf::Digest server_fin_key{};
  kdf::Digest session_id{};

  void wipe() {
    c2s_key.wipe();
    s2c_key.wipe();
    secure_zero(c2s_salt);
    secure_zero(s2c_salt);
    secure_zero(client_fin_key);
    secure_zero(server_fin_key);
  }

  friend bool operator==(const SessionKeys&, const SessionKeys&) = default;
};

template <std::size_t N>
std::array<std::uint8_t, N> to_array(ByteView b) {
  std::array<std::uint8_t, N> a{};
  std::copy_n(b.begin(), N, a.begin());
  return a;
}

// prk = HKDF-Extract(client_random || server_random, shared); each field is
// HKDF-Expand(prk, label || transcript_hash, len). session_id is provisionally
// the transcript hash; the handshake replaces it with the full-transcript
// digest once established.
inline SessionKeys derive_session_keys(ByteView shared, ByteView client_random,
                                       ByteView server_random,
                                       const kdf::Digest& transcript_hash) {
  kdf::Digest prk = kdf::hkdf_extract(concat({client_random, server_random}), shared);
  auto expand = [&](std::string_view label, std::size_t len) {
    return kdf::hkdf_expand(prk, concat({to_bytes(label), transcript_hash}), len);
  };
  SessionKeys k;
  k.c2s_key = aead::AeadKey::from(expand(kdf::kLabelC2sKey, aead::kKeySize));
  k.s2c_key = aead::AeadKey::from(expand(kdf::kLabelS2cKey, aead::kKeySize));
  k.c2s_salt = to_array<kSaltSize>(expand(kdf::kLabelC2sSalt, kSaltSize));
  k.s2c_salt = to_array<kSaltSize>(expand(kdf::kLabelS2cSalt, kSaltSize));
  k.client_fin_key = to_array<kdf::kDigestSize>(expand(kdf::kLabelClientFin, kdf::kDigestSize));
  k.server_fin_key = to_array<kdf::kDigestSize>(expand(kdf::kLabelServerFin, kdf::kDigestSize));
  k.session_id = transcript_hash;
  secure_zero(prk);
  return k;
}

// Long-term key plus the credential binding it to a subject.
struct Identity {
  curve::Scalar priv;
  credential::Credential cred;
};

enum class Phase { Start, AwaitServerHello, AwaitClientFinish, Established, Failed };

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Start: return "Start";
    case Phase::AwaitServerHello: return "AwaitServerHello";
    case Phase::AwaitClientFinish: return "AwaitClientFinish";
    case Phase::Established: return "Established";
    case Phase::Failed: return "Failed";
  }
  return "?";
}

using Clock = std::function<std::int64_t()>;

inline std::int64_t system_clock_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

struct Config {
  Identity identity;
  credential::Credential trust_root;
  RandomSource* rng = nullptr;
  Clock clock = system_clock_seconds;
  std::int64_t skew_seconds = credential::kClockSkewSeconds;
};

namespace detail {

inline auto short_reader(ByteView b) {
  return Reader(b, [] { throw Error(Errc::MalformedHandshake, "truncated message"); });
}

inline kdf::Digest labelled_hash(std::string_view label, ByteView transcript) {
  return kdf::Sha256().update(label).update(transcript).finish();
}

}  // namespace detail

// State shared by both roles. The transcript only grows and the phase only
// moves forward.
class HandshakeBase {
 public:
  HandshakeBase(const HandshakeBase&) = delete;
  HandshakeBase& operator=(const HandshakeBase&) = delete;
  HandshakeBase(HandshakeBase&&) = default;
  HandshakeBase& operator=(HandshakeBase&&) = default;

  ~HandshakeBase() {
    eph_priv_.wipe();
    if (keys_) keys_->wipe();
  }

  Phase phase() const { return phase_; }
  const Bytes& transcript() const { return transcript_; }
  const curve::CurveSuite* suite() const { return suite_; }
  // Subject id of the authenticated peer, once established.
  const std::optional<std::string>& peer_identity() const { return peer_; }

 protected:
  explicit HandshakeBase(Config cfg) : cfg_(std::move(cfg)) {
    if (!cfg_.rng) throw std::invalid_argument("handshake needs a random source");
  }

  void advance(Phase next) {
    if (phase_ == Phase::Established || phase_ == Phase::Failed || next <= phase_)
      throw Error(Errc::OutOfPhase, std::string(to_string(phase_)) + " -> " +
                                        std::string(to_string(next)));
    phase_ = next;
    if (phase_ == Phase::Established || phase_ == Phase::Failed) eph_priv_.wipe();
  }

  void require(Phase p) const {
    if (phase_ != p) throw Error(Errc::OutOfPhase, "in phase " + std::string(to_string(phase_)));
  }

  void append_transcript(ByteView b) { append(transcript_, b); }

  [[noreturn]] void fail(Errc code, const std::string& detail) {
    if (phase_ != Phase::Failed && phase_ != Phase::Established) phase_ = Phase::Failed;
    eph_priv_.wipe();
    if (keys_) {
      keys_->wipe();
      keys_.reset();
    }
    throw Error(code, detail);
  }

  // Runs f; any protocol error moves the state to Failed before propagating.
  template <typename F>
  auto guarded(F&& f) {
    try {
      return f();
    } catch (const Error& e) {
      if (phase_ != Phase::Failed) fail(e.code(), e.what());
      throw;
    }
  }

  credential::Credential decode_peer_credential(ByteView b, Errc on_bad) {
    try {
      return credential::credential_decode(b, *suite_);
    } catch (const Error& e) {
      fail(on_bad, e.what());
    }
  }

  void check_peer_credential(const credential::Credential& c, credential::Role role, Errc on_bad) {
    auto st = credential::credential_verify(c, cfg_.trust_root, cfg_.clock(), role,
                                            cfg_.skew_seconds);
    if (st != credential::Status::Ok) fail(on_bad, std::string(credential::to_string(st)));
  }

  void check_mac(const kdf::Digest& key, ByteView transcript, ByteView mac) {
    kdf::Digest expect = kdf::hmac(key, kdf::hash(transcript));
    if (!ct_equal(expect, mac)) fail(Errc::BadFinishedMac, "finished MAC mismatch");
  }

  void check_sig(const curve::CurvePoint& pub, std::string_view label, ByteView transcript,
                 ByteView sig) {
    bool ok = false;
    try {
      ok = credential::schnorr_verify(pub, detail::labelled_hash(label, transcript), sig, *suite_);
    } catch (const Error& e) {
      fail(Errc::BadTranscriptSignature, e.what());
    }
    if (!ok) fail(Errc::BadTranscriptSignature, "transcript signature invalid");
  }

  Bytes sign(std::string_view label, ByteView transcript) {
    auto sig = credential::schnorr_sign(cfg_.identity.priv, detail::labelled_hash(label, transcript),
                                        *cfg_.rng, *suite_);
    return credential::sig_encode(sig, *suite_);
  }

  void install_keys(SessionKeys k) {
    if (k.c2s_key == k.s2c_key) fail(Errc::KeyCollision, "directional keys collide");
    keys_ = std::move(k);
  }

  Config cfg_;
  const curve::CurveSuite* suite_ = nullptr;
  Phase phase_ = Phase::Start;
  Bytes transcript_;
  curve::Scalar eph_priv_;
  std::optional<SessionKeys> keys_;
  std::optional<std::string> peer_;
};

struct ClientFinishResult {
  Bytes message;
  SessionKeys keys;
};

class ClientHandshake : public HandshakeBase {
 public:
  ClientHandshake(Config cfg, const curve::CurveSuite& suite) : HandshakeBase(std::move(cfg)) {
    suite_ = &suite;
  }

  // Emits ClientHello.
  Bytes start() {
    require(Phase::Start);
    return guarded([&] {
      client_random_ = cfg_.rng->bytes(kRandomSize);
      auto eph = curve::keypair_gen(*cfg_.rng, *suite_);
      eph_priv_ = eph.priv;
      Bytes msg;
      put_be16(msg, suite_->id);
      append(msg, client_random_);
      put_var16(msg, curve::point_encode(eph.pub, *suite_));
      append_transcript(msg);
      advance(Phase::AwaitServerHello);
      return msg;
    });
  }

  // Verifies ServerHello and emits ClientFinish.
  ClientFinishResult finish(ByteView server_hello) {
    require(Phase::AwaitServerHello);
    return guarded([&] {
      auto rd = detail::short_reader(server_hello);
      auto server_random = rd.take(kRandomSize);
      auto eph_field = rd.var16();
      auto cred_field = rd.var16();
      std::size_t core_len = server_hello.size() - rd.remaining();
      auto sig_field = rd.var16();
      auto mac = rd.take(kdf::kDigestSize);
      if (!rd.done()) throw Error(Errc::MalformedHandshake, "trailing bytes in ServerHello");

      auto server_eph = curve::point_decode(eph_field, *suite_);
      auto server_cred = decode_peer_credential(cred_field, Errc::BadServerCredential);
      check_peer_credential(server_cred, credential::Role::Server, Errc::BadServerCredential);

      Bytes t_server = transcript_;
      append(t_server, server_hello.first(core_len));
      Bytes shared = curve::shared_secret(eph_priv_, server_eph, *suite_);
      install_keys(derive_session_keys(shared, client_random_, server_random,
                                       kdf::hash(t_server)));
      secure_zero(shared);
      check_mac(keys_->server_fin_key, t_server, mac);
      check_sig(server_cred.fields.static_pub, kServerSigLabel, t_server, sig_field);
      append_transcript(server_hello);

      Bytes msg;
      put_var16(msg, credential::credential_encode(cfg_.identity.cred));
      Bytes t_client = transcript_;
      append(t_client, msg);
      put_var16(msg, sign(kClientSigLabel, t_client));
      kdf::Digest fin = kdf::hmac(keys_->client_fin_key, kdf::hash(t_client));
      append(msg, fin);
      append_transcript(msg);

      keys_->session_id = kdf::hash(transcript_);
      peer_ = server_cred.subject();
      advance(Phase::Established);
      return ClientFinishResult{msg, *keys_};
    });
  }

 private:
  Bytes client_random_;
};

struct ServerCompletion {
  SessionKeys keys;
  std::string peer_id;
};

class ServerHandshake : public HandshakeBase {
 public:
  explicit ServerHandshake(Config cfg) : HandshakeBase(std::move(cfg)) {}

  // Validates ClientHello and emits ServerHello.
  Bytes respond(ByteView client_hello) {
    require(Phase::Start);
    return guarded([&] {
      auto rd = detail::short_reader(client_hello);
      std::uint16_t suite_id = rd.u16();
      suite_ = curve::find_suite(suite_id);
      if (!suite_) throw Error(Errc::UnsupportedSuite, "suite id " + std::to_string(suite_id));
      if (cfg_.identity.cred.suite_id != suite_id)
        throw Error(Errc::UnsupportedSuite, "server identity is on a different suite");
      auto client_random = rd.take(kRandomSize);
      auto client_eph = curve::point_decode(rd.var16(), *suite_);
      if (!rd.done()) throw Error(Errc::MalformedHandshake, "trailing bytes in ClientHello");
      append_transcript(client_hello);

      Bytes server_random = cfg_.rng->bytes(kRandomSize);
      auto eph = curve::keypair_gen(*cfg_.rng, *suite_);
      eph_priv_ = eph.priv;

      Bytes msg = server_random;
      put_var16(msg, curve::point_encode(eph.pub, *suite_));
      put_var16(msg, credential::credential_encode(cfg_.identity.cred));
      Bytes t_server = transcript_;
      append(t_server, msg);

      Bytes shared = curve::shared_secret(eph_priv_, client_eph, *suite_);
      install_keys(derive_session_keys(shared, client_random, server_random,
                                       kdf::hash(t_server)));
      secure_zero(shared);
      put_var16(msg, sign(kServerSigLabel, t_server));
      kdf::Digest fin = kdf::hmac(keys_->server_fin_key, kdf::hash(t_server));
      append(msg, fin);
      append_transcript(msg);
      advance(Phase::AwaitClientFinish);
      return msg;
    });
  }

  // Verifies ClientFinish; returns the session keys and the device subject.
  ServerCompletion complete(ByteView client_finish) {
    require(Phase::AwaitClientFinish);
    return guarded([&] {
      auto rd = detail::short_reader(client_finish);
      auto cred_field = rd.var16();
      std::size_t core_len = client_finish.size() - rd.remaining();
      auto sig_field = rd.var16();
      auto mac = rd.take(kdf::kDigestSize);
      if (!rd.done()) throw Error(Errc::MalformedHandshake, "trailing bytes in ClientFinish");

      auto client_cred = decode_peer_credential(cred_field, Errc::BadClientCredential);
      check_peer_credential(client_cred, credential::Role::Device, Errc::BadClientCredential);
      Bytes t_client = transcript_;
      append(t_client, client_finish.first(core_len));
      check_mac(keys_->client_fin_key, t_client, mac);
      check_sig(client_cred.fields.static_pub, kClientSigLabel, t_client, sig_field);
      append_transcript(client_finish);

      keys_->session_id = kdf::hash(transcript_);
      peer_ = client_cred.subject();
      advance(Phase::Established);
      return ServerCompletion{*keys_, *peer_};
    });
  }
};

}  // namespace vitalink::handshake

#endif  // VITALINK_HANDSHAKE_HPP
