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

#include "vitalink/handshake.hpp"

#include <set>

#include "gtest/gtest.h"
#include "test_pki.hpp"

namespace vitalink::handshake {
namespace {

using credential::Role;
using testing::make_identity;
using testing::make_root;

struct Parties {
  SystemRandom rng;
  testing::Root root;
  Identity server_id;
  Identity device_id;

  explicit Parties(const curve::CurveSuite& suite = curve::p256()) {
    root = make_root(rng, suite);
    server_id = make_identity(rng, root, "ingest", Role::Server, suite);
    device_id = make_identity(rng, root, "watch-07", Role::Device, suite);
  }

  Config client_cfg() { return Config{device_id, root.cred, &rng}; }
  Config server_cfg() { return Config{server_id, root.cred, &rng}; }
};

template <typename F>
Errc error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return Errc::Io;
}

TEST(Handshake, HonestFlowAgreesOnKeys) {
  for (const auto* suite : {&curve::p256(), &curve::toy()}) {
    Parties p(*suite);
    ClientHandshake client(p.client_cfg(), *suite);
    ServerHandshake server(p.server_cfg());
    Bytes ch = client.start();
    EXPECT_EQ(client.transcript(), ch);
    EXPECT_EQ(client.phase(), Phase::AwaitServerHello);
    Bytes sh = server.respond(ch);
    EXPECT_EQ(server.phase(), Phase::AwaitClientFinish);
    auto fin = client.finish(sh);
    EXPECT_EQ(client.phase(), Phase::Established);
    auto done = server.complete(fin.message);
    EXPECT_EQ(server.phase(), Phase::Established);
    EXPECT_EQ(fin.keys, done.keys);
    EXPECT_EQ(done.peer_id, "watch-07");
    EXPECT_EQ(client.peer_identity(), std::optional<std::string>("ingest"));
    EXPECT_EQ(client.transcript(), server.transcript());
    EXPECT_EQ(fin.keys.session_id, kdf::hash(client.transcript()));
  }
}

TEST(Handshake, ClientHelloLayout) {
  Parties p;
  ClientHandshake client(p.client_cfg(), curve::p256());
  Bytes ch = client.start();
  ASSERT_EQ(ch.size(), 2u + 32 + 2 + 65);
  EXPECT_EQ(get_be16(ch.data()), curve::kSuiteP256);
  EXPECT_EQ(get_be16(ch.data() + 34), 65);
  EXPECT_NO_THROW(curve::point_decode(ByteView(ch).subspan(36), curve::p256()));
}

TEST(Handshake, FreshClientRandoms) {
  Parties p;
  std::set<Bytes> randoms;
  for (int i = 0; i < 20; ++i) {
    ClientHandshake c(p.client_cfg(), curve::p256());
    Bytes ch = c.start();
    EXPECT_TRUE(randoms.insert(Bytes(ch.begin() + 2, ch.begin() + 34)).second);
  }
}

TEST(Handshake, ServerSignatureIsIndependentlyVerifiable) {
  Parties p;
  ClientHandshake client(p.client_cfg(), curve::p256());
  ServerHandshake server(p.server_cfg());
  Bytes ch = client.start();
  Bytes sh = server.respond(ch);
  // Walk the ServerHello layout by hand.
  std::size_t off = 32;
  std::size_t eph_len = get_be16(&sh[off]);
  off += 2 + eph_len;
  std::size_t cred_len = get_be16(&sh[off]);
  off += 2 + cred_len;
  std::size_t sig_len = get_be16(&sh[off]);
  Bytes sig(sh.begin() + static_cast<long>(off) + 2, sh.begin() + static_cast<long>(off + 2 + sig_len));
  ASSERT_EQ(sh.size(), off + 2 + sig_len + 32);

  Bytes signed_part = ch;
  signed_part.insert(signed_part.end(), sh.begin(), sh.begin() + static_cast<long>(off));
  kdf::Sha256 h;
  h.update("vl srv");
  h.update(signed_part);
  auto digest = h.finish();
  EXPECT_TRUE(credential::schnorr_verify(p.server_id.cred.fields.static_pub, digest, sig,
                                         curve::p256()));
}

TEST(Handshake, UnknownSuiteRejected) {
  Parties p;
  ClientHandshake client(p.client_cfg(), curve::p256());
  Bytes ch = client.start();
  ch[0] = 0xFF;
  ch[1] = 0xFF;
  ServerHandshake server(p.server_cfg());
  EXPECT_EQ(error_of([&] { server.respond(ch); }), Errc::UnsupportedSuite);
  EXPECT_EQ(server.phase(), Phase::Failed);
}

TEST(Handshake, OffCurveEphemeralRejected) {
  Parties p;
  ClientHandshake client(p.client_cfg(), curve::p256());
  Bytes ch = client.start();
  ch.back() ^= 1;
  ServerHandshake server(p.server_cfg());
  EXPECT_EQ(error_of([&] { server.respond(ch); }), Errc::MalformedPoint);
  EXPECT_EQ(server.phase(), Phase::Failed);
}

TEST(Handshake, ServerCredentialFromOtherRoot) {
  Parties p;
  auto rogue_root = make_root(p.rng);
  auto rogue_server = make_identity(p.rng, rogue_root, "ingest", Role::Server);
  ClientHandshake client(p.client_cfg(), curve::p256());
  ServerHandshake server(Config{rogue_server, rogue_root.cred, &p.rng});
  Bytes sh = server.respond(client.start());
  EXPECT_EQ(error_of([&] { client.finish(sh); }), Errc::BadServerCredential);
  EXPECT_EQ(client.phase(), Phase::Failed);
}

TEST(Handshake, FlippedServerSignature) {
  Parties p;
  ClientHandshake client(p.client_cfg(), curve::p256());
  ServerHandshake server(p.server_cfg());
  Bytes sh = server.respond(client.start());
  // Last byte of s sits just before the 32-byte MAC.
  sh[sh.size() - 33] ^= 0x01;
  EXPECT_EQ(error_of([&] { client.finish(sh); }), Errc::BadTranscriptSignature);
  EXPECT_EQ(client.phase(), Phase::Failed);
}

TEST(Handshake, ReplayedClientFinish) {
  Parties p;
  Bytes old_finish;
  {
    ClientHandshake client(p.client_cfg(), curve::p256());
    ServerHandshake server(p.server_cfg());
    old_finish = client.finish(server.respond(client.start())).message;
    server.complete(old_finish);
  }
  ClientHandshake client(p.client_cfg(), curve::p256());
  ServerHandshake server(p.server_cfg());
  server.respond(client.start());
  EXPECT_EQ(error_of([&] { server.complete(old_finish); }), Errc::BadFinishedMac);
  EXPECT_EQ(server.phase(), Phase::Failed);
}

TEST(Handshake, DeviceHoldingServerRole) {
  Parties p;
  auto wrong = make_identity(p.rng, p.root, "watch-07", Role::Server);
  ClientHandshake client(Config{wrong, p.root.cred, &p.rng}, curve::p256());
  ServerHandshake server(p.server_cfg());
  auto fin = client.finish(server.respond(client.start()));
  try {
    server.complete(fin.message);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BadClientCredential);
    EXPECT_NE(std::string(e.what()).find("RoleMismatch"), std::string::npos);
  }
}

TEST(Handshake, DeviceFromRogueRoot) {
  Parties p;
  auto rogue_root = make_root(p.rng);
  auto rogue_device = make_identity(p.rng, rogue_root, "watch-07", Role::Device);
  // The device trusts the real root so the server side is what must refuse.
  ClientHandshake client(Config{rogue_device, p.root.cred, &p.rng}, curve::p256());
  ServerHandshake server(p.server_cfg());
  auto fin = client.finish(server.respond(client.start()));
  EXPECT_EQ(error_of([&] { server.complete(fin.message); }), Errc::BadClientCredential);
}

TEST(Handshake, OutOfPhaseCallsRejected) {
  Parties p;
  ClientHandshake client(p.client_cfg(), curve::p256());
  EXPECT_EQ(error_of([&] { client.finish(Bytes(10, 0)); }), Errc::OutOfPhase);
  client.start();
  EXPECT_EQ(error_of([&] { client.start(); }), Errc::OutOfPhase);
  ServerHandshake server(p.server_cfg());
  EXPECT_EQ(error_of([&] { server.complete(Bytes(10, 0)); }), Errc::OutOfPhase);
}

TEST(Handshake, ExpiredServerCredentialRespectsSkew) {
  Parties p;
  auto expired_at = p.server_id.cred.fields.valid_to;
  auto cfg = p.client_cfg();
  cfg.clock = [=] { return expired_at + 299; };
  {
    ClientHandshake client(cfg, curve::p256());
    ServerHandshake server(p.server_cfg());
    EXPECT_NO_THROW(client.finish(server.respond(client.start())));
  }
  cfg.clock = [=] { return expired_at + 301; };
  ClientHandshake client(cfg, curve::p256());
  ServerHandshake server(p.server_cfg());
  Bytes sh = server.respond(client.start());
  EXPECT_EQ(error_of([&] { client.finish(sh); }), Errc::BadServerCredential);
}

// Flip one bit at every byte position of every message; no run may reach
// Established on both sides, and no failed side may report keys.
TEST(Handshake, AnyMutationAbortsSomeSide) {
  Parties p;
  auto run = [&](int which, std::size_t pos) {
    ClientHandshake client(p.client_cfg(), curve::p256());
    ServerHandshake server(p.server_cfg());
    bool client_ok = false, server_ok = false;
    try {
      Bytes ch = client.start();
      if (which == 0) ch[pos % ch.size()] ^= 0x04;
      Bytes sh = server.respond(ch);
      if (which == 1) sh[pos % sh.size()] ^= 0x04;
      auto fin = client.finish(sh);
      client_ok = true;
      if (which == 2) fin.message[pos % fin.message.size()] ^= 0x04;
      server.complete(fin.message);
      server_ok = true;
    } catch (const Error&) {
    }
    EXPECT_FALSE(client_ok && server_ok) << "message " << which << " byte " << pos;
    if (!client_ok) {
      EXPECT_NE(client.phase(), Phase::Established);
    }
    if (!server_ok) {
      EXPECT_NE(server.phase(), Phase::Established);
    }
  };
  for (std::size_t pos = 0; pos < 101; ++pos) run(0, pos);
  for (std::size_t pos = 0; pos < 400; pos += 3) run(1, pos);
  for (std::size_t pos = 0; pos < 300; pos += 3) run(2, pos);
}

TEST(DeriveSessionKeys, LengthsAndDeterminism) {
  SystemRandom rng;
  Bytes shared = rng.bytes(32), cr = rng.bytes(32), sr = rng.bytes(32);
  kdf::Digest th = kdf::hash(rng.bytes(64));
  auto a = derive_session_keys(shared, cr, sr, th);
  auto b = derive_session_keys(shared, cr, sr, th);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.c2s_key.bytes().size(), 16u);
  EXPECT_EQ(a.s2c_key.bytes().size(), 16u);
  EXPECT_EQ(a.c2s_salt.size(), 4u);
  EXPECT_EQ(a.s2c_salt.size(), 4u);
  EXPECT_EQ(a.client_fin_key.size(), 32u);
  EXPECT_EQ(a.server_fin_key.size(), 32u);
  EXPECT_FALSE(a.c2s_key == a.s2c_key);
}

TEST(DeriveSessionKeys, TranscriptBitAvalanche) {
  SystemRandom rng;
  Bytes shared = rng.bytes(32), cr = rng.bytes(32), sr = rng.bytes(32);
  for (int bit = 0; bit < 256; bit += 5) {
    kdf::Digest th = kdf::hash(rng.bytes(64));
    kdf::Digest th2 = th;
    th2[static_cast<std::size_t>(bit / 8)] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    auto a = derive_session_keys(shared, cr, sr, th);
    auto b = derive_session_keys(shared, cr, sr, th2);
    EXPECT_FALSE(a.c2s_key == b.c2s_key);
    EXPECT_FALSE(a.s2c_key == b.s2c_key);
    EXPECT_NE(a.c2s_salt, b.c2s_salt);
    EXPECT_NE(a.s2c_salt, b.s2c_salt);
    EXPECT_NE(a.client_fin_key, b.client_fin_key);
    EXPECT_NE(a.server_fin_key, b.server_fin_key);
  }
}

TEST(Handshake, SessionsAreUnique) {
  Parties p;
  std::set<kdf::Digest> ids;
  std::set<std::array<std::uint8_t, 16>> keys;
  for (int i = 0; i < 100; ++i) {
    ClientHandshake client(p.client_cfg(), curve::p256());
    ServerHandshake server(p.server_cfg());
    auto fin = client.finish(server.respond(client.start()));
    auto done = server.complete(fin.message);
    EXPECT_EQ(fin.keys, done.keys);
    EXPECT_TRUE(ids.insert(done.keys.session_id).second);
    EXPECT_TRUE(keys.insert(done.keys.c2s_key.bytes()).second);
  }
}

}  // namespace
}  // namespace vitalink::handshake
