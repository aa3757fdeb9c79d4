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

#include "vitalink/record.hpp"

#include <random>
#include <set>

#include "gtest/gtest.h"
#include "vitalink/random.hpp"

namespace vitalink::record {
namespace {

struct Channel {
  SystemRandom rng;
  aead::AeadKey key = aead::AeadKey::from(rng.bytes(16));
  handshake::Salt salt = handshake::to_array<4>(rng.bytes(4));
  SendDirection tx{key, salt};
  RecvDirection rx{key, salt};
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

TEST(Record, SealOpenRoundTrip) {
  Channel c;
  for (int i = 0; i < 50; ++i) {
    Bytes payload = c.rng.bytes(static_cast<std::size_t>(i * 7));
    Frame f = c.tx.seal(FrameType::Data, payload);
    EXPECT_EQ(f.body.size(), payload.size() + 16);
    auto r = c.rx.open(f);
    EXPECT_EQ(r.type, FrameType::Data);
    EXPECT_EQ(r.payload, payload);
  }
  EXPECT_EQ(c.tx.next_seq(), 50u);
  EXPECT_EQ(c.rx.expected_seq(), 50u);
}

TEST(Record, IdenticalPayloadsSealDifferently) {
  Channel c;
  Bytes payload(19, 0x42);
  EXPECT_NE(c.tx.seal(FrameType::Data, payload).body, c.tx.seal(FrameType::Data, payload).body);
}

TEST(Record, WireAadAndNonceLayout) {
  Channel c;
  Bytes payload = to_bytes("abc");
  Frame f = c.tx.seal(FrameType::Data, payload);
  // Recompute with the raw AEAD: nonce = salt || seq, aad = header || seq.
  aead::Nonce nonce{};
  std::copy(c.salt.begin(), c.salt.end(), nonce.begin());
  Bytes aad{0xA5, 0x5A, 0x01, 0x10, 0, 0, 0, 0, 0, 0, 0, 0};
  EXPECT_EQ(aead::seal(c.key, nonce, aad, payload).wire(), f.body);
}

TEST(Record, ReplayIsRejected) {
  Channel c;
  Frame f0 = c.tx.seal(FrameType::Data, to_bytes("r0"));
  c.rx.open(f0);
  EXPECT_EQ(error_of([&] { c.rx.open(f0); }), Errc::AuthFailure);
  EXPECT_TRUE(c.rx.dead());
}

TEST(Record, ReorderIsRejected) {
  Channel c;
  Frame f0 = c.tx.seal(FrameType::Data, to_bytes("r0"));
  Frame f1 = c.tx.seal(FrameType::Data, to_bytes("r1"));
  EXPECT_EQ(error_of([&] { c.rx.open(f1); }), Errc::AuthFailure);
  // Fatal: even the in-order frame is now refused.
  EXPECT_EQ(error_of([&] { c.rx.open(f0); }), Errc::AuthFailure);
}

TEST(Record, DropIsRejected) {
  Channel c;
  c.tx.seal(FrameType::Data, to_bytes("r0"));
  Frame f1 = c.tx.seal(FrameType::Data, to_bytes("r1"));
  EXPECT_EQ(error_of([&] { c.rx.open(f1); }), Errc::AuthFailure);
}

TEST(Record, TypeIsAuthenticated) {
  Channel c;
  Frame f = c.tx.seal(FrameType::Data, {});
  f.type = FrameType::Close;
  EXPECT_EQ(error_of([&] { c.rx.open(f); }), Errc::AuthFailure);
}

TEST(Record, CloseEndsTheDirection) {
  Channel c;
  c.rx.open(c.tx.seal(FrameType::Data, to_bytes("x")));
  auto r = c.rx.open(c.tx.seal(FrameType::Close, {}));
  EXPECT_EQ(r.type, FrameType::Close);
  EXPECT_TRUE(c.rx.closed());
  EXPECT_THROW(c.tx.seal(FrameType::Data, to_bytes("late")), Error);
  // A sender that ignores its own Close still gets refused.
  SendDirection rogue(c.key, c.salt, 2);
  EXPECT_EQ(error_of([&] { c.rx.open(rogue.seal(FrameType::Data, to_bytes("late"))); }),
            Errc::MalformedFrame);
}

TEST(Record, AbortAndHandshakeFramesAreFatal) {
  Channel c;
  EXPECT_EQ(error_of([&] { c.rx.open(abort_frame()); }), Errc::PeerAbort);
  Channel d;
  EXPECT_EQ(error_of([&] { d.rx.open(Frame{FrameType::ClientHello, Bytes(20, 0)}); }),
            Errc::MalformedFrame);
}

TEST(Record, SequenceExhaustion) {
  Channel c;
  SendDirection tx(c.key, c.salt, std::numeric_limits<std::uint64_t>::max() - 1);
  RecvDirection rx(c.key, c.salt, std::numeric_limits<std::uint64_t>::max() - 1);
  rx.open(tx.seal(FrameType::Data, to_bytes("last")));
  EXPECT_EQ(error_of([&] { tx.seal(FrameType::Data, to_bytes("one more")); }),
            Errc::SequenceExhausted);
}

TEST(Record, SingleBitFlipsAnywhereInBodyAreFatal) {
  std::mt19937 pick(4);
  for (int i = 0; i < 100; ++i) {
    Channel c;
    Frame f = c.tx.seal(FrameType::Data, c.rng.bytes(19));
    std::size_t bit = pick() % (f.body.size() * 8);
    f.body[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    EXPECT_EQ(error_of([&] { c.rx.open(f); }), Errc::AuthFailure);
  }
}

TEST(Record, CiphertextSharesNoEightByteWindowWithPlaintext) {
  Channel c;
  for (int i = 0; i < 100; ++i) {
    Bytes pt = to_bytes("device=watch-07 bpm=072 status=ok ts=17000000" + std::to_string(i));
    Frame f = c.tx.seal(FrameType::Data, pt);
    std::set<Bytes> windows;
    for (std::size_t j = 0; j + 8 <= pt.size(); ++j) windows.insert(Bytes(pt.begin() + j, pt.begin() + j + 8));
    for (std::size_t j = 0; j + 8 <= f.body.size(); ++j)
      EXPECT_FALSE(windows.count(Bytes(f.body.begin() + j, f.body.begin() + j + 8)));
  }
}

TEST(Frame, WriteReadRoundTrip) {
  SystemRandom rng;
  BufferStream out;
  std::vector<Frame> frames = {{FrameType::ClientHello, rng.bytes(99)},
                               {FrameType::Data, {}},
                               {FrameType::Abort, {}},
                               {FrameType::Data, rng.bytes(kMaxBody)}};
  for (const auto& f : frames) frame_write(out, f);
  BufferStream in(out.output());
  for (const auto& f : frames) EXPECT_EQ(frame_read(in), f);
  EXPECT_FALSE(frame_read(in).has_value());
}

TEST(Frame, HeaderLayout) {
  Bytes enc = frame_encode(Frame{FrameType::Close, Bytes(3, 7)});
  EXPECT_EQ(enc, (Bytes{0xA5, 0x5A, 0x01, 0x11, 0, 0, 0, 3, 7, 7, 7}));
}

TEST(Frame, HeaderRejections) {
  auto read = [](Bytes b) {
    BufferStream s(std::move(b));
    return error_of([&] { frame_read(s); });
  };
  EXPECT_EQ(read({0x00, 0x00, 0x01, 0x10, 0, 0, 0, 0}), Errc::BadMagic);
  EXPECT_EQ(read({0xA5, 0x5A, 0x02, 0x10, 0, 0, 0, 0}), Errc::BadVersion);
  EXPECT_EQ(read({0xA5, 0x5A, 0x01, 0x42, 0, 0, 0, 0}), Errc::MalformedFrame);
  // 2^31 declared: rejected from the header alone, nothing allocated.
  EXPECT_EQ(read({0xA5, 0x5A, 0x01, 0x10, 0x80, 0, 0, 0}), Errc::OversizeFrame);
  EXPECT_EQ(read({0xA5, 0x5A, 0x01, 0x10, 0, 0, 0x01, 0x00, 1, 2}), Errc::ConnectionClosed);
  EXPECT_EQ(read({0xA5, 0x5A, 0x01}), Errc::ConnectionClosed);
}

TEST(Frame, OversizeRejectedBeforeBodyIsConsumed) {
  Bytes b{0xA5, 0x5A, 0x01, 0x10};
  put_be32(b, kMaxBody + 1);
  b.resize(b.size() + 100, 0);
  BufferStream s(b);
  EXPECT_EQ(error_of([&] { frame_read(s); }), Errc::OversizeFrame);
  EXPECT_EQ(s.consumed(), kHeaderSize);
}

}  // namespace
}  // namespace vitalink::record
