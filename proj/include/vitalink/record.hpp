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

#ifndef VITALINK_RECORD_HPP
#define VITALINK_RECORD_HPP

// Framing and the post-handshake record layer.
//
// Frame (bit-exact): magic A5 5A || version 01 || frame_type(1) ||
//                    length(BE32) || body
//
// Data and Close bodies are ciphertext || tag(16). Sequence numbers are not
// sent; each direction counts records from 0 and binds the count through the
// AAD (magic || version || frame_type || seq(BE64)) and the nonce
// (salt(4) || seq(BE64)). A replayed, reordered or dropped record therefore
// fails authentication like any other tampering, and every failure is fatal.

#include <cstdint>
#include <limits>
#include <optional>

#include "vitalink/aead.hpp"
#include "vitalink/bytes.hpp"
#include "vitalink/error.hpp"
#include "vitalink/handshake.hpp"
#include "vitalink/stream.hpp"

namespace vitalink::record {

inline constexpr std::uint8_t kMagic0 = 0xA5;
inline constexpr std::uint8_t kMagic1 = 0x5A;
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kHeaderSize = 8;
inline constexpr std::uint32_t kMaxBody = 65600;
inline constexpr Millis kReadTimeout{10'000};

enum class FrameType : std::uint8_t {
  ClientHello = 0x01,
  ServerHello = 0x02,
  ClientFinish = 0x03,
  Data = 0x10,
  Close = 0x11,
  Abort = 0x1F,
};

inline std::string_view to_string(FrameType t) {
  switch (t) {
    case FrameType::ClientHello: return "ClientHello";
    case FrameType::ServerHello: return "ServerHello";
    case FrameType::ClientFinish: return "ClientFinish";
    case FrameType::Data: return "Data";
    case FrameType::Close: return "Close";
    case FrameType::Abort: return "Abort";
  }
  return "?";
}

inline bool known_type(std::uint8_t t) {
  switch (t) {
    case 0x01: case 0x02: case 0x03: case 0x10: case 0x11: case 0x1F: return true;
    default: return false;
  }
}

struct Frame {
  FrameType type = FrameType::Data;
  Bytes body;

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct FrameHeader {
  FrameType type;
  std::uint32_t length;
};

// Validates magic, version, type and declared length before any body is read.
inline FrameHeader parse_header(ByteView h) {
  if (h.size() != kHeaderSize) throw Error(Errc::MalformedFrame, "short header");
  if (h[0] != kMagic0 || h[1] != kMagic1) throw Error(Errc::BadMagic);
  if (h[2] != kVersion) throw Error(Errc::BadVersion);
  if (!known_type(h[3])) throw Error(Errc::MalformedFrame, "unknown frame type");
  std::uint32_t len = get_be32(h.data() + 4);
  if (len > kMaxBody) throw Error(Errc::OversizeFrame, std::to_string(len) + " bytes");
  return FrameHeader{static_cast<FrameType>(h[3]), len};
}

inline Bytes header_bytes(FrameType type, std::uint32_t length) {
  Bytes h{kMagic0, kMagic1, kVersion, static_cast<std::uint8_t>(type)};
  put_be32(h, length);
  return h;
}

inline Bytes frame_encode(const Frame& f) {
  if (f.body.size() > kMaxBody) throw Error(Errc::OversizeFrame);
  Bytes out = header_bytes(f.type, static_cast<std::uint32_t>(f.body.size()));
  append(out, f.body);
  return out;
}

// Returns nullopt on a clean end of stream at a frame boundary.
inline std::optional<Frame> frame_read(ByteStream& s, Millis timeout = kReadTimeout) {
  std::array<std::uint8_t, kHeaderSize> h{};
  if (!read_exact(s, h, timeout)) return std::nullopt;
  FrameHeader hdr = parse_header(h);
  Frame f{hdr.type, Bytes(hdr.length)};
  if (hdr.length && !read_exact(s, f.body, timeout))
    throw Error(Errc::ConnectionClosed, "truncated");
  return f;
}

inline void frame_write(ByteStream& s, const Frame& f) { s.write_all(frame_encode(f)); }

namespace detail {

inline Bytes record_aad(FrameType type, std::uint64_t seq) {
  Bytes aad{kMagic0, kMagic1, kVersion, static_cast<std::uint8_t>(type)};
  put_be64(aad, seq);
  return aad;
}

inline aead::Nonce record_nonce(const handshake::Salt& salt, std::uint64_t seq) {
  aead::Nonce n{};
  std::copy(salt.begin(), salt.end(), n.begin());
  for (int i = 0; i < 8; ++i) n[4 + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(seq >> (56 - 8 * i));
  return n;
}

}  // namespace detail

// Sending half of one direction.
class SendDirection {
 public:
  SendDirection(const aead::AeadKey& key, const handshake::Salt& salt, std::uint64_t first_seq = 0)
      : key_(key), salt_(salt), seq_(first_seq) {}
  ~SendDirection() { wipe(); }
  SendDirection(const SendDirection&) = delete;
  SendDirection& operator=(const SendDirection&) = delete;

  Frame seal(FrameType type, ByteView payload) {
    if (type != FrameType::Data && type != FrameType::Close)
      throw std::invalid_argument("only Data and Close records are sealed");
    if (closed_) throw Error(Errc::ConnectionClosed, "send direction already closed");
    if (seq_ == std::numeric_limits<std::uint64_t>::max()) {
      wipe();
      throw Error(Errc::SequenceExhausted);
    }
    auto rec = aead::seal(key_, detail::record_nonce(salt_, seq_), detail::record_aad(type, seq_),
                          payload);
    ++seq_;
    if (type == FrameType::Close) closed_ = true;
    return Frame{type, rec.wire()};
  }

  std::uint64_t next_seq() const { return seq_; }

  void wipe() {
    key_.wipe();
    secure_zero(salt_);
  }

 private:
  aead::AeadKey key_;
  handshake::Salt salt_;
  std::uint64_t seq_;
  bool closed_ = false;
};

struct Record {
  FrameType type;
  Bytes payload;
};

// Receiving half of one direction. The first failure wipes the key and
// every later call fails.
class RecvDirection {
 public:
  RecvDirection(const aead::AeadKey& key, const handshake::Salt& salt, std::uint64_t first_seq = 0)
      : key_(key), salt_(salt), seq_(first_seq) {}
  ~RecvDirection() { wipe(); }
  RecvDirection(const RecvDirection&) = delete;
  RecvDirection& operator=(const RecvDirection&) = delete;

  Record open(const Frame& f) {
    if (dead_) throw Error(Errc::AuthFailure, "direction is dead");
    try {
      if (closed_) throw Error(Errc::MalformedFrame, "record after Close");
      if (f.type == FrameType::Abort) throw Error(Errc::PeerAbort);
      if (f.type != FrameType::Data && f.type != FrameType::Close)
        throw Error(Errc::MalformedFrame, "handshake frame after establishment");
      if (seq_ == std::numeric_limits<std::uint64_t>::max()) throw Error(Errc::SequenceExhausted);
      auto rec = aead::SealedRecord::from_wire(f.body);
      Bytes pt = aead::open(key_, detail::record_nonce(salt_, seq_),
                            detail::record_aad(f.type, seq_), rec);
      ++seq_;
      if (f.type == FrameType::Close) {
        if (!pt.empty()) throw Error(Errc::MalformedFrame, "Close with payload");
        closed_ = true;
      }
      return Record{f.type, std::move(pt)};
    } catch (const Error&) {
      dead_ = true;
      wipe();
      throw;
    }
  }

  std::uint64_t expected_seq() const { return seq_; }
  bool closed() const { return closed_; }
  bool dead() const { return dead_; }

  void wipe() {
    key_.wipe();
    secure_zero(salt_);
  }

 private:
  aead::AeadKey key_;
  handshake::Salt salt_;
  std::uint64_t seq_;
  bool closed_ = false;
  bool dead_ = false;
};

// Abort frames are sent in the clear with an empty body.
inline Frame abort_frame() { return Frame{FrameType::Abort, {}}; }

}  // namespace vitalink::record

#endif  // VITALINK_RECORD_HPP
