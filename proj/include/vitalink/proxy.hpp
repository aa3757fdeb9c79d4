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

#ifndef VITALINK_PROXY_HPP
#define VITALINK_PROXY_HPP

// In-path relay that forwards frames between a device and a server and
// injects one planned fault. It parses frame headers only and never holds
// session keys.
//
// Data-frame indices count sealed records (Data and Close) per direction,
// starting at 0. Flip offsets are MSB-first bit positions within the
// ciphertext or the 16-byte tag, taken modulo the region size; a
// ciphertext flip on an empty payload lands in the tag instead.

#include <atomic>
#include <condition_variable>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "vitalink/handshake.hpp"
#include "vitalink/log.hpp"
#include "vitalink/net.hpp"
#include "vitalink/record.hpp"

namespace vitalink::proxy {

using record::Frame;
using record::FrameType;

enum class TamperMode {
  Passthrough,
  FlipCiphertextBit,
  FlipTagBit,
  ReplayFrame,
  ReorderPair,
  DropFrame,
  TruncateStream,
  ForgeHandshake,
};

inline constexpr TamperMode kAllModes[] = {
    TamperMode::Passthrough, TamperMode::FlipCiphertextBit, TamperMode::FlipTagBit,
    TamperMode::ReplayFrame, TamperMode::ReorderPair,       TamperMode::DropFrame,
    TamperMode::TruncateStream, TamperMode::ForgeHandshake,
};

inline std::string_view to_string(TamperMode m) {
  switch (m) {
    case TamperMode::Passthrough: return "passthrough";
    case TamperMode::FlipCiphertextBit: return "flip_ciphertext_bit";
    case TamperMode::FlipTagBit: return "flip_tag_bit";
    case TamperMode::ReplayFrame: return "replay_frame";
    case TamperMode::ReorderPair: return "reorder_pair";
    case TamperMode::DropFrame: return "drop_frame";
    case TamperMode::TruncateStream: return "truncate_stream";
    case TamperMode::ForgeHandshake: return "forge_handshake";
  }
  return "?";
}

inline std::optional<TamperMode> mode_from_string(std::string_view s) {
  for (TamperMode m : kAllModes)
    if (s == to_string(m)) return m;
  return std::nullopt;
}

enum class Direction { C2S, S2C };

inline std::string_view to_string(Direction d) { return d == Direction::C2S ? "c2s" : "s2c"; }

inline std::optional<Direction> direction_from_string(std::string_view s) {
  if (s == "c2s") return Direction::C2S;
  if (s == "s2c") return Direction::S2C;
  return std::nullopt;
}

struct TamperPlan {
  TamperMode mode = TamperMode::Passthrough;
  std::uint64_t target_index = 0;
  Direction direction = Direction::C2S;
  std::uint64_t bit_offset = 0;
};

struct TamperOutput {
  // Raw bytes to forward, in order.
  std::vector<Bytes> chunks;
  // Close both sides after forwarding.
  bool close_after = false;
  std::string action = "pass";
};

// Reorder buffer for one direction.
struct ReorderSlot {
  std::optional<Frame> held;
};

inline bool is_sealed(FrameType t) { return t == FrameType::Data || t == FrameType::Close; }

inline Frame flip_bit(Frame f, TamperMode mode, std::uint64_t bit_offset) {
  std::size_t ct_len = f.body.size() >= aead::kTagSize ? f.body.size() - aead::kTagSize : 0;
  std::size_t pos;
  if (mode == TamperMode::FlipCiphertextBit && ct_len > 0) {
    pos = static_cast<std::size_t>(bit_offset % (ct_len * 8));
  } else {
    std::size_t tag_bits = (f.body.size() - ct_len) * 8;
    if (tag_bits == 0) return f;
    pos = ct_len * 8 + static_cast<std::size_t>(bit_offset % tag_bits);
  }
  f.body[pos / 8] ^= static_cast<std::uint8_t>(0x80u >> (pos % 8));
  return f;
}

// Applies the plan to one frame. index is the frame's data-frame index in
// its direction (ignored for handshake frames). forge_handshake is not
// handled here because it needs the ClientHello; see TamperSession.
inline TamperOutput apply_tamper(const TamperPlan& plan, const Frame& frame, std::uint64_t index,
                                 Direction dir, ReorderSlot& slot) {
  TamperOutput out;
  // A held frame goes out right after its successor.
  if (slot.held) {
    out.chunks.push_back(record::frame_encode(frame));
    out.chunks.push_back(record::frame_encode(*slot.held));
    slot.held.reset();
    out.action = "reorder_release";
    return out;
  }
  bool hit = is_sealed(frame.type) && dir == plan.direction && index == plan.target_index;
  if (!hit || plan.mode == TamperMode::Passthrough || plan.mode == TamperMode::ForgeHandshake) {
    out.chunks.push_back(record::frame_encode(frame));
    return out;
  }
  out.action = std::string(to_string(plan.mode));
  switch (plan.mode) {
    case TamperMode::FlipCiphertextBit:
    case TamperMode::FlipTagBit:
      out.chunks.push_back(record::frame_encode(flip_bit(frame, plan.mode, plan.bit_offset)));
      break;
    case TamperMode::ReplayFrame:
      out.chunks.push_back(record::frame_encode(frame));
      out.chunks.push_back(record::frame_encode(frame));
      break;
    case TamperMode::ReorderPair:
      slot.held = frame;
      out.action = "reorder_hold";
      break;
    case TamperMode::DropFrame:
      break;
    case TamperMode::TruncateStream: {
      Bytes wire = record::frame_encode(frame);
      wire.resize(record::kHeaderSize + frame.body.size() / 2);
      out.chunks.push_back(std::move(wire));
      out.close_after = true;
      break;
    }
    case TamperMode::Passthrough:
    case TamperMode::ForgeHandshake:
      break;
  }
  return out;
}

// Builds a ServerHello answering client_hello with a freshly generated
// rogue root and server identity.
inline Bytes forge_server_hello(ByteView client_hello, RandomSource& rng,
                                std::int64_t now = handshake::system_clock_seconds()) {
  if (client_hello.size() < 2) throw Error(Errc::MalformedHandshake, "short ClientHello");
  const auto& suite = curve::suite_by_id(get_be16(client_hello.data()));
  auto root_key = curve::keypair_gen(rng, suite);
  auto root_id = credential::make_id("rogue-ca");
  credential::CredentialFields rf{root_id, credential::Role::Issuer, root_key.pub,
                                  now - 3600, now + 86400, root_id};
  auto root = credential::credential_issue(root_key.priv, root_id, rf, rng, suite);
  auto srv_key = curve::keypair_gen(rng, suite);
  credential::CredentialFields sf{credential::make_id("rogue-server"), credential::Role::Server,
                                  srv_key.pub, now - 3600, now + 86400, root_id};
  handshake::Identity id{srv_key.priv,
                         credential::credential_issue(root_key.priv, root_id, sf, rng, suite)};
  handshake::ServerHandshake hs(handshake::Config{id, root, &rng});
  return hs.respond(client_hello);
}

// Tamper state for one proxied connection, shared by both relay directions.
class TamperSession {
 public:
  explicit TamperSession(TamperPlan plan) : plan_(plan) {}

  TamperOutput feed(const Frame& f, Direction dir) {
    std::lock_guard lk(mu_);
    std::uint64_t& counter = dir == Direction::C2S ? c2s_ : s2c_;
    std::uint64_t index = is_sealed(f.type) ? counter++ : 0;
    if (plan_.mode == TamperMode::ForgeHandshake) {
      if (f.type == FrameType::ClientHello) client_hello_ = f.body;
      if (f.type == FrameType::ServerHello && client_hello_) {
        TamperOutput out;
        Frame forged{FrameType::ServerHello, forge_server_hello(*client_hello_, rng_)};
        out.chunks.push_back(record::frame_encode(forged));
        out.action = "forge_handshake";
        applied_ = true;
        return out;
      }
    }
    auto out = apply_tamper(plan_, f, index, dir, dir == Direction::C2S ? slot_c2s_ : slot_s2c_);
    if (out.action != "pass" && out.action != "reorder_release") applied_ = true;
    return out;
  }

  bool applied() const {
    std::lock_guard lk(mu_);
    return applied_;
  }

 private:
  TamperPlan plan_;
  mutable std::mutex mu_;
  std::uint64_t c2s_ = 0;
  std::uint64_t s2c_ = 0;
  ReorderSlot slot_c2s_;
  ReorderSlot slot_s2c_;
  std::optional<Bytes> client_hello_;
  SystemRandom rng_;
  bool applied_ = false;
};

struct ProxyConfig {
  net::Address listen{"127.0.0.1", 0};
  net::Address upstream;
  TamperPlan plan;
  // Receives one report line per frame; null disables the report.
  std::ostream* report = nullptr;
  Millis idle_timeout{30'000};
};

class Proxy {
 public:
  explicit Proxy(ProxyConfig cfg) : cfg_(std::move(cfg)), listener_(cfg_.listen) {}
  ~Proxy() { stop(); }
  Proxy(const Proxy&) = delete;
  Proxy& operator=(const Proxy&) = delete;

  const net::Address& address() const { return listener_.local(); }

  void run() {
    log::info("proxy_listening", {{"addr", address().str()},
                                  {"upstream", cfg_.upstream.str()},
                                  {"mode", std::string(to_string(cfg_.plan.mode))}});
    while (!stopping_) {
      auto client = listener_.accept(Millis{100});
      reap();
      if (!client) continue;
      std::lock_guard lk(mu_);
      auto& c = conns_.emplace_back();
      c.client = std::shared_ptr<net::TcpStream>(std::move(client));
      std::uint64_t id = next_id_++;
      c.thread = std::thread([this, &c, id] {
        serve(c, id);
        c.done = true;
      });
    }
    std::list<Conn> conns;
    {
      std::lock_guard lk(mu_);
      for (auto& c : conns_) {
        c.client->shutdown();
        if (c.upstream) c.upstream->shutdown();
      }
      conns.splice(conns.end(), conns_);
    }
    for (auto& c : conns) c.thread.join();
  }

  void start() {
    runner_ = std::thread([this] { run(); });
  }

  void stop() {
    stopping_ = true;
    if (runner_.joinable() && runner_.get_id() != std::this_thread::get_id()) runner_.join();
  }

  std::size_t finished_connections() const {
    std::lock_guard lk(done_mu_);
    return finished_;
  }

  bool wait_for_connections(std::size_t n, Millis timeout) {
    std::unique_lock lk(done_mu_);
    return done_cv_.wait_for(lk, timeout, [&] { return finished_ >= n; });
  }

 private:
  struct Conn {
    std::shared_ptr<net::TcpStream> client;
    std::shared_ptr<net::TcpStream> upstream;
    std::thread thread;
    std::atomic<bool> done{false};
  };

  void reap() {
    std::lock_guard lk(mu_);
    for (auto it = conns_.begin(); it != conns_.end();) {
      if (it->done) {
        it->thread.join();
        it = conns_.erase(it);
      } else {
        ++it;
      }
    }
  }

  void report(const std::string& line) {
    if (!cfg_.report) return;
    std::lock_guard lk(report_mu_);
    *cfg_.report << line << '\n';
    cfg_.report->flush();
  }

  // Reads exactly out.size() bytes, polling so that stop() is noticed.
  bool read_full(net::TcpStream& s, std::span<std::uint8_t> out) {
    std::size_t got = 0;
    auto idle_since = std::chrono::steady_clock::now();
    while (got < out.size()) {
      if (stopping_) return false;
      std::size_t n;
      try {
        n = s.read_some(out.subspan(got), Millis{200});
      } catch (const Error& e) {
        if (e.code() != Errc::Timeout) return false;
        if (std::chrono::steady_clock::now() - idle_since > cfg_.idle_timeout) return false;
        continue;
      }
      if (n == 0) return false;
      got += n;
      idle_since = std::chrono::steady_clock::now();
    }
    return true;
  }

  void relay(net::TcpStream& src, net::TcpStream& dst, Direction dir, TamperSession& ts,
             std::uint64_t conn_id) {
    std::string prefix = "conn=" + std::to_string(conn_id) + " dir=" + std::string(to_string(dir));
    for (;;) {
      std::array<std::uint8_t, record::kHeaderSize> h;
      if (!read_full(src, h)) break;
      record::FrameHeader hdr;
      try {
        hdr = record::parse_header(h);
      } catch (const Error& e) {
        report(prefix + " event=bad_header error=" + std::string(to_string(e.code())));
        break;
      }
      Frame f{hdr.type, Bytes(hdr.length)};
      if (hdr.length && !read_full(src, f.body)) break;
      TamperOutput out = ts.feed(f, dir);
      report(prefix + " type=" + std::string(record::to_string(f.type)) +
             " len=" + std::to_string(f.body.size()) + " action=" + out.action);
      try {
        for (const auto& c : out.chunks) dst.write_all(c);
      } catch (const Error&) {
        break;
      }
      if (out.close_after) {
        src.shutdown();
        dst.shutdown();
        return;
      }
    }
    // Pass the end of stream along; the other relay direction keeps running.
    dst.shutdown_write();
  }

  void serve(Conn& c, std::uint64_t id) {
    std::shared_ptr<net::TcpStream> upstream;
    try {
      upstream = std::shared_ptr<net::TcpStream>(net::connect(cfg_.upstream, Millis{5000}));
      std::lock_guard lk(mu_);
      c.upstream = upstream;
    } catch (const Error& e) {
      log::error("upstream_unreachable", {{"upstream", cfg_.upstream.str()}, {"detail", e.what()}});
      report("conn=" + std::to_string(id) + " event=refused");
      c.client->shutdown();
      finish();
      return;
    }
    TamperSession ts(cfg_.plan);
    std::thread up([&] { relay(*c.client, *upstream, Direction::C2S, ts, id); });
    relay(*upstream, *c.client, Direction::S2C, ts, id);
    up.join();
    report("conn=" + std::to_string(id) + " event=closed fault=" +
           (cfg_.plan.mode == TamperMode::Passthrough ? "none"
                                                      : (ts.applied() ? "applied" : "not_reached")));
    c.client->shutdown();
    upstream->shutdown();
    finish();
  }

  void finish() {
    std::lock_guard lk(done_mu_);
    ++finished_;
    done_cv_.notify_all();
  }

  ProxyConfig cfg_;
  net::Listener listener_;
  std::atomic<bool> stopping_{false};
  std::thread runner_;
  std::mutex mu_;
  std::list<Conn> conns_;
  std::uint64_t next_id_ = 0;
  std::mutex report_mu_;
  mutable std::mutex done_mu_;
  std::condition_variable done_cv_;
  std::size_t finished_ = 0;
};

}  // namespace vitalink::proxy

#endif  // VITALINK_PROXY_HPP
