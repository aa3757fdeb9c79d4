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

#ifndef VITALINK_ENDPOINTS_HPP
#define VITALINK_ENDPOINTS_HPP

// The device client and the ingestion server.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "vitalink/files.hpp"
#include "vitalink/handshake.hpp"
#include "vitalink/log.hpp"
#include "vitalink/net.hpp"
#include "vitalink/record.hpp"
#include "vitalink/store.hpp"
#include "vitalink/telemetry.hpp"

namespace vitalink::endpoints {

using record::Frame;
using record::FrameType;

inline std::uint64_t now_ms() {
  return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                        std::chrono::system_clock::now().time_since_epoch())
                                        .count());
}

namespace detail {

inline Frame expect_frame(ByteStream& s, FrameType type, Millis timeout) {
  auto f = record::frame_read(s, timeout);
  if (!f) throw Error(Errc::ConnectionClosed, "peer closed during handshake");
  if (f->type == FrameType::Abort) throw Error(Errc::PeerAbort, "during handshake");
  if (f->type != type)
    throw Error(Errc::MalformedHandshake, "expected " + std::string(record::to_string(type)) +
                                              ", got " + std::string(record::to_string(f->type)));
  return std::move(*f);
}

// Abort is best effort: the peer may already be gone.
inline void send_abort(ByteStream& s) {
  try {
    record::frame_write(s, record::abort_frame());
  } catch (const Error&) {
  }
}

inline bool peer_gone(Errc c) { return c == Errc::PeerAbort || c == Errc::ConnectionClosed; }

}  // namespace detail

// Runs the client side of the handshake over s. On failure an Abort is sent
// (unless the peer aborted first) and the error propagates.
inline handshake::SessionKeys client_handshake(ByteStream& s, handshake::Config cfg,
                                               const curve::CurveSuite& suite,
                                               Millis timeout = record::kReadTimeout) {
  handshake::ClientHandshake hs(std::move(cfg), suite);
  try {
    record::frame_write(s, Frame{FrameType::ClientHello, hs.start()});
    Frame sh = detail::expect_frame(s, FrameType::ServerHello, timeout);
    auto res = hs.finish(sh.body);
    record::frame_write(s, Frame{FrameType::ClientFinish, res.message});
    return std::move(res.keys);
  } catch (const Error& e) {
    if (!detail::peer_gone(e.code())) detail::send_abort(s);
    throw;
  }
}

inline handshake::ServerCompletion server_handshake(ByteStream& s, handshake::Config cfg,
                                                    Millis timeout = record::kReadTimeout) {
  handshake::ServerHandshake hs(std::move(cfg));
  try {
    Frame ch = detail::expect_frame(s, FrameType::ClientHello, timeout);
    record::frame_write(s, Frame{FrameType::ServerHello, hs.respond(ch.body)});
    Frame cf = detail::expect_frame(s, FrameType::ClientFinish, timeout);
    return hs.complete(cf.body);
  } catch (const Error& e) {
    if (!detail::peer_gone(e.code())) detail::send_abort(s);
    throw;
  }
}

// ---------------------------------------------------------------- device

struct DeviceConfig {
  net::Address server;
  handshake::Identity identity;
  credential::Credential trust_root;
  std::uint16_t suite_id = curve::kSuiteP256;
  std::uint32_t interval_ms = 1000;
  std::uint64_t count = 1;
  telemetry::SensorParams sensor;
  // Defaults to the fingerprint of the device's static public key.
  std::optional<telemetry::DeviceId> device_id;
  // When false, readings are stamped start_ms + i * interval_ms and sent
  // back to back instead of being paced by the wall clock.
  bool realtime = true;
  std::uint64_t start_ms = 0;  // 0 means the current time
  Millis timeout = record::kReadTimeout;
  RandomSource* rng = nullptr;  // handshake entropy; system random if null
  handshake::Clock clock = handshake::system_clock_seconds;
};

inline void validate(const DeviceConfig& cfg) {
  if (cfg.interval_ms < 100) throw Error(Errc::Config, "interval must be at least 100 ms");
  if (cfg.count < 1) throw Error(Errc::Config, "count must be at least 1");
  if (!curve::find_suite(cfg.suite_id)) throw Error(Errc::UnsupportedSuite);
  if (cfg.identity.cred.suite_id != cfg.suite_id)
    throw Error(Errc::Config, "device credential is not on the requested suite");
}

struct DeviceReport {
  bool ok = false;
  std::optional<Errc> error;
  std::string detail;
  std::uint64_t sent_count = 0;
  std::string session_id_hex;
  std::uint64_t duration_ms = 0;
  std::vector<telemetry::HeartRateReading> sent;

  // One key=value line.
  std::string line() const {
    std::string s = std::string("status=") + (ok ? "ok" : "error");
    if (error) s += " error=" + std::string(to_string(*error));
    s += " sent_count=" + std::to_string(sent_count);
    s += " session_id=" + (session_id_hex.empty() ? std::string("-") : session_id_hex);
    s += " duration_ms=" + std::to_string(duration_ms);
    if (!detail.empty()) {
      std::string d;
      for (char c : detail) d += (c == ' ' ? '_' : c);
      s += " cause=" + d;
    }
    return s;
  }
};

namespace detail {

// Handles one frame from the server while data is still flowing. The server
// only ever sends Abort or, at the very end, a sealed Close.
inline void handle_server_frame(ByteStream& s, record::RecvDirection& recv, Millis timeout) {
  auto f = record::frame_read(s, timeout);
  if (!f) throw Error(Errc::ConnectionClosed, "server closed the connection");
  auto rec = recv.open(*f);
  if (rec.type == FrameType::Close) throw Error(Errc::ConnectionClosed, "server closed the session early");
  throw Error(Errc::MalformedFrame, "unexpected data from server");
}

}  // namespace detail

// Runs a device session over an already connected stream.
inline DeviceReport run_device_on(ByteStream& s, const DeviceConfig& cfg) {
  validate(cfg);
  DeviceReport rep;
  auto t0 = std::chrono::steady_clock::now();
  SystemRandom sys_rng;
  const auto& suite = curve::suite_by_id(cfg.suite_id);
  handshake::Config hc{cfg.identity, cfg.trust_root, cfg.rng ? cfg.rng : &sys_rng, cfg.clock};
  bool established = false;
  try {
    auto keys = client_handshake(s, std::move(hc), suite, cfg.timeout);
    established = true;
    rep.session_id_hex = to_hex(keys.session_id);
    record::SendDirection send(keys.c2s_key, keys.c2s_salt);
    record::RecvDirection recv(keys.s2c_key, keys.s2c_salt);
    keys.wipe();

    telemetry::DeviceId dev = cfg.device_id.value_or(
        files::fingerprint(cfg.identity.cred.fields.static_pub, suite));
    telemetry::SensorSim sim(dev, cfg.sensor);
    std::uint64_t start = cfg.start_ms ? cfg.start_ms : now_ms();
    auto steady_start = std::chrono::steady_clock::now();
    std::uint64_t last_ts = 0;

    for (std::uint64_t i = 0; i < cfg.count; ++i) {
      std::uint64_t ts;
      if (cfg.realtime) {
        auto deadline = steady_start + Millis(i * cfg.interval_ms);
        for (;;) {
          auto left = std::chrono::duration_cast<Millis>(deadline - std::chrono::steady_clock::now());
          if (left.count() <= 0) break;
          if (s.readable(left)) detail::handle_server_frame(s, recv, cfg.timeout);
        }
        ts = std::max(last_ts, now_ms());
      } else {
        if (s.readable(Millis{0})) detail::handle_server_frame(s, recv, cfg.timeout);
        ts = start + i * cfg.interval_ms;
      }
      last_ts = ts;
      auto reading = sim.next(ts);
      record::frame_write(s, send.seal(FrameType::Data, telemetry::reading_encode(reading)));
      rep.sent.push_back(reading);
      ++rep.sent_count;
    }

    record::frame_write(s, send.seal(FrameType::Close, {}));
    auto f = record::frame_read(s, cfg.timeout);
    if (!f) throw Error(Errc::ConnectionClosed, "no Close from server");
    if (recv.open(*f).type != FrameType::Close)
      throw Error(Errc::MalformedFrame, "unexpected data from server");
    rep.ok = true;
  } catch (const Error& e) {
    rep.error = e.code();
    rep.detail = e.what();
    if (established && !detail::peer_gone(e.code())) detail::send_abort(s);
  }
  s.close();
  rep.duration_ms = static_cast<std::uint64_t>(
      std::chrono::duration_cast<Millis>(std::chrono::steady_clock::now() - t0).count());
  log::write(rep.ok ? log::Level::Info : log::Level::Error, "device_done",
             {{"sent", std::to_string(rep.sent_count)},
              {"error", rep.error ? std::string(to_string(*rep.error)) : "none"},
              {"detail", rep.detail}});
  return rep;
}

// Connects and runs a device session. Configuration problems throw; runtime
// failures, including an unreachable server, are reported.
inline DeviceReport run_device(const DeviceConfig& cfg) {
  validate(cfg);
  std::unique_ptr<net::TcpStream> s;
  try {
    s = net::connect(cfg.server, cfg.timeout);
  } catch (const Error& e) {
    DeviceReport rep;
    rep.error = e.code();
    rep.detail = e.code() == Errc::ConnectionRefused ? "connection refused" : e.what();
    return rep;
  }
  return run_device_on(*s, cfg);
}

// ---------------------------------------------------------------- server

struct ServerConfig {
  net::Address listen{"127.0.0.1", 0};
  handshake::Identity identity;
  credential::Credential trust_root;
  std::filesystem::path store_dir;
  telemetry::AnomalyConfig anomaly;
  bool fsync = false;
  Millis timeout = record::kReadTimeout;
  handshake::Clock clock = handshake::system_clock_seconds;
  // Receives the human-readable alert line; defaults to stderr.
  std::function<void(const std::string&)> alert_echo;
};

struct SessionSummary {
  std::uint64_t index = 0;
  bool established = false;
  std::string peer;
  std::string session_id_hex;
  std::uint64_t records = 0;
  std::uint64_t alerts = 0;
  bool closed_cleanly = false;
  // Ended without an authenticated Close.
  bool suspicious = false;
  std::optional<Errc> error;
  std::string detail;
};

class Server {
 public:
  // Binds immediately; a bind failure throws.
  explicit Server(ServerConfig cfg)
      : cfg_(std::move(cfg)), store_(cfg_.store_dir, cfg_.fsync), listener_(cfg_.listen) {
    if (!cfg_.alert_echo)
      cfg_.alert_echo = [](const std::string& line) {
        std::fwrite(line.data(), 1, line.size(), stderr);
        std::fflush(stderr);
      };
  }

  ~Server() { stop(); }
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  const net::Address& address() const { return listener_.local(); }
  store::Store& store() { return store_; }

  // Accepts connections until stop() is called.
  void run() {
    log::info("listening", {{"addr", address().str()}});
    while (!stopping_) {
      std::unique_ptr<net::TcpStream> s;
      try {
        s = listener_.accept(Millis{100});
      } catch (const Error& e) {
        log::error("accept_failed", {{"detail", e.what()}});
        continue;
      }
      reap();
      if (!s) continue;
      std::lock_guard lk(mu_);
      if (stopping_) break;
      auto& c = conns_.emplace_back();
      c.stream = std::shared_ptr<net::TcpStream>(std::move(s));
      std::uint64_t index = next_index_++;
      c.thread = std::thread([this, &c, index] {
        serve_connection(*c.stream, index);
        c.done = true;
      });
    }
    shutdown_connections();
    store_.flush();
    log::info("stopped", {{"sessions", std::to_string(next_index_)}});
  }

  void start() {
    runner_ = std::thread([this] { run(); });
  }

  // Idempotent; safe to call from any thread.
  void stop() {
    stopping_ = true;
    if (runner_.joinable() && runner_.get_id() != std::this_thread::get_id()) runner_.join();
  }

  std::vector<SessionSummary> sessions() const {
    std::lock_guard lk(summary_mu_);
    return summaries_;
  }

  // Waits until n sessions have finished.
  bool wait_for_sessions(std::size_t n, Millis timeout) {
    std::unique_lock lk(summary_mu_);
    return summary_cv_.wait_for(lk, timeout, [&] { return summaries_.size() >= n; });
  }

 private:
  struct Conn {
    std::shared_ptr<net::TcpStream> stream;
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

  void shutdown_connections() {
    std::lock_guard lk(mu_);
    for (auto& c : conns_) c.stream->shutdown();
    for (auto& c : conns_) c.thread.join();
    conns_.clear();
  }

  void serve_connection(net::TcpStream& s, std::uint64_t index) {
    SessionSummary sum;
    sum.index = index;
    SystemRandom rng;
    try {
      auto done = server_handshake(
          s, handshake::Config{cfg_.identity, cfg_.trust_root, &rng, cfg_.clock}, cfg_.timeout);
      sum.established = true;
      sum.peer = done.peer_id;
      sum.session_id_hex = to_hex(done.keys.session_id);
      log::info("session_established", {{"session", sum.session_id_hex}, {"subject", sum.peer}});
      record::RecvDirection recv(done.keys.c2s_key, done.keys.c2s_salt);
      record::SendDirection send(done.keys.s2c_key, done.keys.s2c_salt);
      done.keys.wipe();
      telemetry::AnomalyDetector detector(cfg_.anomaly);
      std::uint64_t last_ts = 0;

      for (;;) {
        std::optional<Frame> f;
        try {
          f = record::frame_read(s, cfg_.timeout);
        } catch (const Error& e) {
          if (e.code() == Errc::ConnectionClosed) sum.suspicious = true;
          throw;
        }
        if (!f) {
          sum.suspicious = true;
          throw Error(Errc::ConnectionClosed, "stream ended without Close");
        }
        auto rec = recv.open(*f);
        if (rec.type == FrameType::Close) {
          record::frame_write(s, send.seal(FrameType::Close, {}));
          sum.closed_cleanly = true;
          break;
        }
        auto r = telemetry::reading_decode(rec.payload);
        if (r.timestamp_ms < last_ts) throw Error(Errc::MalformedReading, "timestamp went backwards");
        last_ts = r.timestamp_ms;
        store_.persist_reading(store::StoreRecord{sum.session_id_hex, sum.peer, r.device_id,
                                                  r.timestamp_ms, r.bpm, r.status, now_ms()});
        ++sum.records;
        if (auto a = detector.check(r)) {
          ++sum.alerts;
          try {
            store_.raise_alert(*a);
          } catch (const Error& e) {
            log::error("alert_write_failed", {{"detail", e.what()}});
          }
          cfg_.alert_echo(store::describe_alert(*a));
        }
      }
      log::info("session_closed",
                {{"session", sum.session_id_hex}, {"records", std::to_string(sum.records)}});
    } catch (const Error& e) {
      sum.error = e.code();
      sum.detail = e.what();
      if (stopping_) {
        sum.suspicious = false;
        log::info("session_interrupted", {{"session", sum.session_id_hex}});
      } else {
        if (sum.established && !detail::peer_gone(e.code())) detail::send_abort(s);
        if (sum.suspicious)
          log::warn("suspicious_termination",
                    {{"session", sum.session_id_hex}, {"records", std::to_string(sum.records)},
                     {"detail", e.what()}});
        else
          log::error("session_aborted", {{"session", sum.session_id_hex},
                                         {"records", std::to_string(sum.records)},
                                         {"error", std::string(to_string(e.code()))},
                                         {"detail", e.what()}});
      }
    }
    s.shutdown();
    std::lock_guard lk(summary_mu_);
    summaries_.push_back(std::move(sum));
    summary_cv_.notify_all();
  }

  ServerConfig cfg_;
  store::Store store_;
  net::Listener listener_;
  std::atomic<bool> stopping_{false};
  std::thread runner_;
  std::mutex mu_;
  std::list<Conn> conns_;
  std::uint64_t next_index_ = 0;
  mutable std::mutex summary_mu_;
  std::condition_variable summary_cv_;
  std::vector<SessionSummary> summaries_;
};

}  // namespace vitalink::endpoints

#endif  // VITALINK_ENDPOINTS_HPP
