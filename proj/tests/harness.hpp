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

#ifndef VITALINK_TESTS_HARNESS_HPP
#define VITALINK_TESTS_HARNESS_HPP

// In-process server, device and proxy wired together over loopback.

#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "temp_dir.hpp"
#include "test_pki.hpp"
#include "vitalink/endpoints.hpp"
#include "vitalink/proxy.hpp"

namespace vitalink::testing {

struct RunResult {
  endpoints::DeviceReport device;
  endpoints::SessionSummary server;
  std::vector<store::StoreRecord> persisted;
  std::string proxy_report;
};

class Harness {
 public:
  explicit Harness(std::uint64_t seed = 7, const curve::CurveSuite& suite = curve::p256())
      : rng_(seed), suite_(suite) {
    root = make_root(rng_, suite);
    server_id = make_identity(rng_, root, "ingest", credential::Role::Server, suite);
    device_id = make_identity(rng_, root, "watch-01", credential::Role::Device, suite);
  }

  // A fresh server with its own store directory.
  std::unique_ptr<endpoints::Server> start_server(const credential::Credential& trust_root,
                                                  const handshake::Identity& id,
                                                  const std::filesystem::path& store_dir) {
    endpoints::ServerConfig cfg;
    cfg.identity = id;
    cfg.trust_root = trust_root;
    cfg.store_dir = store_dir;
    cfg.timeout = Millis{3000};
    cfg.alert_echo = [](const std::string&) {};
    auto s = std::make_unique<endpoints::Server>(cfg);
    s->start();
    return s;
  }

  endpoints::DeviceConfig device_config(const net::Address& addr, std::uint64_t count,
                                        std::uint64_t sensor_seed = 1) {
    endpoints::DeviceConfig d;
    d.server = addr;
    d.identity = device_id;
    d.trust_root = root.cred;
    d.suite_id = suite_.id;
    d.interval_ms = 100;
    d.count = count;
    d.realtime = false;
    d.start_ms = 1'700'000'000'000ULL;
    d.timeout = Millis{3000};
    d.sensor.seed = sensor_seed;
    return d;
  }

  // One device session, optionally through a proxy with the given plan.
  RunResult run(std::uint64_t count, std::optional<proxy::TamperPlan> plan = std::nullopt,
                std::uint64_t sensor_seed = 1) {
    TempDir dir;
    auto srv = start_server(root.cred, server_id, dir.path());
    std::ostringstream report;
    std::unique_ptr<proxy::Proxy> px;
    net::Address target = srv->address();
    if (plan) {
      proxy::ProxyConfig pc;
      pc.upstream = srv->address();
      pc.plan = *plan;
      pc.report = &report;
      px = std::make_unique<proxy::Proxy>(pc);
      px->start();
      target = px->address();
    }
    RunResult r;
    r.device = endpoints::run_device(device_config(target, count, sensor_seed));
    srv->wait_for_sessions(1, Millis{10000});
    if (px) {
      px->wait_for_connections(1, Millis{10000});
      px->stop();
      r.proxy_report = report.str();
    }
    srv->stop();
    auto sessions = srv->sessions();
    if (!sessions.empty()) r.server = sessions.front();
    r.persisted = store::read_readings(srv->store().readings_path());
    return r;
  }

  SeededRandom rng_;
  const curve::CurveSuite& suite_;
  Root root;
  handshake::Identity server_id;
  handshake::Identity device_id;
};

}  // namespace vitalink::testing

#endif  // VITALINK_TESTS_HARNESS_HPP
