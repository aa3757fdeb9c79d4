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

// vitalink: key and credential tooling, ingestion server, device simulator
// and tamper proxy in one binary.
//
// Exit codes: 0 success, 1 runtime or protocol failure, 2 usage or
// configuration error.

#include <csignal>
#include <pthread.h>
#include <signal.h>

#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "vitalink/endpoints.hpp"
#include "vitalink/files.hpp"
#include "vitalink/log.hpp"
#include "vitalink/proxy.hpp"

namespace fs = std::filesystem;
using namespace vitalink;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Raised for configuration problems found before any network activity.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<std::uint16_t> parse_suite(const std::string& s) {
  if (s == "p256" || s == "P-256") return curve::kSuiteP256;
  if (s == "toy" || s == "TOY") return curve::kSuiteToy;
  try {
    std::size_t used = 0;
    unsigned long v = std::stoul(s, &used, 0);
    if (used == s.size() && v <= 0xFFFF && curve::find_suite(static_cast<std::uint16_t>(v)))
      return static_cast<std::uint16_t>(v);
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

const curve::CurveSuite& require_suite(const std::string& s) {
  auto id = parse_suite(s);
  if (!id) throw UsageError("unknown suite '" + s + "'");
  return curve::suite_by_id(*id);
}

// Loads a private key and its credential and checks that they belong together.
handshake::Identity load_identity(const fs::path& key_path, const fs::path& cred_path) {
  auto cred = files::load_credential(cred_path);
  auto priv = files::load_private_key(key_path, cred.suite());
  if (curve::scalar_mul(priv, cred.suite().g, cred.suite()) != cred.fields.static_pub)
    throw UsageError(key_path.string() + " does not match " + cred_path.string());
  return handshake::Identity{priv, cred};
}

credential::Credential load_root(const fs::path& path) {
  auto root = files::load_credential(path);
  if (!credential::is_trust_root(root))
    throw UsageError(path.string() + " is not a self-signed issuer credential");
  return root;
}

// Blocks SIGINT/SIGTERM in every thread and runs on_signal from a dedicated
// waiter thread when one arrives.
class SignalWaiter {
 public:
  explicit SignalWaiter(std::function<void()> on_signal) {
    sigemptyset(&set_);
    sigaddset(&set_, SIGINT);
    sigaddset(&set_, SIGTERM);
    // Background jobs of a non-interactive shell start with SIGINT ignored,
    // and an ignored signal never reaches sigwait.
    std::signal(SIGINT, SIG_DFL);
    std::signal(SIGTERM, SIG_DFL);
    pthread_sigmask(SIG_BLOCK, &set_, nullptr);
    thread_ = std::thread([this, f = std::move(on_signal)] {
      int sig = 0;
      sigwait(&set_, &sig);
      log::info("signal", {{"signal", sig == SIGINT ? "SIGINT" : "SIGTERM"}});
      f();
    });
  }
  ~SignalWaiter() { thread_.join(); }

 private:
  sigset_t set_;
  std::thread thread_;
};

// ---------------------------------------------------------------- keygen

struct KeygenOpts {
  std::string suite = "p256";
  std::string out;
  std::string name = "key";
  std::optional<std::uint64_t> seed;
};

int cmd_keygen(const KeygenOpts& o) {
  const auto& suite = require_suite(o.suite);
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec || !fs::is_directory(o.out)) throw UsageError("cannot create directory " + o.out);
  std::unique_ptr<RandomSource> rng;
  if (o.seed)
    rng = std::make_unique<SeededRandom>(*o.seed);
  else
    rng = std::make_unique<SystemRandom>();
  auto kp = curve::keypair_gen(*rng, suite);
  fs::path priv = fs::path(o.out) / (o.name + ".vlk");
  fs::path pub = fs::path(o.out) / (o.name + ".vlp");
  Bytes secret = kp.priv.to_bytes(suite);
  try {
    files::write_file(priv, secret, true);
    files::write_file(pub, curve::point_encode(kp.pub, suite));
  } catch (const Error& e) {
    secure_zero(secret);
    throw UsageError(e.what());
  }
  secure_zero(secret);
  std::cout << "suite=" << suite.name << " fingerprint=" << to_hex(files::fingerprint(kp.pub, suite))
            << " private=" << priv.string() << " public=" << pub.string() << std::endl;
  return 0;
}

// ---------------------------------------------------------------- credgen

struct CredgenOpts {
  std::string issuer_key;
  std::string issuer_cred;
  std::string subject;
  std::string role;
  std::string pub;
  std::int64_t valid_days = 365;
  std::string out;
};

int cmd_credgen(const CredgenOpts& o) {
  const curve::CurveSuite* suite = nullptr;
  auto pub = files::load_public_key(o.pub, &suite);
  auto issuer_priv = files::load_private_key(o.issuer_key, *suite);
  auto issuer_pub = curve::scalar_mul(issuer_priv, suite->g, *suite);
  auto role = credential::role_from_string(o.role);
  if (!role) throw UsageError("unknown role '" + o.role + "'");

  credential::CredentialFields f;
  f.subject_id = credential::make_id(o.subject);
  f.role = *role;
  f.static_pub = pub;
  f.valid_from = handshake::system_clock_seconds();
  f.valid_to = f.valid_from + o.valid_days * 86400;
  if (issuer_pub == pub) {
    f.issuer_id = f.subject_id;
  } else {
    if (o.issuer_cred.empty())
      throw UsageError("--issuer-cred is required unless the credential is self-signed");
    auto ic = files::load_credential(o.issuer_cred);
    if (ic.suite_id != suite->id || ic.fields.static_pub != issuer_pub)
      throw UsageError("--issuer-cred does not belong to --issuer-key");
    f.issuer_id = ic.fields.subject_id;
  }
  SystemRandom rng;
  auto cred = credential::credential_issue(issuer_priv, f.issuer_id, f, rng, *suite);
  try {
    files::write_file(o.out, credential::credential_encode(cred));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  std::cout << "subject=" << cred.subject() << " role=" << credential::to_string(cred.fields.role)
            << " issuer=" << credential::id_string(cred.fields.issuer_id)
            << " valid_to=" << cred.fields.valid_to << " out=" << o.out << std::endl;
  return 0;
}

// ---------------------------------------------------------------- serve

struct ServeOpts {
  std::string listen = "127.0.0.1:7443";
  std::string key;
  std::string cred;
  std::string root;
  std::string store_dir = "store";
  std::uint16_t hr_low = 40;
  std::uint16_t hr_high = 150;
  std::size_t hr_consecutive = 3;
  bool fsync = false;
};

int cmd_serve(const ServeOpts& o) {
  endpoints::ServerConfig cfg;
  cfg.listen = net::parse_address(o.listen);
  cfg.identity = load_identity(o.key, o.cred);
  cfg.trust_root = load_root(o.root);
  if (cfg.identity.cred.fields.role != credential::Role::Server)
    throw UsageError("--cred is not a server credential");
  if (o.hr_low >= o.hr_high) throw UsageError("--hr-low must be below --hr-high");
  cfg.anomaly = telemetry::AnomalyConfig{o.hr_low, o.hr_high, o.hr_consecutive};
  cfg.store_dir = o.store_dir;
  cfg.fsync = o.fsync;

  std::unique_ptr<endpoints::Server> server;
  try {
    server = std::make_unique<endpoints::Server>(cfg);
  } catch (const Error& e) {
    log::error("startup_failed", {{"detail", e.what()}});
    return kExitRuntime;
  }
  SignalWaiter signals([&] { server->stop(); });
  server->run();
  return 0;
}

// ---------------------------------------------------------------- device

struct DeviceOpts {
  std::string connect = "127.0.0.1:7443";
  std::string key;
  std::string cred;
  std::string root;
  std::string suite;
  std::uint32_t interval_ms = 1000;
  std::uint64_t count = 10;
  std::uint64_t seed = 1;
  std::string anomaly_script;
};

int cmd_device(const DeviceOpts& o) {
  endpoints::DeviceConfig cfg;
  cfg.server = net::parse_address(o.connect);
  cfg.identity = load_identity(o.key, o.cred);
  cfg.trust_root = load_root(o.root);
  cfg.suite_id = o.suite.empty() ? cfg.identity.cred.suite_id : require_suite(o.suite).id;
  if (cfg.suite_id != cfg.identity.cred.suite_id)
    throw UsageError("--suite does not match the device credential");
  cfg.interval_ms = o.interval_ms;
  cfg.count = o.count;
  cfg.sensor.seed = o.seed;
  if (!o.anomaly_script.empty()) cfg.sensor.script = telemetry::load_anomaly_script(o.anomaly_script);
  endpoints::validate(cfg);

  auto rep = endpoints::run_device(cfg);
  std::cout << rep.line() << std::endl;
  return rep.ok ? 0 : kExitRuntime;
}

// ---------------------------------------------------------------- proxy

struct ProxyOpts {
  std::string listen = "127.0.0.1:7444";
  std::string upstream = "127.0.0.1:7443";
  std::string mode = "passthrough";
  std::uint64_t target_index = 0;
  std::string direction = "c2s";
  std::uint64_t bit_offset = 0;
};

int cmd_proxy(const ProxyOpts& o) {
  proxy::ProxyConfig cfg;
  cfg.listen = net::parse_address(o.listen);
  cfg.upstream = net::parse_address(o.upstream);
  cfg.plan.mode = *proxy::mode_from_string(o.mode);
  cfg.plan.direction = *proxy::direction_from_string(o.direction);
  cfg.plan.target_index = o.target_index;
  cfg.plan.bit_offset = o.bit_offset;
  cfg.report = &std::cout;

  std::unique_ptr<proxy::Proxy> px;
  try {
    px = std::make_unique<proxy::Proxy>(cfg);
  } catch (const Error& e) {
    log::error("startup_failed", {{"detail", e.what()}});
    return kExitRuntime;
  }
  SignalWaiter signals([&] { px->stop(); });
  px->run();
  return 0;
}

std::vector<std::string> mode_names() {
  std::vector<std::string> v;
  for (auto m : proxy::kAllModes) v.emplace_back(proxy::to_string(m));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VitaLink secure heart-rate telemetry"};
  app.require_subcommand(1);
  std::string log_level;
  app.add_option("--log-level", log_level, "debug, info, warn, error or off (overrides VITALINK_LOG)")
      ->check(CLI::IsMember({"debug", "info", "warn", "error", "off"}));

  KeygenOpts kg;
  auto* keygen = app.add_subcommand("keygen", "Generate a static key pair");
  keygen->add_option("--suite", kg.suite, "p256, toy or a numeric suite id")->capture_default_str();
  keygen->add_option("--out", kg.out, "Output directory")->required();
  keygen->add_option("--name", kg.name, "File name stem")->capture_default_str();
  keygen->add_option("--seed", kg.seed, "Deterministic key generation (testing only)");

  CredgenOpts cg;
  auto* credgen = app.add_subcommand("credgen", "Issue a credential");
  credgen->add_option("--issuer-key", cg.issuer_key, "Issuer private key (.vlk)")
      ->required()->check(CLI::ExistingFile);
  credgen->add_option("--issuer-cred", cg.issuer_cred, "Issuer credential (.vlc), unless self-signed")
      ->check(CLI::ExistingFile);
  credgen->add_option("--subject", cg.subject, "Subject id, 1 to 16 bytes")->required();
  credgen->add_option("--role", cg.role, "device, server or issuer")
      ->required()->check(CLI::IsMember({"device", "server", "issuer"}));
  credgen->add_option("--pub", cg.pub, "Subject public key (.vlp)")->required()->check(CLI::ExistingFile);
  credgen->add_option("--valid-days", cg.valid_days, "Validity period in days")->capture_default_str();
  credgen->add_option("--out", cg.out, "Output credential (.vlc)")->required();

  ServeOpts sv;
  auto* serve = app.add_subcommand("serve", "Run the ingestion server");
  serve->add_option("--listen", sv.listen, "host:port")->capture_default_str();
  serve->add_option("--key", sv.key, "Server private key")->required()->check(CLI::ExistingFile);
  serve->add_option("--cred", sv.cred, "Server credential")->required()->check(CLI::ExistingFile);
  serve->add_option("--root", sv.root, "Trust root credential")->required()->check(CLI::ExistingFile);
  serve->add_option("--store-dir", sv.store_dir, "Directory for readings.log and alerts.log")
      ->capture_default_str();
  serve->add_option("--hr-low", sv.hr_low, "Low heart-rate threshold")->capture_default_str();
  serve->add_option("--hr-high", sv.hr_high, "High heart-rate threshold")->capture_default_str();
  serve->add_option("--hr-consecutive", sv.hr_consecutive, "Readings needed to raise an alert")
      ->capture_default_str()->check(CLI::Range(1, 1000));
  serve->add_flag("--fsync", sv.fsync, "Sync every stored line to disk");

  DeviceOpts dv;
  auto* device = app.add_subcommand("device", "Run the simulated wearable");
  device->add_option("--connect", dv.connect, "Server host:port")->capture_default_str();
  device->add_option("--key", dv.key, "Device private key")->required()->check(CLI::ExistingFile);
  device->add_option("--cred", dv.cred, "Device credential")->required()->check(CLI::ExistingFile);
  device->add_option("--root", dv.root, "Trust root credential")->required()->check(CLI::ExistingFile);
  device->add_option("--suite", dv.suite, "p256, toy or numeric id; defaults to the credential's");
  device->add_option("--interval-ms", dv.interval_ms, "Sample interval")
      ->capture_default_str()->check(CLI::Range(100u, 3'600'000u));
  device->add_option("--count", dv.count, "Readings to send")->capture_default_str()->check(CLI::PositiveNumber);
  device->add_option("--seed", dv.seed, "Sensor simulator seed")->capture_default_str();
  device->add_option("--anomaly-script", dv.anomaly_script, "Lines of 'start end bpm'")
      ->check(CLI::ExistingFile);

  ProxyOpts px;
  auto* proxy_cmd = app.add_subcommand("proxy", "Run the tamper proxy");
  proxy_cmd->add_option("--listen", px.listen, "host:port")->capture_default_str();
  proxy_cmd->add_option("--upstream", px.upstream, "Server host:port")->capture_default_str();
  proxy_cmd->add_option("--mode", px.mode, "Fault to inject")
      ->capture_default_str()->check(CLI::IsMember(mode_names()));
  proxy_cmd->add_option("--target-index", px.target_index, "Data frame index, per direction")
      ->capture_default_str();
  proxy_cmd->add_option("--direction", px.direction, "c2s or s2c")
      ->capture_default_str()->check(CLI::IsMember({"c2s", "s2c"}));
  proxy_cmd->add_option("--bit-offset", px.bit_offset, "Bit to flip")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }
  if (!log_level.empty()) log::set_level(log::level_from_string(log_level, log::Level::Info));

  try {
    if (*keygen) return cmd_keygen(kg);
    if (*credgen) return cmd_credgen(cg);
    if (*serve) return cmd_serve(sv);
    if (*device) return cmd_device(dv);
    if (*proxy_cmd) return cmd_proxy(px);
  } catch (const UsageError& e) {
    log::error("usage", {{"detail", e.what()}});
    return kExitUsage;
  } catch (const Error& e) {
    switch (e.code()) {
      case Errc::Config:
      case Errc::InvalidCredentialFields:
      case Errc::UnsupportedSuite:
      case Errc::MalformedCredential:
      case Errc::MalformedScript:
        log::error("usage", {{"error", std::string(to_string(e.code()))}, {"detail", e.what()}});
        return kExitUsage;
      default:
        log::error("failed", {{"error", std::string(to_string(e.code()))}, {"detail", e.what()}});
        return kExitRuntime;
    }
  } catch (const std::exception& e) {
    log::error("failed", {{"detail", e.what()}});
    return kExitRuntime;
  }
  return kExitUsage;
}
