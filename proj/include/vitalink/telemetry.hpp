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

#ifndef VITALINK_TELEMETRY_HPP
#define VITALINK_TELEMETRY_HPP

// Heart-rate readings, the 19-byte payload codec, a seeded sensor simulator
// and the consecutive-threshold anomaly rule.

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vitalink/bytes.hpp"
#include "vitalink/error.hpp"

namespace vitalink::telemetry {

inline constexpr std::size_t kReadingSize = 19;
inline constexpr std::uint16_t kMaxBpm = 300;

using DeviceId = std::array<std::uint8_t, 8>;

enum class SensorStatus : std::uint8_t { Ok = 0, OffBody = 1, LowConfidence = 2 };

inline std::string_view to_string(SensorStatus s) {
  switch (s) {
    case SensorStatus::Ok: return "ok";
    case SensorStatus::OffBody: return "off_body";
    case SensorStatus::LowConfidence: return "low_confidence";
  }
  return "?";
}

inline std::optional<SensorStatus> status_from_string(std::string_view s) {
  if (s == "ok") return SensorStatus::Ok;
  if (s == "off_body") return SensorStatus::OffBody;
  if (s == "low_confidence") return SensorStatus::LowConfidence;
  return std::nullopt;
}

struct HeartRateReading {
  DeviceId device_id{};
  std::uint64_t timestamp_ms = 0;
  std::uint16_t bpm = 0;
  SensorStatus status = SensorStatus::Ok;

  friend bool operator==(const HeartRateReading&, const HeartRateReading&) = default;
};

inline bool plausible(const HeartRateReading& r) {
  if (r.bpm > kMaxBpm) return false;
  if (r.bpm == 0 && r.status == SensorStatus::Ok) return false;
  return static_cast<std::uint8_t>(r.status) <= 2;
}

// device_id(8) || timestamp_ms(BE64) || bpm(BE16) || status(1)
inline Bytes reading_encode(const HeartRateReading& r) {
  if (!plausible(r)) throw Error(Errc::MalformedReading, "reading violates invariants");
  Bytes out(r.device_id.begin(), r.device_id.end());
  put_be64(out, r.timestamp_ms);
  put_be16(out, r.bpm);
  out.push_back(static_cast<std::uint8_t>(r.status));
  return out;
}

inline HeartRateReading reading_decode(ByteView in) {
  if (in.size() != kReadingSize)
    throw Error(Errc::MalformedReading, "expected 19 bytes, got " + std::to_string(in.size()));
  HeartRateReading r;
  std::copy_n(in.begin(), 8, r.device_id.begin());
  r.timestamp_ms = get_be64(in.data() + 8);
  r.bpm = get_be16(in.data() + 16);
  if (in[18] > 2) throw Error(Errc::MalformedReading, "unknown status");
  r.status = static_cast<SensorStatus>(in[18]);
  if (!plausible(r)) throw Error(Errc::MalformedReading, "bpm out of range");
  return r;
}

// Forces bpm for readings with index in [start, end] (inclusive, 0-based).
struct ScriptSegment {
  std::uint64_t start_index = 0;
  std::uint64_t end_index = 0;
  std::uint16_t bpm = 0;
};

// Lines of "start_index end_index bpm"; blank lines and '#' comments skipped.
inline std::vector<ScriptSegment> parse_anomaly_script(std::istream& in) {
  std::vector<ScriptSegment> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string probe;
    if (!(ls >> probe)) continue;
    ls.clear();
    ls.str(line);
    long long start = -1, end = -1, bpm = -1;
    std::string extra;
    if (!(ls >> start >> end >> bpm) || (ls >> extra) || start < 0 || end < start || bpm < 1 ||
        bpm > kMaxBpm)
      throw Error(Errc::MalformedScript, "line " + std::to_string(lineno));
    out.push_back({static_cast<std::uint64_t>(start), static_cast<std::uint64_t>(end),
                   static_cast<std::uint16_t>(bpm)});
  }
  return out;
}

inline std::vector<ScriptSegment> load_anomaly_script(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::Io, "cannot open anomaly script " + path);
  return parse_anomaly_script(f);
}

struct SensorParams {
  std::uint64_t seed = 1;
  double baseline = 75.0;
  double amplitude = 5.0;
  double period_ms = 60'000.0;
  double sigma = 3.0;
  std::vector<ScriptSegment> script;
};

// Deterministic for a given seed and sequence of now_ms values.
class SensorSim {
 public:
  SensorSim(const DeviceId& device, SensorParams params)
      : device_(device), params_(std::move(params)), rng_(params_.seed) {}

  HeartRateReading next(std::uint64_t now_ms) {
    const std::uint64_t index = index_++;
    double noise = 0.0;
    if (params_.sigma > 0) noise = std::normal_distribution<double>(0.0, params_.sigma)(rng_);
    double wave = params_.amplitude *
                  std::sin(2.0 * std::numbers::pi * static_cast<double>(now_ms) / params_.period_ms);
    double bpm = std::clamp(std::round(params_.baseline + wave + noise), 30.0, 220.0);
    HeartRateReading r{device_, now_ms, static_cast<std::uint16_t>(bpm), SensorStatus::Ok};
    for (const auto& seg : params_.script)
      if (index >= seg.start_index && index <= seg.end_index) r.bpm = seg.bpm;
    return r;
  }

  std::uint64_t produced() const { return index_; }

 private:
  DeviceId device_;
  SensorParams params_;
  std::mt19937_64 rng_;
  std::uint64_t index_ = 0;
};

struct AnomalyConfig {
  std::uint16_t low = 40;
  std::uint16_t high = 150;
  std::size_t consecutive = 3;
};

struct AnomalyAlert {
  DeviceId device_id{};
  std::uint64_t window_start_ms = 0;
  std::uint64_t window_end_ms = 0;
  std::vector<std::uint16_t> observed_bpm;
  std::string rule;

  friend bool operator==(const AnomalyAlert&, const AnomalyAlert&) = default;
};

inline constexpr std::string_view kRuleHigh = "high_hr";
inline constexpr std::string_view kRuleLow = "low_hr";

// Fires when `consecutive` ok-status readings in a row are all above `high`
// (or all below `low`), once per run: the run must be broken by an ok reading
// outside the breach before the same rule can fire again. Readings with any
// other status are ignored entirely.
class AnomalyDetector {
 public:
  explicit AnomalyDetector(AnomalyConfig cfg) : cfg_(cfg) {
    if (cfg_.consecutive < 1) throw std::invalid_argument("consecutive must be >= 1");
  }

  std::optional<AnomalyAlert> check(const HeartRateReading& r) {
    if (r.status != SensorStatus::Ok) return std::nullopt;
    window_.push_back(r);
    if (window_.size() > cfg_.consecutive) window_.pop_front();
    high_run_ = r.bpm > cfg_.high ? high_run_ + 1 : 0;
    low_run_ = r.bpm < cfg_.low ? low_run_ + 1 : 0;
    if (high_run_ == cfg_.consecutive) return make_alert(kRuleHigh);
    if (low_run_ == cfg_.consecutive) return make_alert(kRuleLow);
    return std::nullopt;
  }

 private:
  AnomalyAlert make_alert(std::string_view rule) const {
    AnomalyAlert a;
    a.device_id = window_.back().device_id;
    a.window_start_ms = window_.front().timestamp_ms;
    a.window_end_ms = window_.back().timestamp_ms;
    for (const auto& w : window_) a.observed_bpm.push_back(w.bpm);
    a.rule = std::string(rule);
    return a;
  }

  AnomalyConfig cfg_;
  std::deque<HeartRateReading> window_;
  std::size_t high_run_ = 0;
  std::size_t low_run_ = 0;
};

inline DeviceId device_id_from_string(std::string_view s) {
  DeviceId id{};
  std::copy_n(s.begin(), std::min<std::size_t>(s.size(), id.size()), id.begin());
  return id;
}

}  // namespace vitalink::telemetry

#endif  // VITALINK_TELEMETRY_HPP
