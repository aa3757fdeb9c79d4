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

#ifndef VITALINK_STORE_HPP
#define VITALINK_STORE_HPP

// Append-only text logs for the ingestion server.
//
// readings.log, one record per line, tab separated:
//   session_id_hex subject_id device_id_hex timestamp_ms bpm status received_at_ms
// alerts.log:
//   device_id_hex rule window_start_ms window_end_ms bpm,bpm,...
//
// Each line goes out in a single write(2) on an O_APPEND descriptor under a
// mutex, so concurrent sessions never interleave bytes within a line. Bytes
// of subject_id outside printable ASCII (and tab, backslash) are written as
// \xHH.

#include <fcntl.h>
#include <unistd.h>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include "vitalink/bytes.hpp"
#include "vitalink/error.hpp"
#include "vitalink/telemetry.hpp"

namespace vitalink::store {

inline constexpr const char* kReadingsFile = "readings.log";
inline constexpr const char* kAlertsFile = "alerts.log";

struct StoreRecord {
  std::string session_id_hex;
  std::string subject_id;
  telemetry::DeviceId device_id{};
  std::uint64_t timestamp_ms = 0;
  std::uint16_t bpm = 0;
  telemetry::SensorStatus status = telemetry::SensorStatus::Ok;
  std::uint64_t received_at_ms = 0;

  friend bool operator==(const StoreRecord&, const StoreRecord&) = default;
};

namespace detail {

inline std::string escape(std::string_view s) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    if (c < 0x21 || c > 0x7E || c == '\\') {
      out += "\\x";
      out += kHex[c >> 4];
      out += kHex[c & 15];
    } else {
      out += ch;
    }
  }
  return out;
}

inline Bytes hex_field(std::string_view s) {
  try {
    return from_hex(s);
  } catch (const std::invalid_argument& e) {
    throw Error(Errc::Io, e.what());
  }
}

inline std::string unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out += s[i];
      continue;
    }
    if (i + 3 >= s.size() || s[i + 1] != 'x') throw Error(Errc::Io, "bad escape");
    Bytes b = hex_field(s.substr(i + 2, 2));
    out += static_cast<char>(b[0]);
    i += 3;
  }
  return out;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t p = s.find(sep, start);
    out.push_back(s.substr(start, p - start));
    if (p == std::string_view::npos) return out;
    start = p + 1;
  }
}

template <typename T>
T parse_uint(std::string_view s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw Error(Errc::Io, "bad number '" + std::string(s) + "'");
  return v;
}

inline telemetry::DeviceId parse_device_id(std::string_view s) {
  Bytes b = hex_field(s);
  if (b.size() != 8) throw Error(Errc::Io, "bad device id");
  telemetry::DeviceId id;
  std::copy(b.begin(), b.end(), id.begin());
  return id;
}

}  // namespace detail

inline std::string format_record(const StoreRecord& r) {
  std::string line = r.session_id_hex;
  line += '\t';
  line += detail::escape(r.subject_id);
  line += '\t';
  line += to_hex(r.device_id);
  line += '\t' + std::to_string(r.timestamp_ms);
  line += '\t' + std::to_string(r.bpm);
  line += '\t';
  line += telemetry::to_string(r.status);
  line += '\t' + std::to_string(r.received_at_ms);
  line += '\n';
  return line;
}

// Accepts a line with or without its trailing newline.
inline StoreRecord parse_record(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  auto f = detail::split(line, '\t');
  if (f.size() != 7) throw Error(Errc::Io, "expected 7 fields, got " + std::to_string(f.size()));
  StoreRecord r;
  if (f[0].size() != 64) throw Error(Errc::Io, "bad session id");
  detail::hex_field(f[0]);
  r.session_id_hex = std::string(f[0]);
  r.subject_id = detail::unescape(f[1]);
  r.device_id = detail::parse_device_id(f[2]);
  r.timestamp_ms = detail::parse_uint<std::uint64_t>(f[3]);
  r.bpm = detail::parse_uint<std::uint16_t>(f[4]);
  auto st = telemetry::status_from_string(f[5]);
  if (!st) throw Error(Errc::Io, "bad status");
  r.status = *st;
  r.received_at_ms = detail::parse_uint<std::uint64_t>(f[6]);
  return r;
}

inline std::string format_alert(const telemetry::AnomalyAlert& a) {
  std::string line = to_hex(a.device_id);
  line += '\t';
  line += a.rule;
  line += '\t' + std::to_string(a.window_start_ms);
  line += '\t' + std::to_string(a.window_end_ms);
  line += '\t';
  for (std::size_t i = 0; i < a.observed_bpm.size(); ++i) {
    if (i) line += ',';
    line += std::to_string(a.observed_bpm[i]);
  }
  line += '\n';
  return line;
}

inline telemetry::AnomalyAlert parse_alert(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  auto f = detail::split(line, '\t');
  if (f.size() != 5) throw Error(Errc::Io, "expected 5 fields, got " + std::to_string(f.size()));
  telemetry::AnomalyAlert a;
  a.device_id = detail::parse_device_id(f[0]);
  a.rule = std::string(f[1]);
  a.window_start_ms = detail::parse_uint<std::uint64_t>(f[2]);
  a.window_end_ms = detail::parse_uint<std::uint64_t>(f[3]);
  for (auto b : detail::split(f[4], ',')) a.observed_bpm.push_back(detail::parse_uint<std::uint16_t>(b));
  return a;
}

// Human-readable one-liner for the server's stderr.
inline std::string describe_alert(const telemetry::AnomalyAlert& a) {
  std::string bpms;
  for (auto b : a.observed_bpm) bpms += (bpms.empty() ? "" : ",") + std::to_string(b);
  return "ALERT " + a.rule + " device " + to_hex(a.device_id) + " from " +
         std::to_string(a.window_start_ms) + " to " + std::to_string(a.window_end_ms) +
         " bpm " + bpms + "\n";
}

// Reads a whole log, failing on the first line that does not parse or on a
// final line without its newline (a torn write).
template <typename T, typename Parse>
std::vector<T> read_log(const std::filesystem::path& path, Parse parse) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (!data.empty() && data.back() != '\n') throw Error(Errc::Io, "torn final line");
  std::vector<T> out;
  std::size_t line_no = 0;
  for (std::size_t pos = 0; pos < data.size();) {
    std::size_t nl = data.find('\n', pos);
    ++line_no;
    try {
      out.push_back(parse(std::string_view(data).substr(pos, nl - pos)));
    } catch (const Error& e) {
      throw Error(Errc::Io, path.filename().string() + " line " + std::to_string(line_no) +
                                ": " + e.what());
    }
    pos = nl + 1;
  }
  return out;
}

inline std::vector<StoreRecord> read_readings(const std::filesystem::path& path) {
  return read_log<StoreRecord>(path, parse_record);
}

inline std::vector<telemetry::AnomalyAlert> read_alerts(const std::filesystem::path& path) {
  return read_log<telemetry::AnomalyAlert>(path, parse_alert);
}

class AppendFile {
 public:
  AppendFile(const std::filesystem::path& path, bool sync) : sync_(sync) {
    fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(Errc::Io, "cannot open " + path.string());
  }
  ~AppendFile() {
    if (fd_ >= 0) ::close(fd_);
  }
  AppendFile(const AppendFile&) = delete;
  AppendFile& operator=(const AppendFile&) = delete;

  void append_line(const std::string& line) {
    std::lock_guard lk(mu_);
    ssize_t n;
    do {
      n = ::write(fd_, line.data(), line.size());
    } while (n < 0 && errno == EINTR);
    if (n != static_cast<ssize_t>(line.size())) throw Error(Errc::Io, "short write");
    if (sync_ && ::fdatasync(fd_) != 0) throw Error(Errc::Io, "fdatasync failed");
  }

  void flush() {
    std::lock_guard lk(mu_);
    ::fsync(fd_);
  }

 private:
  std::mutex mu_;
  int fd_ = -1;
  bool sync_;
};

class Store {
 public:
  // With sync set every line is fdatasync'ed before the call returns.
  explicit Store(const std::filesystem::path& dir, bool sync = false)
      : dir_((std::filesystem::create_directories(dir), dir)),
        readings_(dir / kReadingsFile, sync),
        alerts_(dir / kAlertsFile, sync) {}

  void persist_reading(const StoreRecord& r) { readings_.append_line(format_record(r)); }
  void raise_alert(const telemetry::AnomalyAlert& a) { alerts_.append_line(format_alert(a)); }

  void flush() {
    readings_.flush();
    alerts_.flush();
  }

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path readings_path() const { return dir_ / kReadingsFile; }
  std::filesystem::path alerts_path() const { return dir_ / kAlertsFile; }

 private:
  std::filesystem::path dir_;
  AppendFile readings_;
  AppendFile alerts_;
};

}  // namespace vitalink::store

#endif  // VITALINK_STORE_HPP
