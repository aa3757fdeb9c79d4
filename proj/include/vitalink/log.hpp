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

#ifndef VITALINK_LOG_HPP
#define VITALINK_LOG_HPP

// Structured key=value log lines on stderr. VITALINK_LOG sets the threshold
// (debug, info, warn, error, off); the default is info.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <initializer_list>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>

namespace vitalink::log {

enum class Level { Debug = 0, Info = 1, Warn = 2, Error = 3, Off = 4 };

inline std::string_view to_string(Level l) {
  switch (l) {
    case Level::Debug: return "debug";
    case Level::Info: return "info";
    case Level::Warn: return "warn";
    case Level::Error: return "error";
    case Level::Off: return "off";
  }
  return "?";
}

inline Level level_from_string(std::string_view s, Level fallback) {
  for (Level l : {Level::Debug, Level::Info, Level::Warn, Level::Error, Level::Off})
    if (s == to_string(l)) return l;
  return fallback;
}

using Field = std::pair<std::string_view, std::string>;
using Sink = std::function<void(const std::string&)>;

namespace detail {

struct State {
  std::mutex mu;
  Level threshold;
  Sink sink;

  State() {
    const char* env = std::getenv("VITALINK_LOG");
    threshold = env ? level_from_string(env, Level::Info) : Level::Info;
  }
};

inline State& state() {
  static State s;
  return s;
}

inline void put_value(std::string& out, std::string_view v) {
  bool plain = !v.empty();
  for (char c : v)
    if (c == ' ' || c == '"' || c == '=' || c == '\\' || static_cast<unsigned char>(c) < 0x20)
      plain = false;
  if (plain) {
    out += v;
    return;
  }
  out += '"';
  for (char c : v) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  out += '"';
}

}  // namespace detail

inline void set_level(Level l) {
  std::lock_guard lk(detail::state().mu);
  detail::state().threshold = l;
}

inline Level level() {
  std::lock_guard lk(detail::state().mu);
  return detail::state().threshold;
}

// Replaces stderr as the destination; an empty sink restores stderr.
inline void set_sink(Sink sink) {
  std::lock_guard lk(detail::state().mu);
  detail::state().sink = std::move(sink);
}

inline std::string format(Level l, std::string_view event, std::initializer_list<Field> fields) {
  auto now = std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::system_clock::now().time_since_epoch())
                 .count();
  std::string line = "ts=" + std::to_string(now) + " level=" + std::string(to_string(l)) +
                     " event=";
  detail::put_value(line, event);
  for (const auto& [k, v] : fields) {
    line += ' ';
    line += k;
    line += '=';
    detail::put_value(line, v);
  }
  line += '\n';
  return line;
}

inline void write(Level l, std::string_view event, std::initializer_list<Field> fields = {}) {
  auto& st = detail::state();
  std::lock_guard lk(st.mu);
  if (l < st.threshold) return;
  std::string line = format(l, event, fields);
  if (st.sink) {
    st.sink(line);
  } else {
    std::fwrite(line.data(), 1, line.size(), stderr);
    std::fflush(stderr);
  }
}

inline void debug(std::string_view e, std::initializer_list<Field> f = {}) { write(Level::Debug, e, f); }
inline void info(std::string_view e, std::initializer_list<Field> f = {}) { write(Level::Info, e, f); }
inline void warn(std::string_view e, std::initializer_list<Field> f = {}) { write(Level::Warn, e, f); }
inline void error(std::string_view e, std::initializer_list<Field> f = {}) { write(Level::Error, e, f); }

}  // namespace vitalink::log

#endif  // VITALINK_LOG_HPP
