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

#ifndef VITALINK_STREAM_HPP
#define VITALINK_STREAM_HPP

#include <chrono>
#include <cstdint>
#include <cstring>
#include <span>

#include "vitalink/bytes.hpp"
#include "vitalink/error.hpp"

namespace vitalink {

using Millis = std::chrono::milliseconds;

// Blocking byte stream with per-read inactivity timeouts.
class ByteStream {
 public:
  virtual ~ByteStream() = default;
  // Reads at least one byte, or returns 0 at end of stream. Throws
  // Error(Timeout) if nothing arrives within the timeout.
  virtual std::size_t read_some(std::span<std::uint8_t> out, Millis timeout) = 0;
  virtual void write_all(ByteView data) = 0;
  // True if a read would not block (data or end of stream) within the timeout.
  virtual bool readable(Millis timeout) = 0;
  virtual void close() {}
};

// Reads exactly out.size() bytes. Returns false on end of stream before the
// first byte; throws ConnectionClosed("truncated") on end of stream after it.
inline bool read_exact(ByteStream& s, std::span<std::uint8_t> out, Millis timeout) {
  std::size_t got = 0;
  while (got < out.size()) {
    std::size_t n = s.read_some(out.subspan(got), timeout);
    if (n == 0) {
      if (got == 0) return false;
      throw Error(Errc::ConnectionClosed, "truncated");
    }
    got += n;
  }
  return true;
}

// In-memory stream: reads consume a preloaded buffer, writes accumulate.
class BufferStream final : public ByteStream {
 public:
  BufferStream() = default;
  explicit BufferStream(Bytes input) : input_(std::move(input)) {}

  std::size_t read_some(std::span<std::uint8_t> out, Millis) override {
    std::size_t n = std::min(out.size(), input_.size() - pos_);
    std::memcpy(out.data(), input_.data() + pos_, n);
    pos_ += n;
    return n;
  }
  void write_all(ByteView data) override { append(output_, data); }
  bool readable(Millis) override { return true; }

  const Bytes& output() const { return output_; }
  std::size_t consumed() const { return pos_; }

 private:
  Bytes input_;
  std::size_t pos_ = 0;
  Bytes output_;
};

}  // namespace vitalink

#endif  // VITALINK_STREAM_HPP
