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

#ifndef VITALINK_RANDOM_HPP
#define VITALINK_RANDOM_HPP

#include <sys/random.h>

#include <cerrno>
#include <cstdint>
#include <span>
#include <string_view>

#include "vitalink/bytes.hpp"
#include "vitalink/error.hpp"
#include "vitalink/kdf.hpp"

namespace vitalink {

// Source of uniformly random bytes. Implementations throw
// Error(GenerationFailure) when they cannot deliver.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  Bytes bytes(std::size_t n) {
    Bytes b(n);
    fill(b);
    return b;
  }
};

// Kernel CSPRNG.
class SystemRandom final : public RandomSource {
 public:
  void fill(std::span<std::uint8_t> out) override {
    std::size_t done = 0;
    while (done < out.size()) {
      ssize_t n = ::getrandom(out.data() + done, out.size() - done, 0);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(Errc::GenerationFailure, "getrandom failed");
      }
      done += static_cast<std::size_t>(n);
    }
  }
};

// Deterministic stream: SHA-256(seed || counter) blocks. Test and --seed
// hook only; never a substitute for SystemRandom in a deployment.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed) {
    put_be64(seed_, seed);
    append(seed_, to_bytes("vitalink seeded random"));
  }
  explicit SeededRandom(ByteView seed) : seed_(seed.begin(), seed.end()) {}

  void fill(std::span<std::uint8_t> out) override {
    for (auto& b : out) {
      if (pos_ == block_.size()) refill();
      b = block_[pos_++];
    }
  }

 private:
  void refill() {
    Bytes in = seed_;
    put_be64(in, counter_++);
    block_ = kdf::hash(in);
    pos_ = 0;
  }

  Bytes seed_;
  std::uint64_t counter_ = 0;
  kdf::Digest block_{};
  std::size_t pos_ = block_.size();
};

}  // namespace vitalink

#endif  // VITALINK_RANDOM_HPP
