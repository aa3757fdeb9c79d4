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

#ifndef VITALINK_TESTS_TOY_ORACLE_HPP
#define VITALINK_TESTS_TOY_ORACLE_HPP

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vitalink/curve.hpp"

namespace vitalink::testing {

// Independent oracle for the toy curve: plain integers, textbook group law,
// inverses by exhaustive search. Shares nothing with the implementation.
struct ToyOracle {
  static constexpr long p = 17, a = 2, b = 2;
  using Pt = std::optional<std::pair<long, long>>;  // nullopt = identity

  static long md(long v) { return ((v % p) + p) % p; }
  static long inv(long v) {
    for (long i = 1; i < p; ++i)
      if (md(v * i) == 1) return i;
    throw std::logic_error("no inverse");
  }
  static bool on_curve(long x, long y) { return md(y * y) == md(x * x * x + a * x + b); }

  static std::vector<Pt> all_points() {
    std::vector<Pt> pts{std::nullopt};
    for (long x = 0; x < p; ++x)
      for (long y = 0; y < p; ++y)
        if (on_curve(x, y)) pts.emplace_back(std::make_pair(x, y));
    return pts;
  }

  static Pt add(Pt P, Pt Q) {
    if (!P) return Q;
    if (!Q) return P;
    auto [x1, y1] = *P;
    auto [x2, y2] = *Q;
    long l;
    if (x1 == x2) {
      if (md(y1 + y2) == 0) return std::nullopt;
      l = md((3 * x1 * x1 + a) * inv(2 * y1));
    } else {
      l = md((y2 - y1) * inv(x2 - x1));
    }
    long x3 = md(l * l - x1 - x2);
    return std::make_pair(x3, md(l * (x1 - x3) - y1));
  }

  static Pt mul(long k, Pt P) {
    Pt acc = std::nullopt;
    for (long i = 0; i < k; ++i) acc = add(acc, P);
    return acc;
  }

  static long order_of(Pt P) {
    long k = 1;
    for (Pt acc = P; acc; acc = add(acc, P)) ++k;
    return k;
  }
};

inline curve::CurvePoint lift(const ToyOracle::Pt& p) {
  if (!p) return curve::CurvePoint::identity();
  return curve::CurvePoint(U256(static_cast<std::uint64_t>(p->first)),
                    U256(static_cast<std::uint64_t>(p->second)));
}

inline const ToyOracle::Pt kToyG = std::make_pair(5L, 1L);

}  // namespace vitalink::testing

#endif  // VITALINK_TESTS_TOY_ORACLE_HPP
