// Copyright 2026 The geoctl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GEOCTL_RANDOM_H_
#define GEOCTL_RANDOM_H_

#include <cmath>
#include <cstdint>
#include <numbers>

#include "geoctl/common.h"

namespace geoctl {

// Stream identifiers. Each module draws from its own stream so that adding
// draws in one place never shifts the numbers seen elsewhere.
enum class Stream : std::uint64_t {
  kSublinearFit = 1,
  kBracketResidual = 2,
  kPushforward = 3,
  kTaylor = 4,
  kPullback = 5,
  kHormander = 6,
  kReach = 7,
  kInvariance = 8,
  kSteering = 9,
  kSuite = 10,
  kTest = 99,
};

// Counter-based generator: the state is a pure function of
// (root seed, stream, counter), so trial i always sees the same numbers no
// matter which worker runs it or in what order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, Stream stream, std::uint64_t counter)
      : state_(Mix(Mix(seed ^ 0x9e3779b97f4a7c15ULL) ^
                   Mix(static_cast<std::uint64_t>(stream) + 0x632be59bd9b4e019ULL) ^
                   Mix(counter + 0xbf58476d1ce4e5b9ULL))) {}

  std::uint64_t NextU64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return Mix(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t Below(std::uint64_t n) {
    // Lemire's multiply-shift; bias is < n / 2^64, irrelevant here.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(NextU64()) * n) >> 64);
  }

  double Normal() {
    double u1 = Uniform();
    while (u1 <= 0.0) u1 = Uniform();
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  Vec UniformInBox(const Box& box) {
    Vec x(box.dim());
    for (int i = 0; i < box.dim(); ++i) x[i] = Uniform(box.lo[i], box.hi[i]);
    return x;
  }

  Vec UniformInBall(const Vec& center, double radius) {
    const int d = static_cast<int>(center.size());
    Vec dir(d);
    double norm = 0.0;
    do {
      for (int i = 0; i < d; ++i) dir[i] = Normal();
      norm = dir.norm();
    } while (norm == 0.0);
    const double r = radius * std::pow(Uniform(), 1.0 / d);
    return center + (r / norm) * dir;
  }

 private:
  static std::uint64_t Mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace geoctl

#endif  // GEOCTL_RANDOM_H_
