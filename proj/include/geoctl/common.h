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

#ifndef GEOCTL_COMMON_H_
#define GEOCTL_COMMON_H_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace geoctl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Expression text could not be parsed. `position` is a 0-based byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// A field, derivative or integrand produced NaN or Inf.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

// Forward-mode differentiation hit a non-differentiable point of abs, sign,
// min or max.
class KinkError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Axis-aligned closed box [lo, hi].
struct Box {
  Vec lo;
  Vec hi;

  Box() = default;
  Box(Vec lo_, Vec hi_);
  static Box Cube(int dim, double half_width);

  int dim() const { return static_cast<int>(lo.size()); }
  Vec Width() const { return hi - lo; }
  Vec Center() const { return 0.5 * (lo + hi); }
  double Volume() const;
  bool Contains(const Vec& x) const;
  bool Intersects(const Box& other) const;
  // Smallest Euclidean norm over points of the box.
  Vec ClosestToOrigin() const;
};

inline Box::Box(Vec lo_, Vec hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size() || lo.size() == 0) {
    throw DimensionError("box corners must have equal positive dimension");
  }
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!(lo[i] < hi[i])) throw InvalidArgument("degenerate box");
  }
}

inline Box Box::Cube(int dim, double half_width) {
  return Box(Vec::Constant(dim, -half_width), Vec::Constant(dim, half_width));
}

inline double Box::Volume() const { return (hi - lo).prod(); }

inline bool Box::Contains(const Vec& x) const {
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  }
  return true;
}

inline bool Box::Intersects(const Box& other) const {
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (hi[i] < other.lo[i] || other.hi[i] < lo[i]) return false;
  }
  return true;
}

inline Vec Box::ClosestToOrigin() const {
  return Vec::Zero(lo.size()).cwiseMax(lo).cwiseMin(hi);
}

inline bool AllFinite(const Vec& v) { return v.allFinite(); }

}  // namespace geoctl

#endif  // GEOCTL_COMMON_H_
