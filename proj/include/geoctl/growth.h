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

#ifndef GEOCTL_GROWTH_H_
#define GEOCTL_GROWTH_H_

#include <cstdint>
#include <optional>

#include "geoctl/common.h"
#include "geoctl/field.h"

namespace geoctl {

// Radius of a ball that contains every trajectory of a field with
// |V(x)| <= alpha |x| + beta started inside B_diam(0), for |t| <= T:
//   R = ((alpha diam + beta) e^{alpha T} - beta) / alpha,
// and diam + beta T in the limit alpha = 0.
double SafetyRadius(double alpha, double beta, double diam, double horizon_t);

// Sublinear growth constants together with the trajectory radius they imply.
struct GrowthBounds {
  double alpha = 0.0;
  double beta = 0.0;
  double horizon_t = 1.0;
  double diam = 0.0;
  double safety_radius = 0.0;

  static GrowthBounds Make(double alpha, double beta, double diam,
                           double horizon_t);
};

struct SublinearFit {
  double alpha = 0.0;
  double beta = 0.0;
  int samples = 0;
  // The fitted pair fails on a 4x dilation of the region, so it says nothing
  // about growth outside the sampled region.
  bool local_only = false;
};

// Sweeps alpha over {2^k : k = -10..10}; for each alpha takes the smallest
// beta with |F(x_i)| <= alpha |x_i| + beta on the sample set (random points,
// the region corners and the point of the region nearest the origin).
// Reports the smallest alpha attaining the minimal beta.
SublinearFit FitSublinear(const Field& field, const Box& region, int samples,
                          std::uint64_t seed);

// Critical Sobolev exponent p* = p d / (d - p) for 1 <= p < d, +inf for p > d,
// and `placeholder` (any number in [1, inf)) when p == d.
double SobolevConjugate(double p, int dim, double placeholder = 1.0);

// Hoelder conjugate p' with 1/p + 1/p' = 1; 1' = +inf and inf' = 1.
double HolderConjugate(double p);

}  // namespace geoctl

#endif  // GEOCTL_GROWTH_H_
