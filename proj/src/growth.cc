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

#include "geoctl/growth.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "geoctl/random.h"

namespace geoctl {

double SafetyRadius(double alpha, double beta, double diam, double horizon_t) {
  if (alpha < 0.0 || beta < 0.0 || diam < 0.0 || horizon_t < 0.0) {
    throw InvalidArgument("safety radius inputs must be nonnegative");
  }
  if (alpha == 0.0) return diam + beta * horizon_t;
  // Same value as ((alpha diam + beta) e^{aT} - beta) / alpha, without the
  // cancellation for small alpha.
  const double at = alpha * horizon_t;
  if (at == 0.0) return diam;
  return diam * std::exp(at) + beta * std::expm1(at) / alpha;
}

GrowthBounds GrowthBounds::Make(double alpha, double beta, double diam,
                                double horizon_t) {
  if (!(horizon_t > 0.0)) throw InvalidArgument("horizon must be positive");
  GrowthBounds g;
  g.alpha = alpha;
  g.beta = beta;
  g.diam = diam;
  g.horizon_t = horizon_t;
  g.safety_radius = SafetyRadius(alpha, beta, diam, horizon_t);
  if (!std::isfinite(g.safety_radius)) {
    throw NonFiniteError("safety radius overflow");
  }
  return g;
}

SublinearFit FitSublinear(const Field& field, const Box& region, int samples,
                          std::uint64_t seed) {
  if (samples < 1) throw InvalidArgument("samples must be >= 1");
  const int d = region.dim();
  std::vector<Vec> points;
  points.push_back(region.ClosestToOrigin());
  for (int mask = 0; mask < (1 << std::min(d, 12)); ++mask) {
    Vec c(d);
    for (int k = 0; k < d; ++k) {
      c[k] = (k < 12 && (mask >> k) & 1) ? region.hi[k] : region.lo[k];
    }
    points.push_back(c);
  }
  for (int i = 0; i < samples; ++i) {
    CounterRng rng(seed, Stream::kSublinearFit, static_cast<std::uint64_t>(i));
    points.push_back(rng.UniformInBox(region));
  }
  std::vector<double> radius(points.size());
  std::vector<double> magnitude(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    radius[i] = points[i].norm();
    magnitude[i] = field(points[i]).norm();
  }
  auto beta_for = [&](double alpha) {
    double beta = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      beta = std::max(beta, magnitude[i] - alpha * radius[i]);
    }
    return beta;
  };

  std::vector<std::pair<double, double>> sweep;
  double best_beta = std::numeric_limits<double>::infinity();
  for (int k = -10; k <= 10; ++k) {
    const double alpha = std::ldexp(1.0, k);
    const double beta = beta_for(alpha);
    sweep.emplace_back(alpha, beta);
    best_beta = std::min(best_beta, beta);
  }
  SublinearFit fit;
  fit.samples = static_cast<int>(points.size());
  for (const auto& [alpha, beta] : sweep) {
    if (beta <= best_beta * (1.0 + 1e-12) + 1e-15) {
      fit.alpha = alpha;
      fit.beta = beta;
      break;
    }
  }

  // Probe a dilated copy of the region for violations of the fitted bound.
  const Box probe(4.0 * region.lo - 3.0 * region.ClosestToOrigin(),
                  4.0 * region.hi - 3.0 * region.ClosestToOrigin());
  for (int i = 0; i < std::max(samples, 64) && !fit.local_only; ++i) {
    CounterRng rng(seed ^ 0x5bd1e995ULL, Stream::kSublinearFit,
                   static_cast<std::uint64_t>(i));
    const Vec x = rng.UniformInBox(probe);
    double m = 0.0;
    try {
      m = field(x).norm();
    } catch (const NonFiniteError&) {
      fit.local_only = true;
      break;
    }
    if (m > fit.alpha * x.norm() + fit.beta + 1e-12 * (1.0 + m)) {
      fit.local_only = true;
    }
  }
  return fit;
}

double SobolevConjugate(double p, int dim, double placeholder) {
  if (!(p >= 1.0)) throw InvalidArgument("Sobolev exponent must be >= 1");
  if (dim < 1) throw DimensionError("dimension must be positive");
  if (p < dim) return p * dim / (dim - p);
  if (p > dim) return std::numeric_limits<double>::infinity();
  if (!(placeholder >= 1.0) || !std::isfinite(placeholder)) {
    throw InvalidArgument("placeholder for p == d must lie in [1, inf)");
  }
  return placeholder;
}

double HolderConjugate(double p) {
  if (!(p >= 1.0)) throw InvalidArgument("exponent must be >= 1");
  if (std::isinf(p)) return 1.0;
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  return p / (p - 1.0);
}

}  // namespace geoctl
