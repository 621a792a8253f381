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

#ifndef GEOCTL_REACHABILITY_H_
#define GEOCTL_REACHABILITY_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geoctl/field.h"
#include "geoctl/flow.h"
#include "geoctl/grid.h"
#include "geoctl/random.h"

namespace geoctl {

// Random flow words with each time uniform in [-T, T] and each field index
// uniform. By default every word has length m_max and consecutive legs use
// different fields: a repeated field merges into one leg by the group law, so
// repeats only produce shorter words, which trajectory marking already covers
// as prefixes.
struct WordSampler {
  int m_max = 6;
  double horizon_t = 1.0;
  // false: length uniform in 1..m_max.
  bool full_length = true;
  // false: field indices drawn independently (repeats allowed).
  bool avoid_repeats = true;

  void Validate() const;
  FlowWord Sample(CounterRng& rng, int field_count) const;
};

// Initial set B: a closed ball (radius 0 is a single point) or the occupied
// cells of an earlier estimate.
class SeedRegion {
 public:
  static SeedRegion Ball(Vec center, double radius);
  static SeedRegion FromGrid(OccupancyGrid grid);

  Vec Sample(CounterRng& rng) const;
  // diam({0} u B), the radius that feeds the trajectory bound.
  double DiameterWithOrigin() const;
  int dim() const;
  bool is_ball() const { return !grid_.has_value(); }
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }

 private:
  Vec center_;
  double radius_ = 0.0;
  std::optional<OccupancyGrid> grid_;
  std::vector<std::int64_t> cells_;
};

struct ReachConfig {
  WordSampler sampler;
  GridGeometry grid;
  std::int64_t budget = 1;
  std::uint64_t seed = 0;
  IntegratorConfig integrator;
  // Also mark the endpoint of every leg, not only the final one.
  bool mark_intermediate = true;
  // Also mark points along every leg, at most half the smallest cell width
  // apart (estimated from the speed at the leg start). Each such point is the
  // endpoint of a word with a shortened last time, so it lies in the
  // reachable set as well.
  bool mark_trajectory = true;
  // Common sublinear growth constants of all fields. When set, every trial
  // is guarded by the corresponding safety radius over m_max * T.
  std::optional<double> growth_alpha;
  std::optional<double> growth_beta;
  int threads = 1;
};

struct ReachReport {
  OccupancyGrid grid;
  std::int64_t trials = 0;
  std::int64_t safety_violations = 0;
  std::int64_t integration_failures = 0;
  std::int64_t marked_points = 0;
  std::int64_t outside_points = 0;
  std::optional<double> safety_radius;

  double occupied_fraction() const { return grid.occupied_fraction(); }
};

// Union over `budget` trials of the cells hit by random flow words started
// uniformly in B: a monotone under-approximation of E(B) at grid resolution.
// Trial i uses CounterRng(seed, kReach, i), so the result does not depend on
// the thread count, and running trials [0, n) then [n, m) equals [0, m).
ReachReport EstimateReachable(const FieldSet& fields, const SeedRegion& seed_region,
                              const ReachConfig& cfg);

// Runs trials [first, last) and unions them into `report`.
void ExtendReachable(const FieldSet& fields, const SeedRegion& seed_region,
                     const ReachConfig& cfg, std::int64_t first,
                     std::int64_t last, ReachReport* report);

struct InvarianceStat {
  int field = 0;
  double fraction = 0.0;
  std::int64_t mismatches = 0;
  std::int64_t evaluated = 0;
  // Images that left the grid box; the grid says nothing there, so they are
  // excluded from the fraction.
  std::int64_t escaped = 0;
  std::int64_t failures = 0;
};

// Per field X: fraction of x uniform in the grid box with
// 1_E(e^{tX}(x)) != 1_E(x).
std::vector<InvarianceStat> InvarianceResidual(const OccupancyGrid& set,
                                               const FieldSet& fields, double t,
                                               std::int64_t n_samples,
                                               std::uint64_t seed,
                                               const IntegratorConfig& cfg,
                                               int threads = 1);

struct ZeroOneVerdict {
  std::vector<double> flip_fractions;
  bool monotone = true;
  bool stabilized = false;
  double tolerance = 0.01;
};

// Stabilization of per-cell occupancy across estimates at growing budgets:
// stabilized when the last flip fraction is <= tolerance.
ZeroOneVerdict ZeroOneCheck(const std::vector<OccupancyGrid>& estimates,
                            double tolerance = 0.01);

enum class Alternative { kFull, kNull, kNeither };

struct AlternativeVerdict {
  Alternative verdict = Alternative::kNeither;
  double occupied_fraction = 0.0;
  double tau_full = 0.02;
  double tau_null = 0.02;
};

// full when the occupied fraction is >= 1 - tau_full, null when <= tau_null.
// Both are resolution-limited statements about the Monte Carlo estimate.
AlternativeVerdict AlternativeCheck(const OccupancyGrid& set,
                                    double tau_full = 0.02,
                                    double tau_null = 0.02);

std::string ToString(Alternative a);

}  // namespace geoctl

#endif  // GEOCTL_REACHABILITY_H_
