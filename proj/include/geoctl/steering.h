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

#ifndef GEOCTL_STEERING_H_
#define GEOCTL_STEERING_H_

#include <cstdint>
#include <vector>

#include "geoctl/field.h"
#include "geoctl/flow.h"
#include "json.hpp"

namespace geoctl {

inline IntegratorConfig TightIntegrator() {
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-14;
  return cfg;
}

struct SteerConfig {
  // Longest word the search may grow to.
  int m_max = 12;
  int restarts = 8;
  // Endpoint evaluations (word applications) over all restarts.
  std::int64_t budget = 20000;
  std::uint64_t seed = 0;
  // Radius of the ball around the nominal start searched jointly with the
  // word; 0 pins the start.
  double start_radius = 0.0;
  IntegratorConfig integrator;
  // Independent final check of the endpoint error.
  IntegratorConfig verify_integrator = TightIntegrator();
  int threads = 1;
};

enum class SteerStatus { kSuccess, kFailure };

struct SteeringPlan {
  Vec start;
  Vec target;
  double epsilon = 0.0;
  FlowWord word;
  // |ApplyWord(word, start) - target| under verify_integrator.
  double achieved_error = 0.0;
  std::int64_t evaluations = 0;
  SteerStatus status = SteerStatus::kFailure;
  int restart = -1;

  nlohmann::json ToJson() const;
};

// Two phases per restart. Restart 0 starts from a frame solve at x: the
// displacement y - x is expanded in d fields and depth-1 brackets (chosen to
// maximize |det Y(x)|), giving direct legs for fields and commutator blocks
// of size sqrt|c| for brackets. Other restarts, and every restart when that
// frame is singular, perturb or draw random words. Each restart is refined by
// RefineWord and grows by one random leg on stagnation, up to m_max legs.
// Restarts run in batches of four; the search stops after the first batch
// that reaches eps / 2. The best plan is chosen by (error, evaluations).
SteeringPlan Plan(const FieldSet& fields, const Vec& x, const Vec& y,
                  double epsilon, const SteerConfig& cfg);

struct RefineStats {
  std::int64_t evaluations = 0;
  // Best endpoint error after each evaluation; nonincreasing.
  std::vector<double> error_trace;
};

// Coordinate pattern search over the word's free parameters: one per group
// (legs in a group move together as coefficient * p) and one per ungrouped
// leg. Steps start at 0.1 and halve when no coordinate move improves; the
// search ends at step 1e-12, when the error drops to `stop_error`, or after
// `budget` evaluations. The result is never worse than the input.
FlowWord RefineWord(const FieldSet& fields, const FlowWord& word, const Vec& start,
                    const Vec& target, std::int64_t budget,
                    const IntegratorConfig& cfg, double stop_error = 0.0,
                    RefineStats* stats = nullptr);

}  // namespace geoctl

#endif  // GEOCTL_STEERING_H_
