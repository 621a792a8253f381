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

#ifndef GEOCTL_FLOW_H_
#define GEOCTL_FLOW_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geoctl/field.h"
#include "geoctl/growth.h"
#include "json.hpp"

namespace geoctl {

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  // Step cap used when a step crosses a kink of abs/sign/min/max.
  double kink_max_step = 1e-3;
  std::int64_t max_steps = 10'000'000;
  // When set, integration aborts as soon as |x| exceeds safety->safety_radius.
  std::optional<GrowthBounds> safety;

  // Throws InvalidArgument unless both tolerances lie in (0, 1e-2] and the
  // step limits are positive.
  void Validate() const;
};

class IntegrationError : public Error {
 public:
  enum class Kind { kStepUnderflow, kSafetyRadius, kTooManySteps };

  IntegrationError(Kind kind, const std::string& message, int leg = -1)
      : Error(message), kind_(kind), leg_(leg) {}
  Kind kind() const { return kind_; }
  // Index of the failing leg when raised from ApplyWord, else -1.
  int leg() const { return leg_; }

 private:
  Kind kind_;
  int leg_;
};

struct FlowStats {
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
  std::int64_t evaluations = 0;
  // Largest |x| seen at step boundaries, including the initial point.
  double max_radius = 0.0;
};

// e^{tV}(y0): the solution of x' = V(x), x(0) = y0 at time t, by an adaptive
// Dormand-Prince 5(4) pair. t may be negative; t = 0 returns y0 unchanged.
// Steps that cross a kink of a non-smooth field are capped at kink_max_step
// and accepted from two half steps (first-order accuracy there).
Vec IntegrateFlow(const Field& field, const Vec& y0, double t,
                  const IntegratorConfig& cfg, FlowStats* stats = nullptr);

// States at each of `times`, which must share a sign and be sorted by
// increasing magnitude. The trajectory is continued from one output time to
// the next, so outputs carry the integrator's full accuracy.
std::vector<Vec> IntegrateFlowAt(const Field& field, const Vec& y0,
                                 std::span<const double> times,
                                 const IntegratorConfig& cfg,
                                 FlowStats* stats = nullptr);

// One leg of a flow word. Legs sharing a group >= 0 are driven by a single
// parameter p with time = coefficient * p; search routines perturb p.
struct Leg {
  int field = 0;  // 0-based
  double time = 0.0;
  int group = -1;
  double coefficient = 1.0;
};

// A finite composition of flows, stored in application order: legs[0] acts
// first. As an operator this is e^{t_m X_{j_m}} o ... o e^{t_1 X_{j_1}}.
struct FlowWord {
  std::vector<Leg> legs;

  // Builds a word from operator (composition) order, rightmost acting first.
  static FlowWord FromComposition(std::vector<Leg> composition);

  std::size_t length() const { return legs.size(); }
  bool empty() const { return legs.empty(); }
  // Reversed legs with negated times; applying it undoes this word.
  FlowWord Inverse() const;

  // [{"j": 1-based index, "t": time}, ...] in application order; "g"/"c"
  // appear for grouped legs.
  nlohmann::json ToJson() const;
  static FlowWord FromJson(const nlohmann::json& j);
};

// Applies the word leg by leg. Optionally records the endpoint of every leg.
// IntegrationError from a leg is rethrown carrying that leg's index.
Vec ApplyWord(const FieldSet& fields, const FlowWord& word, const Vec& y0,
              const IntegratorConfig& cfg,
              std::vector<Vec>* leg_endpoints = nullptr,
              FlowStats* stats = nullptr);

// e^{sX_i}, then e^{sX_j}, then e^{-sX_i}, then e^{-sX_j}; the four legs share
// `group` with coefficients (+1, +1, -1, -1). Moves along [X_i, X_j] by about
// s^2 for small s. Indices are 0-based; throws for i == j.
FlowWord CommutatorPrimitive(int i, int j, double s, int group = 0);

// |e^{tV}(e^{sV}(y0)) - e^{(t+s)V}(y0)|.
double GroupLawResidual(const Field& field, const Vec& y0, double s, double t,
                        const IntegratorConfig& cfg);

}  // namespace geoctl

#endif  // GEOCTL_FLOW_H_
