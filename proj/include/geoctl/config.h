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

#ifndef GEOCTL_CONFIG_H_
#define GEOCTL_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geoctl/common.h"
#include "geoctl/field.h"
#include "geoctl/flow.h"
#include "geoctl/hormander.h"
#include "geoctl/lie_algebra.h"
#include "json.hpp"

namespace geoctl {

// Validation failure at a JSON pointer such as "/fields/1/2".
class ConfigError : public Error {
 public:
  ConfigError(const std::string& pointer, const std::string& message)
      : Error(pointer + ": " + message), pointer_(pointer) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

struct TestFunctionSpec {
  Box support;
  std::string expression = "1";
};

struct LocalBoxSpec {
  Box box;
  std::vector<std::string> terms;
};

struct HormanderSection {
  // Empty: selected from the depth <= 2 tower.
  std::vector<std::string> terms;
  std::int64_t n_samples = 10000;
  double det_tol = 1e-9;
  std::optional<DeclaredExponents> exponents;
  bool flow_generation = false;
  bool divergence_regularity = false;
  std::vector<LocalBoxSpec> boxes;
};

struct ReachSection {
  Vec seed_center;  // defaults to the origin
  double seed_radius = 0.1;
  int m_max = 6;
  double time_horizon = 1.0;
  std::int64_t budget = 100000;
  int grid = 64;
  std::optional<Box> grid_box;  // defaults to the region
  std::optional<double> growth_alpha;
  std::optional<double> growth_beta;
  bool mark_trajectory = true;
};

struct SteerSection {
  Vec start;   // defaults to the origin
  Vec target;  // defaults to the origin
  double epsilon = 1e-3;
  int m_max = 12;
  int restarts = 8;
  std::int64_t budget = 20000;
  double start_radius = 0.0;
};

struct DensitySection {
  Vec at;  // defaults to the origin
  std::vector<double> times = {0.5, 1.0};
  std::optional<TestFunctionSpec> test_function;
  std::int64_t samples = 200000;
  // Flow time for invariance residuals.
  double invariance_time = 0.3;
  std::int64_t invariance_samples = 100000;
};

struct ExperimentConfig {
  std::string name = "experiment";
  int dim = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::string>> fields;
  double fd_step = 1e-5;
  Box region;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int threads = 1;
  std::string output_dir;
  HormanderSection hormander;
  ReachSection reach;
  SteerSection steer;
  DensitySection density;

  // Throws ConfigError with the offending JSON pointer.
  static ExperimentConfig FromJson(const nlohmann::json& j);
  static ExperimentConfig Load(const std::string& path);
  // Every field, defaults included, so FromJson(ToJson()) reproduces it.
  nlohmann::json ToJson() const;

  FieldSet BuildFields() const;
  IntegratorConfig Integrator() const;
  std::vector<BracketTerm> Terms(const std::vector<std::string>& texts,
                                 const std::string& pointer) const;
};

}  // namespace geoctl

#endif  // GEOCTL_CONFIG_H_
