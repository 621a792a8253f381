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

#ifndef GEOCTL_SUITE_H_
#define GEOCTL_SUITE_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace geoctl {

struct SuiteOptions {
  std::uint64_t seed = 1;
  // Trials for the Heisenberg reachability estimate; the zero-one check
  // compares it against the estimate at half this budget.
  std::int64_t reach_budget = 1'000'000;
  int threads = 1;
  // When nonempty, grid files, CSV tables and a plotting script go here.
  std::string out_dir;
};

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  nlohmann::json metrics;
  // Wall time; reported in the summary table only, never in NDJSON.
  double seconds = 0.0;

  nlohmann::json ToJson() const;
};

// Runs the battery of closed-form and property checks (ids 1..11) on the
// built-in example systems. `progress`, when given, receives one line per
// finished check.
std::vector<CheckResult> RunSuite(const SuiteOptions& options,
                                  std::ostream* progress = nullptr);

// Fixed-width table of id, name, verdict, time and headline metrics.
std::string SummaryTable(const std::vector<CheckResult>& results);

// Python script that plots the CSV tables written by RunSuite.
std::string PlotScript();

}  // namespace geoctl

#endif  // GEOCTL_SUITE_H_
