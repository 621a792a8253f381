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


// Runs the full check battery and prints one PASS/FAIL line per acceptance
// criterion. Exits nonzero when any criterion fails.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "geoctl/suite.h"
#include "json.hpp"

namespace {

constexpr std::uint64_t kSeed = 1;
constexpr std::int64_t kReachBudget = 1'000'000;
constexpr double kReachSeconds = 600.0;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void Report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("criterion %d: %s %s %s\n", id, pass ? "PASS" : "FAIL", what.c_str(),
              detail.c_str());
  std::fflush(stdout);
}

}  // namespace

int main() {
  using geoctl::CheckResult;
  geoctl::SuiteOptions options;
  options.seed = kSeed;
  options.reach_budget = kReachBudget;
  options.threads = 1;
  const std::vector<CheckResult> results = geoctl::RunSuite(options, &std::cerr);

  bool all = true;
  std::string expected;
  for (const CheckResult& r : results) {
    bool pass = r.passed;
    std::string detail = r.metrics.dump();
    if (r.id == 8) {
      pass = pass && r.seconds <= kReachSeconds;
      char t[64];
      std::snprintf(t, sizeof(t), " seconds=%.1f (limit %.0f)", r.seconds, kReachSeconds);
      detail += t;
    }
    Report(r.id, pass, r.name, detail);
    all = all && pass;
    nlohmann::json j = {{"command", "suite"}, {"seed", kSeed}};
    j.update(r.ToJson());
    expected += j.dump() + "\n";
  }

  // Determinism: the CLI with four workers must reproduce the single-worker
  // records byte for byte.
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "geoctl_acceptance_threads4";
  std::filesystem::remove_all(dir);
  const std::string command = std::string(GEOCTL_CLI_PATH) + " suite --seed " +
                              std::to_string(kSeed) + " --budget " +
                              std::to_string(kReachBudget) + " --threads 4 --out " +
                              dir.string() + " > " + (dir.string() + ".stdout") + " 2> " +
                              (dir.string() + ".stderr");
  const int status = std::system(command.c_str());
  const std::string file = ReadFile((dir / "suite.ndjson").string());
  const std::string stdout_copy = ReadFile(dir.string() + ".stdout");
  bool suite_passed = true;
  for (const CheckResult& r : results) suite_passed = suite_passed && r.passed;
  const int expected_exit = suite_passed ? 0 : 1;
  const bool exit_ok = WIFEXITED(status) && WEXITSTATUS(status) == expected_exit;
  const bool same = !file.empty() && file == expected && stdout_copy == expected;
  std::ostringstream d;
  d << "{\"threads\":[1,4],\"identical_ndjson\":" << (same ? "true" : "false")
    << ",\"bytes\":" << file.size() << ",\"cli_exit\":"
    << (WIFEXITED(status) ? WEXITSTATUS(status) : -1) << "}";
  Report(12, same && exit_ok, "determinism", d.str());
  all = all && same && exit_ok;
  std::filesystem::remove_all(dir);
  std::filesystem::remove(dir.string() + ".stdout");
  std::filesystem::remove(dir.string() + ".stderr");
  return all ? 0 : 1;
}
