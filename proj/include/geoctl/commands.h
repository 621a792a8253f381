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

#ifndef GEOCTL_COMMANDS_H_
#define GEOCTL_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace geoctl {

inline const std::vector<std::string>& CommandNames() {
  static const std::vector<std::string> names = {
      "bracket", "tower", "hormander", "flow", "word",
      "density", "transport", "reach", "steer", "suite"};
  return names;
}

struct CommandOptions {
  std::string command;
  std::optional<std::string> config_path;
  // Overrides of config values.
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> grid;
  std::optional<std::int64_t> budget;
  std::optional<double> epsilon;
  std::optional<double> time_horizon;
  std::optional<int> threads;
  // Subcommand arguments.
  std::vector<std::string> terms;
  std::optional<std::string> at;  // "x1,x2,..."
  int depth = 2;
  int field = 1;  // 1-based
  std::optional<double> time;
  std::optional<std::string> word;   // JSON, application order
  std::optional<std::string> input;  // RGRID file
};

// Splits "1,[1,2],[[1,2],1]" at commas outside brackets.
std::vector<std::string> SplitTerms(const std::string& text);

// Runs one subcommand. NDJSON records go to `out` (and to
// <out_dir>/<command>.ndjson when an output directory is set); human-readable
// summaries go to `err`. Returns the process exit code: 0 on success, 1 when a
// suite check fails.
int RunCommand(const CommandOptions& options, std::ostream& out, std::ostream& err);

}  // namespace geoctl

#endif  // GEOCTL_COMMANDS_H_
