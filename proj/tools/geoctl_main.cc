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

// Command-line front end: geoctl <subcommand> [options].

#include <iostream>

#include "CLI11.hpp"
#include "geoctl/commands.h"
#include "geoctl/config.h"

int main(int argc, char** argv) {
  CLI::App app{"Geometric control toolkit: brackets, flows, reachability and steering"};
  app.require_subcommand(1);
  geoctl::CommandOptions opt;
  std::string terms_text;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "Experiment config (JSON)");
    sub->add_option("--seed", opt.seed, "Root seed (overrides the config)");
    sub->add_option("--out", opt.out_dir, "Output directory for NDJSON and grid files");
    sub->add_option("--grid", opt.grid, "Grid cells per axis")->check(CLI::PositiveNumber);
    sub->add_option("--budget", opt.budget, "Trial or evaluation budget")
        ->check(CLI::PositiveNumber);
    sub->add_option("--epsilon", opt.epsilon, "Steering tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--time-horizon", opt.time_horizon, "Word time horizon T")
        ->check(CLI::PositiveNumber);
    sub->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
  };

  struct Spec {
    const char* name;
    const char* help;
  };
  const Spec specs[] = {
      {"bracket", "Evaluate bracket terms at a point"},
      {"tower", "List the bracket tower up to --depth"},
      {"hormander", "Scan the region for bracket-frame invertibility"},
      {"flow", "Integrate one field from a point"},
      {"word", "Apply a flow word from a point"},
      {"density", "Pushforward density and Taylor remainder"},
      {"transport", "Invariance and transport residuals of a set"},
      {"reach", "Monte Carlo reachable-set estimate"},
      {"steer", "Search for a word steering start to target"},
      {"suite", "Run the full check battery"},
  };
  for (const Spec& s : specs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub);
    const std::string name = s.name;
    if (name == "bracket") {
      sub->add_option("--terms", terms_text,
                      "Bracket terms separated by top-level commas, e.g. \"1,[1,2]\"")
          ->required();
    }
    if (name == "tower") sub->add_option("--depth", opt.depth, "Maximum bracket depth");
    if (name == "bracket" || name == "tower" || name == "flow" || name == "word" ||
        name == "density" || name == "steer") {
      sub->add_option("--at", opt.at, "Point as comma-separated coordinates");
    }
    if (name == "flow" || name == "density") {
      sub->add_option("--field", opt.field, "Field index (1-based)");
    }
    if (name == "flow") sub->add_option("--time", opt.time, "Flow time");
    if (name == "word") {
      sub->add_option("--word", opt.word, "JSON legs [{\"j\":1,\"t\":0.5},...]")->required();
    }
    if (name == "transport") sub->add_option("--input", opt.input, "RGRID file to test");
    sub->callback([&opt, name] { opt.command = name; });
  }

  CLI11_PARSE(app, argc, argv);
  opt.terms = geoctl::SplitTerms(terms_text);

  try {
    return geoctl::RunCommand(opt, std::cout, std::cerr);
  } catch (const geoctl::ConfigError& e) {
    std::cerr << "config error at " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
