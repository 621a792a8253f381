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

#include "geoctl/suite.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "geoctl/density.h"
#include "geoctl/field.h"
#include "geoctl/flow.h"
#include "geoctl/grid.h"
#include "geoctl/growth.h"
#include "geoctl/hormander.h"
#include "geoctl/lie_algebra.h"
#include "geoctl/random.h"
#include "geoctl/reachability.h"
#include "geoctl/steering.h"

namespace geoctl {
namespace {

using nlohmann::json;

FieldPtr MakeField(const std::vector<std::string>& e) {
  return VectorField::Parse(e, static_cast<int>(e.size()));
}

struct Systems {
  FieldSet heisenberg = {MakeField({"1", "0", "-x2/2"}), MakeField({"0", "1", "x1/2"})};
  FieldSet grushin = {MakeField({"1", "0"}), MakeField({"0", "x1"})};
  FieldSet rotations = {MakeField({"-x2", "x1", "0"}), MakeField({"0", "-x3", "x2"})};
  FieldSet translations = {MakeField({"1", "0"}), MakeField({"0", "1"})};
  FieldPtr rotation2 = MakeField({"-x2", "x1"});
  FieldPtr linear1 = MakeField({"x1"});
  // |V(x)| <= |x| + 1: an orthogonal linear part plus a perturbation of norm
  // at most 0.7 * sqrt(2).
  FieldPtr sublinear = MakeField({"0.6*x1 - 0.8*x2 + 0.7*sin(x2)",
                                  "0.8*x1 + 0.6*x2 + 0.7*cos(x1)"});
};

json Num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

CheckResult Start(int id, const char* name) {
  CheckResult r;
  r.id = id;
  r.name = name;
  return r;
}

CounterRng Rng(std::uint64_t seed, int check, std::uint64_t i) {
  return CounterRng(seed, Stream::kSuite, (static_cast<std::uint64_t>(check) << 40) + i);
}

class Battery {
 public:
  explicit Battery(const SuiteOptions& o) : opt_(o) {}

  CheckResult BracketExactness() {
    CheckResult r = Start(1, "bracket_exactness");
    double heis = 0.0, grushin = 0.0;
    const Vec e3 = Vec::Unit(3, 2), e2 = Vec::Unit(2, 1);
    for (int i = 0; i < 100; ++i) {
      CounterRng rng = Rng(opt_.seed, 1, i);
      const Vec x3 = rng.UniformInBox(Box::Cube(3, 1.0));
      const Vec x2 = rng.UniformInBox(Box::Cube(2, 1.0));
      heis = std::max(heis, (Bracket(*sys_.heisenberg[0], *sys_.heisenberg[1], x3) - e3)
                                .lpNorm<Eigen::Infinity>());
      grushin = std::max(grushin, (Bracket(*sys_.grushin[0], *sys_.grushin[1], x2) - e2)
                                      .lpNorm<Eigen::Infinity>());
    }
    r.metrics = {{"heisenberg_max_error", heis}, {"grushin_max_error", grushin}};
    r.passed = heis <= 1e-6 && grushin <= 1e-6;
    return r;
  }

  CheckResult DivergenceOfBracket() {
    CheckResult r = Start(2, "divergence_of_bracket");
    const FieldPtr u2 = MakeField({"x1^2 - x2", "x1*x2"});
    const FieldPtr v2 = MakeField({"x2^3", "x1 + x1^2*x2"});
    const FieldPtr u3 = MakeField({"x1*x2", "x2^2 - x3", "x1*x3^2"});
    const FieldPtr v3 = MakeField({"x3", "x1^2*x2", "x2*x3 + x1"});
    const double r2 = BracketIdentityResidual(u2, v2, Box::Cube(2, 1.0), 100, opt_.seed);
    const double r3 = BracketIdentityResidual(u3, v3, Box::Cube(3, 1.0), 100, opt_.seed);
    r.metrics = {{"planar_residual", r2}, {"spatial_residual", r3}};
    r.passed = r2 <= 1e-4 && r3 <= 1e-4;
    return r;
  }

  CheckResult LiouvilleDensityCheck() {
    CheckResult r = Start(3, "liouville_density");
    const IntegratorConfig cfg;
    double linear = 0.0, rotation = 0.0;
    for (double t : {-1.0, -0.5, 0.5, 1.0}) {
      for (double y : {0.3, -0.7}) {
        const DensityRecord rec = LiouvilleDensity(*sys_.linear1, Vec::Constant(1, y), t, cfg);
        linear = std::max(linear, std::abs(rec.rho - std::exp(-t)));
      }
      Vec y(2);
      y << 0.4, -0.2;
      rotation = std::max(rotation,
                          std::abs(LiouvilleDensity(*sys_.rotation2, y, t, cfg).rho - 1.0));
    }
    r.metrics = {{"linear_max_error", linear}, {"rotation_max_error", rotation}};
    r.passed = linear <= 1e-6 && rotation <= 1e-8;
    return r;
  }

  CheckResult TaylorRemainderCheck() {
    CheckResult r = Start(4, "taylor_remainder");
    const IntegratorConfig cfg;
    const std::vector<double> times = {0.2, 0.1, 0.05, 0.025};
    const TestFunction f1(Box(Vec::Constant(1, -0.5), Vec::Constant(1, 0.7)), "1 + x1");
    std::vector<double> remainders;
    for (double t : times) {
      TaylorOptions o;
      o.threads = opt_.threads;
      remainders.push_back(TaylorRemainder(*sys_.linear1, f1, t, cfg, o).remainder);
    }
    const double slope = LogLogSlope(times, remainders);

    Vec lo(2), hi(2);
    lo << -0.5, -0.4;
    hi << 0.6, 0.5;
    const TestFunction f2(Box(lo, hi), "1 + x1");
    json rot = json::array();
    bool rot_ok = true;
    for (double t : times) {
      TaylorOptions o;
      o.method = IntegrationMethod::kMonteCarlo;
      o.samples = 200000;
      o.seed = opt_.seed;
      o.threads = opt_.threads;
      const TaylorResult tr = TaylorRemainder(*sys_.rotation2, f2, t, cfg, o);
      rot_ok = rot_ok && std::abs(tr.remainder) <= 3.0 * tr.std_error;
      rot.push_back({{"t", t}, {"remainder", tr.remainder}, {"std_error", tr.std_error}});
    }
    r.metrics = {{"linear_remainders", remainders}, {"linear_loglog_slope", slope},
                 {"rotation", rot}};
    r.passed = slope >= 1.9 && rot_ok;
    return r;
  }

  CheckResult SafetyRadiusCheck() {
    CheckResult r = Start(5, "safety_radius");
    const GrowthBounds gb = GrowthBounds::Make(1.0, 1.0, 2.0, 1.0);
    const double expected = 3.0 * std::exp(1.0) - 1.0;
    // Dense check of the growth certificate.
    double worst_margin = -1e300;
    for (int i = 0; i < 10000; ++i) {
      CounterRng rng = Rng(opt_.seed, 5, i);
      const Vec x = rng.UniformInBox(Box::Cube(2, 5.0));
      worst_margin = std::max(worst_margin, (*sys_.sublinear)(x).norm() - x.norm() - 1.0);
    }
    IntegratorConfig cfg;
    cfg.safety = gb;
    std::int64_t violations = 0, failures = 0;
    double max_radius = 0.0;
    for (int i = 0; i < 10000; ++i) {
      CounterRng rng = Rng(opt_.seed, 5, 100000 + i);
      const Vec x0 = rng.UniformInBall(Vec::Zero(2), 1.0);
      const double t = rng.Uniform(-1.0, 1.0);
      FlowStats stats;
      try {
        IntegrateFlow(*sys_.sublinear, x0, t, cfg, &stats);
      } catch (const IntegrationError& e) {
        if (e.kind() == IntegrationError::Kind::kSafetyRadius) {
          ++violations;
        } else {
          ++failures;
        }
      }
      max_radius = std::max(max_radius, stats.max_radius);
    }
    r.metrics = {{"safety_radius", gb.safety_radius}, {"expected_radius", expected},
                 {"certificate_margin", worst_margin}, {"violations", violations},
                 {"failures", failures}, {"max_radius", max_radius}};
    r.passed = std::abs(gb.safety_radius - expected) <= 1e-12 && worst_margin <= 0.0 &&
               violations == 0 && failures == 0 && max_radius <= gb.safety_radius;
    return r;
  }

  CheckResult GroupLaw() {
    CheckResult r = Start(6, "group_law");
    const IntegratorConfig cfg;
    const std::vector<std::pair<std::string, FieldPtr>> fields = {
        {"heisenberg_x1", sys_.heisenberg[0]}, {"heisenberg_x2", sys_.heisenberg[1]},
        {"grushin_x2", sys_.grushin[1]},       {"rotation", sys_.rotation2},
        {"linear", sys_.linear1},              {"sublinear", sys_.sublinear}};
    json per = json::object();
    double worst = 0.0;
    int k = 0;
    for (const auto& [name, f] : fields) {
      double m = 0.0;
      for (int i = 0; i < 100; ++i) {
        CounterRng rng = Rng(opt_.seed, 6, k * 1000 + i);
        const Vec y = rng.UniformInBox(Box::Cube(f->dim(), 1.0));
        const double s = rng.Uniform(-1.0, 1.0);
        const double t = rng.Uniform(-1.0, 1.0);
        m = std::max(m, GroupLawResidual(*f, y, s, t, cfg));
      }
      per[name] = m;
      worst = std::max(worst, m);
      ++k;
    }
    r.metrics = {{"max_residual", worst}, {"per_field", per}};
    r.passed = worst <= 1e-6;
    return r;
  }

  CheckResult HormanderScans() {
    CheckResult r = Start(7, "hormander_scans");
    HormanderOptions o;
    o.n_samples = 10000;
    o.seed = opt_.seed;
    o.threads = opt_.threads;
    const std::vector<BracketTerm> triple = {BracketTerm::Parse("1"), BracketTerm::Parse("2"),
                                             BracketTerm::Parse("[1,2]")};
    const HormanderReport heis = HormanderScan(sys_.heisenberg, triple, Box::Cube(3, 1.0), o);
    const HormanderReport rot = HormanderScan(sys_.rotations, triple, Box::Cube(3, 1.0), o);
    const HormanderReport gru =
        HormanderScan(sys_.grushin, {BracketTerm::Parse("1"), BracketTerm::Parse("[1,2]")},
                      Box::Cube(2, 1.0), o);
    HormanderOptions serial = o;
    serial.threads = 1;
    const bool repeatable =
        HormanderScan(sys_.heisenberg, triple, Box::Cube(3, 1.0), serial).ToJson() ==
        heis.ToJson();
    r.metrics = {{"heisenberg", {{"singular_fraction", heis.singular_fraction},
                                 {"min_abs_det", heis.min_abs_det},
                                 {"max_condition_number", Num(heis.max_condition_number)}}},
                 {"rotation", {{"singular_fraction", rot.singular_fraction}}},
                 {"grushin", {{"singular_fraction", gru.singular_fraction},
                              {"min_abs_det", gru.min_abs_det}}},
                 {"repeatable", repeatable}};
    r.passed = heis.singular_fraction == 0.0 && std::abs(heis.min_abs_det - 1.0) <= 1e-9 &&
               rot.singular_fraction == 1.0 && std::abs(gru.min_abs_det - 1.0) <= 1e-9 &&
               repeatable;
    return r;
  }

  CheckResult Reachability() {
    CheckResult r = Start(8, "reachability");
    ReachConfig cfg;
    cfg.grid = GridGeometry::Uniform(Box::Cube(3, 1.0), 64);
    cfg.budget = opt_.reach_budget;
    cfg.seed = opt_.seed;
    cfg.threads = opt_.threads;
    const SeedRegion seed = SeedRegion::Ball(Vec::Zero(3), 0.1);
    ReachReport rep;
    rep.grid = OccupancyGrid(cfg.grid);
    const std::int64_t half = cfg.budget / 2;
    ExtendReachable(sys_.heisenberg, seed, cfg, 0, half, &rep);
    const OccupancyGrid at_half = rep.grid;
    ExtendReachable(sys_.heisenberg, seed, cfg, half, cfg.budget, &rep);
    const ZeroOneVerdict zo = ZeroOneCheck({at_half, rep.grid});
    const AlternativeVerdict alt = AlternativeCheck(rep.grid);
    heisenberg_set_ = rep.grid;
    r.metrics = {{"budget", cfg.budget},
                 {"occupied_fraction", rep.grid.occupied_fraction()},
                 {"half_budget_fraction", at_half.occupied_fraction()},
                 {"flip_fraction", zo.flip_fractions.back()},
                 {"integration_failures", rep.integration_failures},
                 {"outside_points", rep.outside_points},
                 {"alternative", ToString(alt.verdict)}};
    r.passed = rep.grid.occupied_fraction() >= 0.99 && zo.flip_fractions.back() <= 0.01;
    if (!opt_.out_dir.empty()) {
      std::ofstream g(opt_.out_dir + "/heisenberg_reach.rgrid");
      rep.grid.WriteRgrid(g);
      WriteSlice(rep.grid, opt_.out_dir + "/heisenberg_slice.csv");
    }
    return r;
  }

  CheckResult Obstruction() {
    CheckResult r = Start(9, "sphere_obstruction");
    ReachConfig cfg;
    cfg.grid = GridGeometry::Uniform(Box::Cube(3, 1.0), 64);
    cfg.budget = std::min<std::int64_t>(opt_.reach_budget, 100000);
    cfg.seed = opt_.seed;
    cfg.threads = opt_.threads;
    Vec x0 = Vec::Zero(3);
    x0[0] = 0.5;
    const ReachReport rep =
        EstimateReachable(sys_.rotations, SeedRegion::Ball(x0, 0.0), cfg);
    const GridGeometry& geo = rep.grid.geometry();
    double worst = 0.0;
    for (std::int64_t c = 0; c < geo.cell_count(); ++c) {
      if (rep.grid.Test(c)) worst = std::max(worst, std::abs(geo.CellCenter(c).norm() - 0.5));
    }
    const AlternativeVerdict alt = AlternativeCheck(rep.grid);
    r.metrics = {{"budget", cfg.budget},
                 {"occupied_fraction", rep.grid.occupied_fraction()},
                 {"max_radius_deviation", worst},
                 {"allowed_deviation", 2.0 * geo.cell_diagonal()},
                 {"alternative", ToString(alt.verdict)}};
    r.passed = rep.grid.count() > 0 && worst <= 2.0 * geo.cell_diagonal() &&
               alt.verdict != Alternative::kFull;
    if (!opt_.out_dir.empty()) {
      std::ofstream g(opt_.out_dir + "/rotation_shell.rgrid");
      rep.grid.WriteRgrid(g);
      WriteSlice(rep.grid, opt_.out_dir + "/rotation_slice.csv");
    }
    return r;
  }

  CheckResult Invariance() {
    CheckResult r = Start(10, "invariance");
    if (!heisenberg_set_) Reachability();
    const OccupancyGrid& fine = *heisenberg_set_;
    const OccupancyGrid coarse = fine.Coarsen(2);
    const IntegratorConfig cfg;
    const auto stats = InvarianceResidual(fine, sys_.heisenberg, 0.3, 100000, opt_.seed, cfg,
                                          opt_.threads);
    Vec lo(3), hi(3);
    lo << -0.8, -0.75, -0.7;
    hi << 0.75, 0.8, 0.75;
    const TestFunction phi(Box(lo, hi), "1 + x1 + x2*x3");
    json inv = json::array();
    bool ok = true;
    for (const InvarianceStat& s : stats) {
      inv.push_back({{"field", s.field + 1}, {"fraction", s.fraction},
                     {"evaluated", s.evaluated}, {"escaped", s.escaped}});
      ok = ok && s.fraction <= 0.02;
    }
    json transport = json::array();
    std::ostringstream csv;
    csv << "resolution,quantity,residual\n";
    auto record = [&](const std::string& name, double r32, double r64) {
      transport.push_back({{"quantity", name}, {"residual_32", r32}, {"residual_64", r64}});
      ok = ok && std::abs(r64) < std::abs(r32);
      char line[160];
      std::snprintf(line, sizeof(line), "32,%s,%.17g\n64,%s,%.17g\n", name.c_str(), r32,
                    name.c_str(), r64);
      csv << line;
    };
    for (int i = 0; i < 2; ++i) {
      record("transport_x" + std::to_string(i + 1),
             TransportResidual(coarse, *sys_.heisenberg[i], phi),
             TransportResidual(fine, *sys_.heisenberg[i], phi));
    }
    record("bracket_transport_x1_x2",
           BracketTransportResidual(coarse, sys_.heisenberg[0], sys_.heisenberg[1], phi),
           BracketTransportResidual(fine, sys_.heisenberg[0], sys_.heisenberg[1], phi));
    r.metrics = {{"invariance", inv}, {"transport", transport}};
    r.passed = ok;
    if (!opt_.out_dir.empty()) {
      std::ofstream(opt_.out_dir + "/residuals.csv") << csv.str();
    }
    return r;
  }

  CheckResult Steering() {
    CheckResult r = Start(11, "steering");
    SteerConfig cfg;
    cfg.budget = 20000;
    cfg.seed = opt_.seed;
    cfg.threads = opt_.threads;
    Vec target(3);
    target << 0.0, 0.0, 0.25;
    const SteeringPlan heis = Plan(sys_.heisenberg, Vec::Zero(3), target, 1e-3, cfg);
    bool has_block = false;
    for (const Leg& leg : heis.word.legs) has_block |= leg.coefficient < 0.0;

    Vec y2(2);
    y2 << 0.3, -0.7;
    const SteeringPlan trans = Plan(sys_.translations, Vec::Zero(2), y2, 1e-9, cfg);

    Vec x3 = Vec::Zero(3), y3 = Vec::Zero(3);
    x3[0] = 0.5;
    y3[1] = 0.9;
    const SteeringPlan rot = Plan(sys_.rotations, x3, y3, 0.05, cfg);
    r.metrics = {{"heisenberg", heis.ToJson()},
                 {"translation", trans.ToJson()},
                 {"rotation", rot.ToJson()}};
    r.passed = heis.status == SteerStatus::kSuccess && heis.evaluations <= 20000 &&
               has_block && trans.status == SteerStatus::kSuccess &&
               trans.achieved_error <= 1e-12 && rot.status == SteerStatus::kFailure &&
               rot.achieved_error >= 0.35;
    return r;
  }

 private:
  // Cells of the middle layer along the last axis.
  static void WriteSlice(const OccupancyGrid& grid, const std::string& path) {
    const GridGeometry& geo = grid.geometry();
    const int mid = geo.resolution().back() / 2;
    std::ofstream out(path);
    out << "x1,x2,occupied\n";
    for (std::int64_t c = 0; c < geo.cell_count(); ++c) {
      const std::vector<int> cell = geo.Unravel(c);
      if (cell.back() != mid) continue;
      const Vec x = geo.CellCenter(c);
      char line[96];
      std::snprintf(line, sizeof(line), "%.9g,%.9g,%d\n", x[0], x[1], grid.Test(c) ? 1 : 0);
      out << line;
    }
  }

  SuiteOptions opt_;
  Systems sys_;
  std::optional<OccupancyGrid> heisenberg_set_;
};

}  // namespace

json CheckResult::ToJson() const {
  return {{"check", id}, {"name", name}, {"pass", passed}, {"metrics", metrics}};
}

std::vector<CheckResult> RunSuite(const SuiteOptions& options, std::ostream* progress) {
  if (!options.out_dir.empty()) std::filesystem::create_directories(options.out_dir);
  Battery battery(options);
  const std::vector<std::function<CheckResult()>> checks = {
      [&] { return battery.BracketExactness(); },
      [&] { return battery.DivergenceOfBracket(); },
      [&] { return battery.LiouvilleDensityCheck(); },
      [&] { return battery.TaylorRemainderCheck(); },
      [&] { return battery.SafetyRadiusCheck(); },
      [&] { return battery.GroupLaw(); },
      [&] { return battery.HormanderScans(); },
      [&] { return battery.Reachability(); },
      [&] { return battery.Obstruction(); },
      [&] { return battery.Invariance(); },
      [&] { return battery.Steering(); },
  };
  std::vector<CheckResult> results;
  for (const auto& run : checks) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r.id = static_cast<int>(results.size()) + 1;
      r.name = "check_" + std::to_string(r.id);
      r.passed = false;
      r.metrics = {{"error", e.what()}};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (progress) {
      *progress << "check " << r.id << " " << r.name << ": " << (r.passed ? "pass" : "FAIL")
                << " (" << r.seconds << " s)\n";
      progress->flush();
    }
    results.push_back(std::move(r));
  }
  return results;
}

std::string SummaryTable(const std::vector<CheckResult>& results) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-4s %-24s %-6s %9s\n", "id", "check", "result", "seconds");
  out << line;
  int passed = 0;
  for (const CheckResult& r : results) {
    std::snprintf(line, sizeof(line), "%-4d %-24s %-6s %9.2f\n", r.id, r.name.c_str(),
                  r.passed ? "pass" : "FAIL", r.seconds);
    out << line;
    passed += r.passed;
  }
  out << passed << "/" << results.size() << " checks passed\n";
  return out.str();
}

std::string PlotScript() {
  return R"(#!/usr/bin/env python3
# Plots the tables written by `geoctl suite --out DIR`. Usage: plot_suite.py DIR
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

out = sys.argv[1] if len(sys.argv) > 1 else "."


def read(name):
    path = os.path.join(out, name)
    if not os.path.exists(path):
        return None
    with open(path) as f:
        return list(csv.DictReader(f))


fig, axes = plt.subplots(1, 3, figsize=(15, 4.5))
for ax, name, title in ((axes[0], "heisenberg_slice.csv", "Heisenberg estimate, middle x3 layer"),
                        (axes[1], "rotation_slice.csv", "rotation shell, middle x3 layer")):
    rows = read(name)
    if rows:
        xs = [float(r["x1"]) for r in rows if r["occupied"] == "1"]
        ys = [float(r["x2"]) for r in rows if r["occupied"] == "1"]
        ax.scatter(xs, ys, s=4, marker="s")
        ax.set_xlim(-1, 1)
        ax.set_ylim(-1, 1)
        ax.set_aspect("equal")
    ax.set_title(title)

rows = read("residuals.csv")
if rows:
    quantities = sorted({r["quantity"] for r in rows})
    for q in quantities:
        pts = sorted((int(r["resolution"]), abs(float(r["residual"]))) for r in rows
                     if r["quantity"] == q)
        axes[2].loglog([p[0] for p in pts], [max(p[1], 1e-300) for p in pts], "o-", label=q)
    axes[2].set_xlabel("grid resolution per axis")
    axes[2].set_ylabel("|residual|")
    axes[2].legend()
    axes[2].set_title("transport residuals vs refinement")

fig.tight_layout()
fig.savefig(os.path.join(out, "suite.png"), dpi=120)
print("wrote", os.path.join(out, "suite.png"))
)";
}

}  // namespace geoctl
