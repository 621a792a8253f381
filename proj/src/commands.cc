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

#include "geoctl/commands.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "geoctl/config.h"
#include "geoctl/density.h"
#include "geoctl/flow.h"
#include "geoctl/grid.h"
#include "geoctl/hormander.h"
#include "geoctl/lie_algebra.h"
#include "geoctl/reachability.h"
#include "geoctl/steering.h"
#include "geoctl/suite.h"

namespace geoctl {
namespace {

using nlohmann::json;

json VecJson(const Vec& v) { return std::vector<double>(v.begin(), v.end()); }

Vec ParsePoint(const std::string& text, int dim) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used == 0 || used != item.size()) {
      throw InvalidArgument("--at: malformed coordinate '" + item + "'");
    }
    values.push_back(v);
  }
  if (static_cast<int>(values.size()) != dim) {
    throw DimensionError("--at: expected " + std::to_string(dim) + " coordinates, got " +
                         std::to_string(values.size()));
  }
  return Eigen::Map<const Vec>(values.data(), dim);
}

// Writes records to the stream and, when a directory is set, to a file.
class Emitter {
 public:
  Emitter(std::ostream& out, const std::string& dir, const std::string& command) : out_(out) {
    if (!dir.empty()) {
      std::filesystem::create_directories(dir);
      file_ = std::make_unique<std::ofstream>(dir + "/" + command + ".ndjson");
    }
  }
  void operator()(const json& record) {
    const std::string line = record.dump();
    out_ << line << '\n';
    if (file_) *file_ << line << '\n';
  }

 private:
  std::ostream& out_;
  std::unique_ptr<std::ofstream> file_;
};

class Runner {
 public:
  Runner(const CommandOptions& o, std::ostream& out, std::ostream& err)
      : opt_(o), out_(out), err_(err) {}

  int Run() {
    const std::string& c = opt_.command;
    if (c == "suite") return Suite();
    if (!opt_.config_path) throw InvalidArgument("'" + c + "' needs --config PATH");
    cfg_ = ExperimentConfig::Load(*opt_.config_path);
    ApplyOverrides();
    fields_ = cfg_.BuildFields();
    emit_ = std::make_unique<Emitter>(out_, cfg_.output_dir, c);
    if (c == "bracket") return Bracket();
    if (c == "tower") return Tower();
    if (c == "hormander") return Hormander();
    if (c == "flow") return Flow();
    if (c == "word") return Word();
    if (c == "density") return Density();
    if (c == "transport") return Transport();
    if (c == "reach") return Reach();
    if (c == "steer") return Steer();
    throw InvalidArgument("unknown subcommand '" + c + "'");
  }

 private:
  void ApplyOverrides() {
    if (opt_.seed) cfg_.seed = *opt_.seed;
    if (opt_.out_dir) cfg_.output_dir = *opt_.out_dir;
    if (opt_.threads) cfg_.threads = *opt_.threads;
    if (opt_.grid) cfg_.reach.grid = *opt_.grid;
    if (opt_.budget) {
      if (opt_.command == "steer") {
        cfg_.steer.budget = *opt_.budget;
      } else {
        cfg_.reach.budget = *opt_.budget;
      }
    }
    if (opt_.epsilon) cfg_.steer.epsilon = *opt_.epsilon;
    if (opt_.time_horizon) cfg_.reach.time_horizon = *opt_.time_horizon;
    if (cfg_.threads < 1) throw InvalidArgument("--threads must be >= 1");
    if (cfg_.reach.grid < 1) throw InvalidArgument("--grid must be >= 1");
    if (cfg_.reach.budget < 1 || cfg_.steer.budget < 1) {
      throw InvalidArgument("--budget must be >= 1");
    }
    if (!(cfg_.steer.epsilon > 0.0)) throw InvalidArgument("--epsilon must be positive");
    if (!(cfg_.reach.time_horizon > 0.0)) {
      throw InvalidArgument("--time-horizon must be positive");
    }
  }

  Vec At(const Vec& fallback) const {
    return opt_.at ? ParsePoint(*opt_.at, cfg_.dim) : fallback;
  }

  const FieldPtr& SelectedField() const {
    if (opt_.field < 1 || opt_.field > static_cast<int>(fields_.size())) {
      throw InvalidArgument("--field must lie in 1.." + std::to_string(fields_.size()));
    }
    return fields_[opt_.field - 1];
  }

  json Header() const { return {{"command", opt_.command}, {"config", cfg_.name}}; }

  int Bracket() {
    if (opt_.terms.empty()) throw InvalidArgument("bracket needs --terms");
    const Vec x = At(cfg_.density.at);
    for (const BracketTerm& t : cfg_.Terms(opt_.terms, "--terms")) {
      json r = Header();
      r["term"] = t.ToString();
      r["at"] = VecJson(x);
      r["value"] = VecJson((*t.MakeEvaluator(fields_))(x));
      (*emit_)(r);
    }
    return 0;
  }

  int Tower() {
    if (opt_.depth < 0) throw InvalidArgument("--depth must be >= 0");
    const std::vector<BracketTerm> tower =
        BuildTower(static_cast<int>(fields_.size()), opt_.depth);
    std::optional<Vec> x;
    if (opt_.at) x = At(cfg_.density.at);
    for (const BracketTerm& t : tower) {
      json r = Header();
      r["term"] = t.ToString();
      r["depth"] = t.depth();
      if (x) {
        r["at"] = VecJson(*x);
        r["value"] = VecJson((*t.MakeEvaluator(fields_))(*x));
      }
      (*emit_)(r);
    }
    return 0;
  }

  HormanderOptions ScanOptions() const {
    HormanderOptions o;
    o.n_samples = cfg_.hormander.n_samples;
    o.seed = cfg_.seed;
    o.det_tol = cfg_.hormander.det_tol;
    o.threads = cfg_.threads;
    o.exponents = cfg_.hormander.exponents;
    o.declared_flow_generation = cfg_.hormander.flow_generation;
    o.declared_divergence_regularity = cfg_.hormander.divergence_regularity;
    return o;
  }

  void PrintClauses(const HormanderReport& rep) {
    err_ << "frame condition on box: " << (rep.frame_condition_passes() ? "pass" : "fail")
         << "\n  (i)  Y invertible a.e.: singular_fraction = " << rep.singular_fraction
         << ", min|det| = " << rep.min_abs_det << "\n";
    if (rep.exponent_check) {
      err_ << "  (i)  exponents: s = " << rep.exponents->s << " vs threshold "
           << *rep.exponent_threshold << ": " << (*rep.exponent_check ? "pass" : "fail")
           << "\n";
    } else {
      err_ << "  (i)  exponents: not declared\n";
    }
    err_ << "  (ii) flow generation: "
         << (rep.declared_flow_generation ? "declared" : "not declared")
         << "\n  (ii) divergence regularity: "
         << (rep.declared_divergence_regularity ? "declared" : "not declared") << "\n";
  }

  int Hormander() {
    const HormanderOptions o = ScanOptions();
    if (!cfg_.hormander.boxes.empty()) {
      std::vector<LocalBox> boxes;
      for (std::size_t k = 0; k < cfg_.hormander.boxes.size(); ++k) {
        const LocalBoxSpec& b = cfg_.hormander.boxes[k];
        boxes.push_back({b.box, cfg_.Terms(b.terms, "/hormander/boxes/" + std::to_string(k) +
                                                        "/terms")});
      }
      const LocalizedReport rep = LocalizedScan(fields_, boxes, cfg_.region, o);
      json r = Header();
      r["localized"] = rep.ToJson();
      r["pass"] = rep.all_pass && rep.connected;
      (*emit_)(r);
      for (const HormanderReport& b : rep.reports) PrintClauses(b);
      err_ << "passing boxes connected: " << (rep.connected ? "yes" : "no") << "\n";
      return 0;
    }
    const std::vector<BracketTerm> terms =
        cfg_.hormander.terms.empty()
            ? SelectTerms(fields_, cfg_.region, 2, 256, cfg_.seed)
            : cfg_.Terms(cfg_.hormander.terms, "/hormander/terms");
    const HormanderReport rep = HormanderScan(fields_, terms, cfg_.region, o);
    json r = Header();
    r["report"] = rep.ToJson();
    r["pass"] = rep.frame_condition_passes();
    (*emit_)(r);
    PrintClauses(rep);
    return 0;
  }

  int Flow() {
    const Vec x = At(cfg_.density.at);
    const double t = opt_.time.value_or(cfg_.reach.time_horizon);
    FlowStats stats;
    const Vec y = IntegrateFlow(*SelectedField(), x, t, cfg_.Integrator(), &stats);
    json r = Header();
    r["field"] = opt_.field;
    r["at"] = VecJson(x);
    r["time"] = t;
    r["endpoint"] = VecJson(y);
    r["accepted_steps"] = stats.accepted;
    r["rejected_steps"] = stats.rejected;
    r["evaluations"] = stats.evaluations;
    (*emit_)(r);
    return 0;
  }

  int Word() {
    if (!opt_.word) throw InvalidArgument("word needs --word JSON");
    json wj;
    try {
      wj = json::parse(*opt_.word);
    } catch (const json::parse_error& e) {
      throw InvalidArgument(std::string("--word: malformed JSON: ") + e.what());
    }
    const FlowWord word = FlowWord::FromJson(wj);
    const Vec x = At(cfg_.density.at);
    std::vector<Vec> ends;
    const Vec y = ApplyWord(fields_, word, x, cfg_.Integrator(), &ends);
    json r = Header();
    r["word"] = word.ToJson();
    r["at"] = VecJson(x);
    r["endpoint"] = VecJson(y);
    r["leg_endpoints"] = json::array();
    for (const Vec& e : ends) r["leg_endpoints"].push_back(VecJson(e));
    (*emit_)(r);
    return 0;
  }

  int Density() {
    const Vec x = At(cfg_.density.at);
    const Field& f = *SelectedField();
    for (double t : cfg_.density.times) {
      const DensityRecord d = LiouvilleDensity(f, x, t, cfg_.Integrator());
      json r = Header();
      r["field"] = opt_.field;
      r["y"] = VecJson(x);
      r["t"] = t;
      r["rho"] = d.rho;
      r["rho_t"] = d.rho_t;
      r["rho_tt"] = d.rho_tt;
      (*emit_)(r);
    }
    if (!cfg_.density.test_function) return 0;
    const TestFunction phi(cfg_.density.test_function->support,
                           cfg_.density.test_function->expression);
    for (double t : cfg_.density.times) {
      TaylorOptions o;
      o.method = cfg_.dim <= 2 ? IntegrationMethod::kQuadrature : IntegrationMethod::kMonteCarlo;
      o.samples = cfg_.density.samples;
      o.seed = cfg_.seed;
      o.threads = cfg_.threads;
      const TaylorResult tr = TaylorRemainder(f, phi, t, cfg_.Integrator(), o);
      const PushforwardEstimate pf = PushforwardIntegral(
          f, phi, t, cfg_.density.samples, cfg_.seed, cfg_.Integrator(), cfg_.threads);
      json r = Header();
      r["field"] = opt_.field;
      r["t"] = t;
      r["pushforward_integral"] = pf.value;
      r["pushforward_std_error"] = pf.std_error;
      r["taylor_remainder"] = tr.remainder;
      r["taylor_bound_ratio"] = tr.bound_ratio;
      r["taylor_std_error"] = tr.std_error;
      r["taylor_method"] = o.method == IntegrationMethod::kQuadrature ? "quadrature" : "monte_carlo";
      (*emit_)(r);
    }
    return 0;
  }

  ReachConfig MakeReachConfig() const {
    ReachConfig rc;
    rc.sampler.m_max = cfg_.reach.m_max;
    rc.sampler.horizon_t = cfg_.reach.time_horizon;
    rc.grid = GridGeometry::Uniform(cfg_.reach.grid_box.value_or(cfg_.region), cfg_.reach.grid);
    rc.budget = cfg_.reach.budget;
    rc.seed = cfg_.seed;
    rc.integrator = cfg_.Integrator();
    rc.mark_trajectory = cfg_.reach.mark_trajectory;
    rc.growth_alpha = cfg_.reach.growth_alpha;
    rc.growth_beta = cfg_.reach.growth_beta;
    rc.threads = cfg_.threads;
    return rc;
  }

  std::string OutputPath(const std::string& name) const {
    const std::string dir = cfg_.output_dir.empty() ? "." : cfg_.output_dir;
    std::filesystem::create_directories(dir);
    return dir + "/" + name;
  }

  int Reach() {
    const ReachConfig rc = MakeReachConfig();
    const SeedRegion seed = SeedRegion::Ball(cfg_.reach.seed_center, cfg_.reach.seed_radius);
    ReachReport rep;
    rep.grid = OccupancyGrid(rc.grid);
    const std::int64_t half = rc.budget / 2;
    ExtendReachable(fields_, seed, rc, 0, half, &rep);
    const OccupancyGrid at_half = rep.grid;
    ExtendReachable(fields_, seed, rc, half, rc.budget, &rep);
    const std::string path = OutputPath("reach.rgrid");
    {
      std::ofstream g(path);
      rep.grid.WriteRgrid(g);
      if (!g) throw Error("cannot write grid file '" + path + "'");
    }
    json r = Header();
    r["budget"] = rc.budget;
    r["occupied_fraction"] = rep.grid.occupied_fraction();
    r["occupied_volume"] = rep.grid.occupied_volume();
    r["half_budget_fraction"] = at_half.occupied_fraction();
    r["flip_fraction"] = FlipFraction(at_half, rep.grid);
    r["alternative"] = ToString(AlternativeCheck(rep.grid).verdict);
    r["safety_violations"] = rep.safety_violations;
    r["integration_failures"] = rep.integration_failures;
    r["outside_points"] = rep.outside_points;
    if (rep.safety_radius) r["safety_radius"] = *rep.safety_radius;
    r["grid_file"] = path;
    (*emit_)(r);
    return 0;
  }

  int Transport() {
    OccupancyGrid set;
    if (opt_.input) {
      std::ifstream in(*opt_.input);
      if (!in) throw InvalidArgument("cannot open grid file '" + *opt_.input + "'");
      set = OccupancyGrid::ReadRgrid(in);
    } else {
      const ReachConfig rc = MakeReachConfig();
      set = EstimateReachable(fields_,
                              SeedRegion::Ball(cfg_.reach.seed_center, cfg_.reach.seed_radius),
                              rc)
                .grid;
    }
    if (set.geometry().dim() != cfg_.dim) throw DimensionError("grid dimension differs from config");
    const Box& box = set.geometry().box();
    const TestFunction phi =
        cfg_.density.test_function
            ? TestFunction(cfg_.density.test_function->support,
                           cfg_.density.test_function->expression)
            : TestFunction(Box(box.Center() - 0.25 * box.Width(), box.Center() + 0.25 * box.Width()));
    const auto stats = InvarianceResidual(set, fields_, cfg_.density.invariance_time,
                                          cfg_.density.invariance_samples, cfg_.seed,
                                          cfg_.Integrator(), cfg_.threads);
    for (const InvarianceStat& s : stats) {
      json r = Header();
      r["kind"] = "invariance";
      r["field"] = s.field + 1;
      r["t"] = cfg_.density.invariance_time;
      r["fraction"] = s.fraction;
      r["evaluated"] = s.evaluated;
      r["escaped"] = s.escaped;
      r["failures"] = s.failures;
      (*emit_)(r);
    }
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      json r = Header();
      r["kind"] = "transport";
      r["field"] = i + 1;
      r["residual"] = TransportResidual(set, *fields_[i], phi);
      (*emit_)(r);
    }
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      for (std::size_t j = i + 1; j < fields_.size(); ++j) {
        json r = Header();
        r["kind"] = "bracket_transport";
        r["fields"] = {i + 1, j + 1};
        r["residual"] = BracketTransportResidual(set, fields_[i], fields_[j], phi);
        (*emit_)(r);
      }
    }
    return 0;
  }

  int Steer() {
    SteerConfig sc;
    sc.m_max = cfg_.steer.m_max;
    sc.restarts = cfg_.steer.restarts;
    sc.budget = cfg_.steer.budget;
    sc.seed = cfg_.seed;
    sc.start_radius = cfg_.steer.start_radius;
    sc.integrator = cfg_.Integrator();
    sc.threads = cfg_.threads;
    const SteeringPlan plan =
        Plan(fields_, At(cfg_.steer.start), cfg_.steer.target, cfg_.steer.epsilon, sc);
    json r = Header();
    r["plan"] = plan.ToJson();
    (*emit_)(r);
    err_ << "steering " << (plan.status == SteerStatus::kSuccess ? "succeeded" : "failed")
         << ": error " << plan.achieved_error << " after " << plan.evaluations
         << " evaluations\n";
    return 0;
  }

  int Suite() {
    SuiteOptions so;
    if (opt_.config_path) so.seed = ExperimentConfig::Load(*opt_.config_path).seed;
    if (opt_.seed) so.seed = *opt_.seed;
    if (opt_.budget) so.reach_budget = *opt_.budget;
    if (opt_.threads) so.threads = *opt_.threads;
    if (opt_.out_dir) so.out_dir = *opt_.out_dir;
    if (so.reach_budget < 2) throw InvalidArgument("--budget must be >= 2 for the suite");
    if (so.threads < 1) throw InvalidArgument("--threads must be >= 1");
    const std::vector<CheckResult> results = RunSuite(so, &err_);
    Emitter emit(out_, so.out_dir, "suite");
    bool all = true;
    for (const CheckResult& r : results) {
      json j = {{"command", "suite"}, {"seed", so.seed}};
      j.update(r.ToJson());
      emit(j);
      all = all && r.passed;
    }
    const std::string table = SummaryTable(results);
    err_ << table;
    if (!so.out_dir.empty()) {
      std::ofstream(so.out_dir + "/summary.txt") << table;
      std::ofstream(so.out_dir + "/plot_suite.py") << PlotScript();
    }
    return all ? 0 : 1;
  }

  const CommandOptions& opt_;
  std::ostream& out_;
  std::ostream& err_;
  ExperimentConfig cfg_;
  FieldSet fields_;
  std::unique_ptr<Emitter> emit_;
};

}  // namespace

std::vector<std::string> SplitTerms(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  int depth = 0;
  for (char c : text) {
    if (c == '[') ++depth;
    if (c == ']') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(current);
      current.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      current += c;
    }
  }
  if (!current.empty() || !out.empty()) out.push_back(current);
  return out;
}

int RunCommand(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return Runner(options, out, err).Run();
}

}  // namespace geoctl
