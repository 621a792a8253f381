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

#include "geoctl/config.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "geoctl/expression.h"

namespace geoctl {
namespace {

using nlohmann::json;

std::string Child(const std::string& ptr, const std::string& key) {
  return ptr + "/" + key;
}
std::string Child(const std::string& ptr, std::size_t index) {
  return ptr + "/" + std::to_string(index);
}

void CheckKeys(const json& obj, const std::string& ptr,
               const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(ptr.empty() ? "/" : ptr, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(Child(ptr, key), "unknown key");
  }
}

double Number(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw ConfigError(ptr, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(ptr, "expected a finite number");
  return v;
}

std::int64_t Integer(const json& j, const std::string& ptr, std::int64_t min) {
  if (!j.is_number_integer()) throw ConfigError(ptr, "expected an integer");
  const std::int64_t v = j.get<std::int64_t>();
  if (v < min) throw ConfigError(ptr, "must be >= " + std::to_string(min));
  return v;
}

double Positive(const json& j, const std::string& ptr) {
  const double v = Number(j, ptr);
  if (!(v > 0.0)) throw ConfigError(ptr, "must be positive");
  return v;
}

double NonNegative(const json& j, const std::string& ptr) {
  const double v = Number(j, ptr);
  if (v < 0.0) throw ConfigError(ptr, "must be >= 0");
  return v;
}

bool Boolean(const json& j, const std::string& ptr) {
  if (!j.is_boolean()) throw ConfigError(ptr, "expected true or false");
  return j.get<bool>();
}

std::string String(const json& j, const std::string& ptr) {
  if (!j.is_string()) throw ConfigError(ptr, "expected a string");
  return j.get<std::string>();
}

Vec Point(const json& j, const std::string& ptr, int dim) {
  if (!j.is_array()) throw ConfigError(ptr, "expected an array of numbers");
  if (static_cast<int>(j.size()) != dim) {
    throw ConfigError(ptr, "expected " + std::to_string(dim) + " coordinates, got " +
                               std::to_string(j.size()));
  }
  Vec v(dim);
  for (int k = 0; k < dim; ++k) v[k] = Number(j[k], Child(ptr, k));
  return v;
}

Box ReadBox(const json& j, const std::string& ptr, int dim,
            std::set<std::string> extra = {}) {
  extra.insert({"min", "max"});
  CheckKeys(j, ptr, extra);
  if (!j.contains("min")) throw ConfigError(Child(ptr, "min"), "missing");
  if (!j.contains("max")) throw ConfigError(Child(ptr, "max"), "missing");
  const Vec lo = Point(j["min"], Child(ptr, "min"), dim);
  const Vec hi = Point(j["max"], Child(ptr, "max"), dim);
  for (int k = 0; k < dim; ++k) {
    if (!(lo[k] < hi[k])) {
      throw ConfigError(Child(Child(ptr, "max"), k), "box is degenerate (max <= min)");
    }
  }
  return Box(lo, hi);
}

json BoxJson(const Box& b) {
  return {{"min", std::vector<double>(b.lo.begin(), b.lo.end())},
          {"max", std::vector<double>(b.hi.begin(), b.hi.end())}};
}

json VecJson(const Vec& v) { return std::vector<double>(v.begin(), v.end()); }

std::vector<std::string> Strings(const json& j, const std::string& ptr) {
  if (!j.is_array()) throw ConfigError(ptr, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(String(j[k], Child(ptr, k)));
  return out;
}

// Reads `key` of `obj` through `fn` when present.
template <typename Fn>
void IfPresent(const json& obj, const std::string& key, const std::string& ptr, Fn&& fn) {
  if (obj.contains(key)) fn(obj[key], Child(ptr, key));
}

}  // namespace

std::vector<BracketTerm> ExperimentConfig::Terms(const std::vector<std::string>& texts,
                                                 const std::string& pointer) const {
  std::vector<BracketTerm> terms;
  for (std::size_t k = 0; k < texts.size(); ++k) {
    const std::string ptr = Child(pointer, k);
    try {
      terms.push_back(BracketTerm::Parse(texts[k]));
    } catch (const Error& e) {
      throw ConfigError(ptr, e.what());
    }
    if (terms.back().required_fields() > static_cast<int>(fields.size())) {
      throw ConfigError(ptr, "term '" + texts[k] + "' references a field beyond the " +
                                 std::to_string(fields.size()) + " defined");
    }
  }
  return terms;
}

ExperimentConfig ExperimentConfig::FromJson(const json& j) {
  CheckKeys(j, "", {"name", "dim", "seed", "fields", "fd_step", "region", "integrator",
                    "threads", "output_dir", "hormander", "reach", "steer", "density"});
  ExperimentConfig c;
  IfPresent(j, "name", "", [&](const json& v, const std::string& p) { c.name = String(v, p); });
  if (!j.contains("dim")) throw ConfigError("/dim", "missing");
  c.dim = static_cast<int>(Integer(j["dim"], "/dim", 1));
  if (!j.contains("seed")) {
    throw ConfigError("/seed", "missing; a seed is required for reproducibility");
  }
  if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() &&
                                           j["seed"].get<std::int64_t>() >= 0)) {
    throw ConfigError("/seed", "expected a nonnegative integer");
  }
  c.seed = j["seed"].get<std::uint64_t>();

  if (!j.contains("fields")) throw ConfigError("/fields", "missing");
  const json& fs = j["fields"];
  if (!fs.is_array() || fs.empty()) throw ConfigError("/fields", "expected a nonempty array");
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const std::string ptr = Child("/fields", i);
    std::vector<std::string> comps = Strings(fs[i], ptr);
    if (static_cast<int>(comps.size()) != c.dim) {
      throw ConfigError(ptr, "expected " + std::to_string(c.dim) + " components, got " +
                                 std::to_string(comps.size()));
    }
    for (std::size_t k = 0; k < comps.size(); ++k) {
      try {
        Expression::Parse(comps[k], c.dim);
      } catch (const Error& e) {
        throw ConfigError(Child(ptr, k), e.what());
      }
    }
    c.fields.push_back(std::move(comps));
  }
  IfPresent(j, "fd_step", "", [&](const json& v, const std::string& p) { c.fd_step = Positive(v, p); });
  c.region = j.contains("region") ? ReadBox(j["region"], "/region", c.dim)
                                  : Box::Cube(c.dim, 1.0);
  IfPresent(j, "integrator", "", [&](const json& v, const std::string& p) {
    CheckKeys(v, p, {"rel_tol", "abs_tol"});
    IfPresent(v, "rel_tol", p, [&](const json& x, const std::string& q) { c.rel_tol = Positive(x, q); });
    IfPresent(v, "abs_tol", p, [&](const json& x, const std::string& q) { c.abs_tol = Positive(x, q); });
    try {
      c.Integrator().Validate();
    } catch (const Error& e) {
      throw ConfigError(p, e.what());
    }
  });
  IfPresent(j, "threads", "", [&](const json& v, const std::string& p) {
    c.threads = static_cast<int>(Integer(v, p, 1));
  });
  IfPresent(j, "output_dir", "", [&](const json& v, const std::string& p) { c.output_dir = String(v, p); });

  const Vec origin = Vec::Zero(c.dim);
  c.reach.seed_center = origin;
  c.steer.start = origin;
  c.steer.target = origin;
  c.density.at = origin;

  IfPresent(j, "hormander", "", [&](const json& h, const std::string& p) {
    CheckKeys(h, p, {"terms", "n_samples", "det_tol", "exponents", "declared", "boxes"});
    HormanderSection& s = c.hormander;
    IfPresent(h, "terms", p, [&](const json& v, const std::string& q) {
      s.terms = Strings(v, q);
      if (static_cast<int>(s.terms.size()) != c.dim) {
        throw ConfigError(q, "expected " + std::to_string(c.dim) + " terms");
      }
      c.Terms(s.terms, q);
    });
    IfPresent(h, "n_samples", p, [&](const json& v, const std::string& q) { s.n_samples = Integer(v, q, 1); });
    IfPresent(h, "det_tol", p, [&](const json& v, const std::string& q) { s.det_tol = NonNegative(v, q); });
    IfPresent(h, "exponents", p, [&](const json& v, const std::string& q) {
      CheckKeys(v, q, {"q", "r", "s"});
      DeclaredExponents e;
      for (const char* key : {"q", "r", "s"}) {
        if (!v.contains(key)) throw ConfigError(Child(q, key), "missing");
      }
      e.q = Positive(v["q"], Child(q, "q"));
      e.r = Positive(v["r"], Child(q, "r"));
      e.s = Positive(v["s"], Child(q, "s"));
      s.exponents = e;
    });
    IfPresent(h, "declared", p, [&](const json& v, const std::string& q) {
      CheckKeys(v, q, {"flow_generation", "divergence_regularity"});
      IfPresent(v, "flow_generation", q, [&](const json& x, const std::string& r) { s.flow_generation = Boolean(x, r); });
      IfPresent(v, "divergence_regularity", q, [&](const json& x, const std::string& r) {
        s.divergence_regularity = Boolean(x, r);
      });
    });
    IfPresent(h, "boxes", p, [&](const json& v, const std::string& q) {
      if (!v.is_array() || v.empty()) throw ConfigError(q, "expected a nonempty array");
      for (std::size_t k = 0; k < v.size(); ++k) {
        const std::string bp = Child(q, k);
        LocalBoxSpec b;
        b.box = ReadBox(v[k], bp, c.dim, {"terms"});
        IfPresent(v[k], "terms", bp, [&](const json& t, const std::string& tp) {
          b.terms = Strings(t, tp);
          if (static_cast<int>(b.terms.size()) != c.dim) {
            throw ConfigError(tp, "expected " + std::to_string(c.dim) + " terms");
          }
          c.Terms(b.terms, tp);
        });
        s.boxes.push_back(std::move(b));
      }
    });
  });

  IfPresent(j, "reach", "", [&](const json& r, const std::string& p) {
    CheckKeys(r, p, {"seed_center", "seed_radius", "m_max", "time_horizon", "budget", "grid",
                     "grid_box", "growth", "mark_trajectory"});
    ReachSection& s = c.reach;
    IfPresent(r, "seed_center", p, [&](const json& v, const std::string& q) { s.seed_center = Point(v, q, c.dim); });
    IfPresent(r, "seed_radius", p, [&](const json& v, const std::string& q) { s.seed_radius = NonNegative(v, q); });
    IfPresent(r, "m_max", p, [&](const json& v, const std::string& q) { s.m_max = static_cast<int>(Integer(v, q, 1)); });
    IfPresent(r, "time_horizon", p, [&](const json& v, const std::string& q) { s.time_horizon = Positive(v, q); });
    IfPresent(r, "budget", p, [&](const json& v, const std::string& q) { s.budget = Integer(v, q, 1); });
    IfPresent(r, "grid", p, [&](const json& v, const std::string& q) { s.grid = static_cast<int>(Integer(v, q, 1)); });
    IfPresent(r, "grid_box", p, [&](const json& v, const std::string& q) { s.grid_box = ReadBox(v, q, c.dim); });
    IfPresent(r, "growth", p, [&](const json& v, const std::string& q) {
      CheckKeys(v, q, {"alpha", "beta"});
      if (!v.contains("alpha")) throw ConfigError(Child(q, "alpha"), "missing");
      if (!v.contains("beta")) throw ConfigError(Child(q, "beta"), "missing");
      s.growth_alpha = NonNegative(v["alpha"], Child(q, "alpha"));
      s.growth_beta = NonNegative(v["beta"], Child(q, "beta"));
    });
    IfPresent(r, "mark_trajectory", p, [&](const json& v, const std::string& q) { s.mark_trajectory = Boolean(v, q); });
  });

  IfPresent(j, "steer", "", [&](const json& r, const std::string& p) {
    CheckKeys(r, p, {"start", "target", "epsilon", "m_max", "restarts", "budget", "start_radius"});
    SteerSection& s = c.steer;
    IfPresent(r, "start", p, [&](const json& v, const std::string& q) { s.start = Point(v, q, c.dim); });
    IfPresent(r, "target", p, [&](const json& v, const std::string& q) { s.target = Point(v, q, c.dim); });
    IfPresent(r, "epsilon", p, [&](const json& v, const std::string& q) { s.epsilon = Positive(v, q); });
    IfPresent(r, "m_max", p, [&](const json& v, const std::string& q) { s.m_max = static_cast<int>(Integer(v, q, 1)); });
    IfPresent(r, "restarts", p, [&](const json& v, const std::string& q) { s.restarts = static_cast<int>(Integer(v, q, 1)); });
    IfPresent(r, "budget", p, [&](const json& v, const std::string& q) { s.budget = Integer(v, q, 1); });
    IfPresent(r, "start_radius", p, [&](const json& v, const std::string& q) { s.start_radius = NonNegative(v, q); });
  });

  IfPresent(j, "density", "", [&](const json& r, const std::string& p) {
    CheckKeys(r, p, {"at", "times", "test_function", "samples", "invariance_time",
                     "invariance_samples"});
    DensitySection& s = c.density;
    IfPresent(r, "at", p, [&](const json& v, const std::string& q) { s.at = Point(v, q, c.dim); });
    IfPresent(r, "times", p, [&](const json& v, const std::string& q) {
      if (!v.is_array() || v.empty()) throw ConfigError(q, "expected a nonempty array");
      s.times.clear();
      for (std::size_t k = 0; k < v.size(); ++k) s.times.push_back(Number(v[k], Child(q, k)));
    });
    IfPresent(r, "test_function", p, [&](const json& v, const std::string& q) {
      TestFunctionSpec t;
      t.support = ReadBox(v, q, c.dim, {"expression"});
      IfPresent(v, "expression", q, [&](const json& e, const std::string& ep) {
        t.expression = String(e, ep);
        try {
          Expression::Parse(t.expression, c.dim);
        } catch (const Error& err) {
          throw ConfigError(ep, err.what());
        }
      });
      s.test_function = t;
    });
    IfPresent(r, "samples", p, [&](const json& v, const std::string& q) { s.samples = Integer(v, q, 2); });
    IfPresent(r, "invariance_time", p, [&](const json& v, const std::string& q) { s.invariance_time = Number(v, q); });
    IfPresent(r, "invariance_samples", p, [&](const json& v, const std::string& q) {
      s.invariance_samples = Integer(v, q, 1);
    });
  });
  return c;
}

ExperimentConfig ExperimentConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return FromJson(j);
}

json ExperimentConfig::ToJson() const {
  json j;
  j["name"] = name;
  j["dim"] = dim;
  j["seed"] = seed;
  j["fields"] = fields;
  j["fd_step"] = fd_step;
  j["region"] = BoxJson(region);
  j["integrator"] = {{"rel_tol", rel_tol}, {"abs_tol", abs_tol}};
  j["threads"] = threads;
  j["output_dir"] = output_dir;

  json h;
  if (!hormander.terms.empty()) h["terms"] = hormander.terms;
  h["n_samples"] = hormander.n_samples;
  h["det_tol"] = hormander.det_tol;
  if (hormander.exponents) {
    h["exponents"] = {{"q", hormander.exponents->q},
                      {"r", hormander.exponents->r},
                      {"s", hormander.exponents->s}};
  }
  h["declared"] = {{"flow_generation", hormander.flow_generation},
                   {"divergence_regularity", hormander.divergence_regularity}};
  if (!hormander.boxes.empty()) {
    h["boxes"] = json::array();
    for (const LocalBoxSpec& b : hormander.boxes) {
      json bj = BoxJson(b.box);
      if (!b.terms.empty()) bj["terms"] = b.terms;
      h["boxes"].push_back(bj);
    }
  }
  j["hormander"] = h;

  json r;
  r["seed_center"] = VecJson(reach.seed_center);
  r["seed_radius"] = reach.seed_radius;
  r["m_max"] = reach.m_max;
  r["time_horizon"] = reach.time_horizon;
  r["budget"] = reach.budget;
  r["grid"] = reach.grid;
  if (reach.grid_box) r["grid_box"] = BoxJson(*reach.grid_box);
  if (reach.growth_alpha && reach.growth_beta) {
    r["growth"] = {{"alpha", *reach.growth_alpha}, {"beta", *reach.growth_beta}};
  }
  r["mark_trajectory"] = reach.mark_trajectory;
  j["reach"] = r;

  j["steer"] = {{"start", VecJson(steer.start)},       {"target", VecJson(steer.target)},
                {"epsilon", steer.epsilon},             {"m_max", steer.m_max},
                {"restarts", steer.restarts},           {"budget", steer.budget},
                {"start_radius", steer.start_radius}};

  json d;
  d["at"] = VecJson(density.at);
  d["times"] = density.times;
  if (density.test_function) {
    json t = BoxJson(density.test_function->support);
    t["expression"] = density.test_function->expression;
    d["test_function"] = t;
  }
  d["samples"] = density.samples;
  d["invariance_time"] = density.invariance_time;
  d["invariance_samples"] = density.invariance_samples;
  j["density"] = d;
  return j;
}

FieldSet ExperimentConfig::BuildFields() const {
  FieldSet out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    out.push_back(VectorField::Parse(fields[i], dim, "X" + std::to_string(i + 1), fd_step));
  }
  return out;
}

IntegratorConfig ExperimentConfig::Integrator() const {
  IntegratorConfig cfg;
  cfg.rel_tol = rel_tol;
  cfg.abs_tol = abs_tol;
  return cfg;
}

}  // namespace geoctl
