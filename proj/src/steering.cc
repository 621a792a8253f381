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

#include "geoctl/steering.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

#include <Eigen/LU>

#include "geoctl/lie_algebra.h"
#include "geoctl/parallel.h"
#include "geoctl/random.h"

namespace geoctl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInitialStep = 0.1;
constexpr double kMinStep = 1e-12;
constexpr int kBatch = 4;

// Free parameters of a word: one per group, one per ungrouped leg.
struct WordParams {
  std::vector<std::vector<int>> legs_of;  // legs driven by each parameter
  std::vector<double> values;

  static WordParams Of(const FlowWord& word) {
    WordParams p;
    std::map<int, int> group_slot;
    for (int k = 0; k < static_cast<int>(word.legs.size()); ++k) {
      const Leg& leg = word.legs[k];
      if (leg.group >= 0) {
        auto [it, fresh] = group_slot.emplace(leg.group, static_cast<int>(p.values.size()));
        if (fresh) {
          p.legs_of.emplace_back();
          p.values.push_back(leg.coefficient != 0.0 ? leg.time / leg.coefficient : 0.0);
        }
        p.legs_of[it->second].push_back(k);
      } else {
        p.legs_of.push_back({k});
        p.values.push_back(leg.time);
      }
    }
    return p;
  }

  void Apply(std::span<const double> v, FlowWord* word) const {
    for (std::size_t i = 0; i < legs_of.size(); ++i) {
      for (int k : legs_of[i]) {
        Leg& leg = word->legs[k];
        leg.time = leg.group >= 0 ? leg.coefficient * v[i] : v[i];
      }
    }
  }
};

double EndpointError(const FieldSet& fields, const FlowWord& word, const Vec& start,
                     const Vec& target, const IntegratorConfig& cfg) {
  try {
    return (ApplyWord(fields, word, start, cfg) - target).norm();
  } catch (const Error&) {
    return kInf;
  }
}

// Coordinate pattern search minimizing `error` from `x`. Returns the best
// error; `x` holds the best point.
double PatternSearch(const std::function<double(const std::vector<double>&)>& error,
                     std::vector<double>& x, std::int64_t budget, double stop_error,
                     RefineStats* stats) {
  std::int64_t evals = 0;
  auto record = [&](double best) {
    ++evals;
    if (stats) {
      ++stats->evaluations;
      stats->error_trace.push_back(best);
    }
  };
  if (budget <= 0) return kInf;
  double best = error(x);
  record(best);
  double step = kInitialStep;
  std::vector<double> trial;
  while (step >= kMinStep && evals < budget && best > stop_error) {
    bool improved = false;
    for (std::size_t i = 0; i < x.size() && evals < budget; ++i) {
      for (double sign : {1.0, -1.0}) {
        if (evals >= budget) break;
        trial = x;
        trial[i] += sign * step;
        const double e = error(trial);
        if (e < best) {
          best = e;
          x = trial;
          improved = true;
        }
        record(best);
        if (improved) break;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

struct Frame {
  std::vector<BracketTerm> terms;
  Vec coefficients;
};

// The d terms of depth <= 1 maximizing |det Y(x)|, and the expansion of
// y - x in them. Empty when every choice is singular.
std::optional<Frame> FrameAt(const FieldSet& fields, const Vec& x, const Vec& y) {
  const int d = static_cast<int>(x.size());
  const std::vector<BracketTerm> tower = BuildTower(static_cast<int>(fields.size()), 1);
  const int n = static_cast<int>(tower.size());
  if (n < d) return std::nullopt;
  std::vector<Vec> rows;
  for (const BracketTerm& t : tower) rows.push_back((*t.MakeEvaluator(fields))(x));
  std::vector<int> combo(d), best;
  std::iota(combo.begin(), combo.end(), 0);
  double best_rel = 0.0;
  Mat m(d, d);
  while (true) {
    double scale = 1.0;
    for (int j = 0; j < d; ++j) {
      m.row(j) = rows[combo[j]].transpose();
      scale *= rows[combo[j]].norm();
    }
    const double rel = scale > 0.0 ? std::abs(m.determinant()) / scale : 0.0;
    if (rel > best_rel) {
      best_rel = rel;
      best = combo;
    }
    int i = d - 1;
    while (i >= 0 && combo[i] == n - d + i) --i;
    if (i < 0) break;
    ++combo[i];
    for (int j = i + 1; j < d; ++j) combo[j] = combo[j - 1] + 1;
  }
  if (best_rel <= 1e-9) return std::nullopt;
  Frame f;
  for (int j = 0; j < d; ++j) {
    f.terms.push_back(tower[best[j]]);
    m.row(j) = rows[best[j]].transpose();
  }
  f.coefficients = m.transpose().fullPivLu().solve(y - x);
  return f;
}

// Direct legs for fields, commutator blocks for brackets.
FlowWord FrameWord(const Frame& frame) {
  FlowWord word;
  int group = 0;
  for (std::size_t j = 0; j < frame.terms.size(); ++j) {
    const double c = frame.coefficients[j];
    if (std::abs(c) < 1e-14) continue;
    const BracketTerm& t = frame.terms[j];
    if (t.is_leaf()) {
      word.legs.push_back({t.leaf_index(), c, group++, 1.0});
      continue;
    }
    const int a = t.left().leaf_index();
    const int b = t.right().leaf_index();
    const FlowWord block = c >= 0 ? CommutatorPrimitive(a, b, std::sqrt(c), group++)
                                  : CommutatorPrimitive(b, a, std::sqrt(-c), group++);
    word.legs.insert(word.legs.end(), block.legs.begin(), block.legs.end());
  }
  return word;
}

int NextGroup(const FlowWord& word) {
  int g = -1;
  for (const Leg& leg : word.legs) g = std::max(g, leg.group);
  return g + 1;
}

void AppendRandomMove(CounterRng& rng, int field_count, int m_max, FlowWord* word) {
  const int room = m_max - static_cast<int>(word->legs.size());
  const int group = NextGroup(*word);
  if (field_count >= 2 && room >= 4 && rng.Uniform() < 0.5) {
    const int i = static_cast<int>(rng.Below(field_count));
    int j = static_cast<int>(rng.Below(field_count - 1));
    if (j >= i) ++j;
    const FlowWord block = CommutatorPrimitive(i, j, rng.Uniform(-0.3, 0.3), group);
    word->legs.insert(word->legs.end(), block.legs.begin(), block.legs.end());
  } else {
    word->legs.push_back({static_cast<int>(rng.Below(field_count)),
                          rng.Uniform(-0.3, 0.3), group, 1.0});
  }
}

struct RestartResult {
  FlowWord word;
  Vec start;
  double error = kInf;
  std::int64_t evaluations = 0;
};

RestartResult RunRestart(const FieldSet& fields, const Vec& x, const Vec& y,
                         double epsilon, const SteerConfig& cfg,
                         const std::optional<Frame>& frame, int restart,
                         std::int64_t budget) {
  const int d = static_cast<int>(x.size());
  const int field_count = static_cast<int>(fields.size());
  CounterRng rng(cfg.seed, Stream::kSteering, static_cast<std::uint64_t>(restart));
  FlowWord word;
  if (frame) {
    word = FrameWord(*frame);
    if (restart > 0) {
      for (Leg& leg : word.legs) leg.time *= 1.0 + 0.3 * rng.Normal();
    }
  }
  if (word.legs.empty()) {
    while (static_cast<int>(word.legs.size()) < std::min(cfg.m_max, 2 * d)) {
      AppendRandomMove(rng, field_count, std::min(cfg.m_max, 2 * d), &word);
    }
  }
  // Per-group times must agree with their parameter after perturbation.
  WordParams wp = WordParams::Of(word);
  wp.Apply(wp.values, &word);

  RestartResult r;
  r.start = x;
  const double stop = 0.5 * epsilon;
  while (true) {
    WordParams params = WordParams::Of(word);
    const std::size_t nw = params.values.size();
    std::vector<double> v = params.values;
    if (cfg.start_radius > 0.0) {
      for (int k = 0; k < d; ++k) v.push_back(r.start[k] - x[k]);
    }
    FlowWord scratch = word;
    auto error = [&](const std::vector<double>& p) {
      Vec s = x;
      if (cfg.start_radius > 0.0) {
        for (int k = 0; k < d; ++k) s[k] += p[nw + k];
        if ((s - x).norm() > cfg.start_radius) return kInf;
      }
      params.Apply(std::span<const double>(p.data(), nw), &scratch);
      return EndpointError(fields, scratch, s, y, cfg.integrator);
    };
    RefineStats stats;
    const double e = PatternSearch(error, v, budget - r.evaluations, stop, &stats);
    r.evaluations += stats.evaluations;
    if (e <= r.error) {
      params.Apply(std::span<const double>(v.data(), nw), &word);
      if (cfg.start_radius > 0.0) {
        for (int k = 0; k < d; ++k) r.start[k] = x[k] + v[nw + k];
      }
      r.error = e;
      r.word = word;
    }
    if (r.error <= stop || r.evaluations >= budget ||
        static_cast<int>(word.legs.size()) >= cfg.m_max) {
      break;
    }
    word = r.word;
    AppendRandomMove(rng, field_count, cfg.m_max, &word);
  }
  return r;
}

}  // namespace

nlohmann::json SteeringPlan::ToJson() const {
  auto vec = [](const Vec& v) { return std::vector<double>(v.begin(), v.end()); };
  nlohmann::json j;
  j["start"] = vec(start);
  j["target"] = vec(target);
  j["epsilon"] = epsilon;
  j["word"] = word.ToJson();
  j["achieved_error"] = std::isfinite(achieved_error) ? nlohmann::json(achieved_error)
                                                      : nlohmann::json(nullptr);
  j["evaluations"] = evaluations;
  j["status"] = status == SteerStatus::kSuccess ? "success" : "failure";
  j["restart"] = restart;
  return j;
}

FlowWord RefineWord(const FieldSet& fields, const FlowWord& word, const Vec& start,
                    const Vec& target, std::int64_t budget,
                    const IntegratorConfig& cfg, double stop_error,
                    RefineStats* stats) {
  if (word.empty()) throw InvalidArgument("refine_word needs a nonempty word");
  if (budget <= 0) return word;
  const WordParams params = WordParams::Of(word);
  FlowWord scratch = word;
  auto error = [&](const std::vector<double>& p) {
    params.Apply(p, &scratch);
    return EndpointError(fields, scratch, start, target, cfg);
  };
  std::vector<double> v = params.values;
  PatternSearch(error, v, budget, stop_error, stats);
  // The search only moves on strict improvement, so v is the input values
  // unless something better was found.
  FlowWord out = word;
  if (v != params.values) params.Apply(v, &out);
  return out;
}

SteeringPlan Plan(const FieldSet& fields, const Vec& x, const Vec& y,
                  double epsilon, const SteerConfig& cfg) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (fields.empty()) throw InvalidArgument("need at least one field");
  if (x.size() != y.size() || fields[0]->dim() != x.size()) {
    throw DimensionError("start, target and fields must share a dimension");
  }
  if (cfg.m_max < 1 || cfg.restarts < 1 || cfg.budget < 1) {
    throw InvalidArgument("m_max, restarts and budget must be >= 1");
  }
  if (!(cfg.start_radius >= 0.0)) throw InvalidArgument("start_radius must be >= 0");

  const std::optional<Frame> frame = FrameAt(fields, x, y);
  const std::int64_t share = std::max<std::int64_t>(1, cfg.budget / cfg.restarts);
  std::vector<RestartResult> results;
  for (int first = 0; first < cfg.restarts; first += kBatch) {
    const int count = std::min(kBatch, cfg.restarts - first);
    std::vector<RestartResult> batch(count);
    ParallelChunks(count, 1, cfg.threads,
                   [&](std::int64_t, std::int64_t begin, std::int64_t end) {
                     for (std::int64_t k = begin; k < end; ++k) {
                       batch[k] = RunRestart(fields, x, y, epsilon, cfg, frame,
                                             first + static_cast<int>(k), share);
                     }
                   });
    results.insert(results.end(), batch.begin(), batch.end());
    const bool solved = std::any_of(batch.begin(), batch.end(), [&](const RestartResult& r) {
      return r.error <= 0.5 * epsilon;
    });
    if (solved) break;
  }

  SteeringPlan plan;
  plan.target = y;
  plan.epsilon = epsilon;
  std::size_t best = 0;
  for (std::size_t k = 0; k < results.size(); ++k) {
    plan.evaluations += results[k].evaluations;
    const auto key = [](const RestartResult& r) { return std::make_pair(r.error, r.evaluations); };
    if (key(results[k]) < key(results[best])) best = k;
  }
  plan.word = results[best].word;
  plan.start = results[best].start;
  plan.restart = static_cast<int>(best);
  plan.achieved_error = EndpointError(fields, plan.word, plan.start, y, cfg.verify_integrator);
  plan.status = plan.achieved_error <= epsilon ? SteerStatus::kSuccess : SteerStatus::kFailure;
  return plan;
}

}  // namespace geoctl
