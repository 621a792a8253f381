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

#include "geoctl/reachability.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>

#include "geoctl/parallel.h"

namespace geoctl {
namespace {

constexpr std::int64_t kTrialChunk = 2048;
constexpr int kMaxLegSubdivisions = 4096;

// Runs the word from x0, appending the points to mark.
void TraceWord(const FieldSet& fields, const FlowWord& word, const Vec& x0,
               const IntegratorConfig& integ, const ReachConfig& cfg,
               std::vector<Vec>* points) {
  const double spacing = 0.5 * cfg.grid.cell_width().minCoeff();
  std::vector<double> times;
  Vec x = x0;
  for (std::size_t k = 0; k < word.legs.size(); ++k) {
    const Leg& leg = word.legs[k];
    const Field& field = *fields.at(leg.field);
    const bool last = k + 1 == word.legs.size();
    if (!cfg.mark_trajectory) {
      x = IntegrateFlow(field, x, leg.time, integ);
      if (cfg.mark_intermediate || last) points->push_back(x);
      continue;
    }
    const double reach = std::abs(leg.time) * std::max(1.0, field(x).norm());
    const int pieces = static_cast<int>(std::clamp(
        std::ceil(reach / spacing), 1.0, static_cast<double>(kMaxLegSubdivisions)));
    times.resize(pieces);
    for (int p = 0; p < pieces; ++p) times[p] = leg.time * (p + 1) / pieces;
    std::vector<Vec> states = IntegrateFlowAt(field, x, times, integ);
    for (Vec& s : states) points->push_back(std::move(s));
    x = points->back();
  }
}

}  // namespace

void WordSampler::Validate() const {
  if (m_max < 1) throw InvalidArgument("m_max must be >= 1");
  if (!(horizon_t > 0.0) || !std::isfinite(horizon_t)) {
    throw InvalidArgument("time horizon must be positive");
  }
}

FlowWord WordSampler::Sample(CounterRng& rng, int field_count) const {
  FlowWord word;
  const int m = full_length
                    ? m_max
                    : 1 + static_cast<int>(rng.Below(static_cast<std::uint64_t>(m_max)));
  word.legs.reserve(m);
  for (int k = 0; k < m; ++k) {
    Leg leg;
    if (avoid_repeats && k > 0 && field_count > 1) {
      // Uniform over the fields other than the previous one.
      const int prev = word.legs.back().field;
      leg.field = static_cast<int>(rng.Below(static_cast<std::uint64_t>(field_count - 1)));
      if (leg.field >= prev) ++leg.field;
    } else {
      leg.field = static_cast<int>(rng.Below(static_cast<std::uint64_t>(field_count)));
    }
    leg.time = rng.Uniform(-horizon_t, horizon_t);
    word.legs.push_back(leg);
  }
  return word;
}

SeedRegion SeedRegion::Ball(Vec center, double radius) {
  if (!(radius >= 0.0)) throw InvalidArgument("seed ball radius must be >= 0");
  SeedRegion r;
  r.center_ = std::move(center);
  r.radius_ = radius;
  return r;
}

SeedRegion SeedRegion::FromGrid(OccupancyGrid grid) {
  SeedRegion r;
  for (std::int64_t c = 0; c < grid.geometry().cell_count(); ++c) {
    if (grid.Test(c)) r.cells_.push_back(c);
  }
  if (r.cells_.empty()) throw InvalidArgument("seed grid has no occupied cells");
  r.center_ = grid.geometry().box().Center();
  r.grid_ = std::move(grid);
  return r;
}

int SeedRegion::dim() const { return static_cast<int>(center_.size()); }

Vec SeedRegion::Sample(CounterRng& rng) const {
  if (!grid_) {
    return radius_ == 0.0 ? center_ : rng.UniformInBall(center_, radius_);
  }
  const auto& g = grid_->geometry();
  const std::int64_t cell = cells_[rng.Below(cells_.size())];
  const Vec c = g.CellCenter(cell);
  Vec x(dim());
  for (int k = 0; k < dim(); ++k) {
    x[k] = c[k] + (rng.Uniform() - 0.5) * g.cell_width()[k];
  }
  return x;
}

double SeedRegion::DiameterWithOrigin() const {
  if (!grid_) return std::max(center_.norm() + radius_, 2.0 * radius_);
  // Bounding box of the whole grid box, which contains every seed cell.
  const Box& b = grid_->geometry().box();
  const Vec far = b.lo.cwiseAbs().cwiseMax(b.hi.cwiseAbs());
  return std::max(far.norm(), b.Width().norm());
}

void ExtendReachable(const FieldSet& fields, const SeedRegion& seed_region,
                     const ReachConfig& cfg, std::int64_t first,
                     std::int64_t last, ReachReport* report) {
  cfg.sampler.Validate();
  if (fields.empty()) throw InvalidArgument("need at least one field");
  if (seed_region.dim() != cfg.grid.dim()) {
    throw DimensionError("seed region and grid dimensions differ");
  }
  IntegratorConfig integ = cfg.integrator;
  if (cfg.growth_alpha && cfg.growth_beta) {
    integ.safety = GrowthBounds::Make(
        *cfg.growth_alpha, *cfg.growth_beta, seed_region.DiameterWithOrigin(),
        cfg.sampler.m_max * cfg.sampler.horizon_t);
    report->safety_radius = integ.safety->safety_radius;
  }
  std::atomic<std::int64_t> safety{0}, failures{0}, marked{0}, outside{0};
  std::mutex merge;
  const int field_count = static_cast<int>(fields.size());
  ParallelChunks(last - first, kTrialChunk, cfg.threads,
                 [&](std::int64_t, std::int64_t begin, std::int64_t end) {
    std::vector<std::int64_t> cells;
    std::vector<Vec> ends;
    std::int64_t n_safety = 0, n_fail = 0, n_out = 0;
    for (std::int64_t i = first + begin; i < first + end; ++i) {
      CounterRng rng(cfg.seed, Stream::kReach, static_cast<std::uint64_t>(i));
      const Vec x0 = seed_region.Sample(rng);
      const FlowWord word = cfg.sampler.Sample(rng, field_count);
      ends.clear();
      try {
        TraceWord(fields, word, x0, integ, cfg, &ends);
      } catch (const IntegrationError& e) {
        if (e.kind() == IntegrationError::Kind::kSafetyRadius) {
          ++n_safety;
        } else {
          ++n_fail;
        }
        continue;
      } catch (const NonFiniteError&) {
        ++n_fail;
        continue;
      }
      for (std::size_t k = 0; k < ends.size(); ++k) {
        const auto cell = cfg.grid.CellOf(ends[k]);
        if (cell) {
          cells.push_back(*cell);
        } else {
          ++n_out;
        }
      }
    }
    safety += n_safety;
    failures += n_fail;
    outside += n_out;
    marked += static_cast<std::int64_t>(cells.size());
    std::lock_guard<std::mutex> lock(merge);
    for (std::int64_t c : cells) report->grid.Mark(c);
  });
  report->trials += last - first;
  report->safety_violations += safety;
  report->integration_failures += failures;
  report->marked_points += marked;
  report->outside_points += outside;
}

ReachReport EstimateReachable(const FieldSet& fields, const SeedRegion& seed_region,
                              const ReachConfig& cfg) {
  if (cfg.budget < 1) throw InvalidArgument("budget must be >= 1");
  ReachReport report;
  report.grid = OccupancyGrid(cfg.grid);
  ExtendReachable(fields, seed_region, cfg, 0, cfg.budget, &report);
  return report;
}

std::vector<InvarianceStat> InvarianceResidual(const OccupancyGrid& set,
                                               const FieldSet& fields, double t,
                                               std::int64_t n_samples,
                                               std::uint64_t seed,
                                               const IntegratorConfig& cfg,
                                               int threads) {
  if (set.count() == 0) throw InvalidArgument("invariance check needs a nonempty set");
  if (n_samples < 1) throw InvalidArgument("n_samples must be >= 1");
  std::vector<InvarianceStat> stats;
  const Box& box = set.geometry().box();
  for (int f = 0; f < static_cast<int>(fields.size()); ++f) {
    std::atomic<std::int64_t> mismatch{0}, evaluated{0}, escaped{0}, failed{0};
    ParallelChunks(n_samples, 4096, threads,
                   [&](std::int64_t, std::int64_t begin, std::int64_t end) {
      std::int64_t m = 0, e = 0, s = 0, fl = 0;
      for (std::int64_t i = begin; i < end; ++i) {
        CounterRng rng(seed + static_cast<std::uint64_t>(f), Stream::kInvariance,
                       static_cast<std::uint64_t>(i));
        const Vec x = rng.UniformInBox(box);
        Vec y;
        try {
          y = IntegrateFlow(*fields[f], x, t, cfg);
        } catch (const Error&) {
          ++fl;
          continue;
        }
        if (!box.Contains(y)) {
          ++s;
          continue;
        }
        ++e;
        if (set.Contains(x) != set.Contains(y)) ++m;
      }
      mismatch += m;
      evaluated += e;
      escaped += s;
      failed += fl;
    });
    InvarianceStat st;
    st.field = f;
    st.mismatches = mismatch;
    st.evaluated = evaluated;
    st.escaped = escaped;
    st.failures = failed;
    st.fraction = st.evaluated > 0
                      ? static_cast<double>(st.mismatches) / static_cast<double>(st.evaluated)
                      : 0.0;
    stats.push_back(st);
  }
  return stats;
}

ZeroOneVerdict ZeroOneCheck(const std::vector<OccupancyGrid>& estimates,
                            double tolerance) {
  if (estimates.size() < 2) throw InvalidArgument("need at least two estimates");
  ZeroOneVerdict v;
  v.tolerance = tolerance;
  for (std::size_t k = 1; k < estimates.size(); ++k) {
    v.flip_fractions.push_back(FlipFraction(estimates[k - 1], estimates[k]));
    if (k >= 2 && v.flip_fractions[k - 1] > v.flip_fractions[k - 2]) v.monotone = false;
  }
  v.stabilized = v.flip_fractions.back() <= tolerance;
  return v;
}

AlternativeVerdict AlternativeCheck(const OccupancyGrid& set, double tau_full,
                                    double tau_null) {
  AlternativeVerdict v;
  v.tau_full = tau_full;
  v.tau_null = tau_null;
  v.occupied_fraction = set.occupied_fraction();
  if (v.occupied_fraction >= 1.0 - tau_full) {
    v.verdict = Alternative::kFull;
  } else if (v.occupied_fraction <= tau_null) {
    v.verdict = Alternative::kNull;
  } else {
    v.verdict = Alternative::kNeither;
  }
  return v;
}

std::string ToString(Alternative a) {
  switch (a) {
    case Alternative::kFull: return "full";
    case Alternative::kNull: return "null";
    case Alternative::kNeither: return "neither";
  }
  return "neither";
}

}  // namespace geoctl
