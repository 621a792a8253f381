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

#include "geoctl/hormander.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "geoctl/growth.h"
#include "geoctl/parallel.h"
#include "geoctl/random.h"

namespace geoctl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kProxyStep = 1e-3;
constexpr std::size_t kMaxCombinations = 100000;

nlohmann::json FiniteOrNull(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

FieldSet Evaluators(const std::vector<BracketTerm>& terms, const FieldSet& fields) {
  FieldSet out;
  out.reserve(terms.size());
  for (const BracketTerm& t : terms) out.push_back(t.MakeEvaluator(fields));
  return out;
}

double RowScale(const Mat& y) {
  double scale = 1.0;
  for (int j = 0; j < y.rows(); ++j) scale *= y.row(j).norm();
  return scale;
}

bool Singular(const Mat& y, double det, double det_tol) {
  return std::abs(det) <= det_tol * RowScale(y);
}

void NextCombination(std::vector<int>& c, int n, bool* done) {
  const int k = static_cast<int>(c.size());
  int i = k - 1;
  while (i >= 0 && c[i] == n - k + i) --i;
  if (i < 0) {
    *done = true;
    return;
  }
  ++c[i];
  for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
}

}  // namespace

double ExponentThreshold(const DeclaredExponents& e, int dim) {
  return HolderConjugate(std::min(SobolevConjugate(e.q, dim), e.r));
}

Mat AssembleY(const FieldSet& term_fields, const Vec& x) {
  const int d = static_cast<int>(x.size());
  if (static_cast<int>(term_fields.size()) != d) {
    throw DimensionError("need exactly " + std::to_string(d) + " terms, got " +
                         std::to_string(term_fields.size()));
  }
  Mat y(d, d);
  for (int j = 0; j < d; ++j) y.row(j) = (*term_fields[j])(x).transpose();
  return y;
}

Mat AssembleY(const std::vector<BracketTerm>& terms, const FieldSet& fields,
              const Vec& x) {
  return AssembleY(Evaluators(terms, fields), x);
}

bool HormanderReport::frame_condition_passes() const {
  return singular_count == 0 && std::isfinite(inverse_grad_norm_proxy) &&
         exponent_check.value_or(true);
}

nlohmann::json HormanderReport::ToJson() const {
  nlohmann::json j;
  j["region"] = {{"min", std::vector<double>(region.lo.begin(), region.lo.end())},
                 {"max", std::vector<double>(region.hi.begin(), region.hi.end())}};
  j["n_samples"] = n_samples;
  std::vector<std::string> names;
  for (const BracketTerm& t : terms) names.push_back(t.ToString());
  j["terms"] = names;
  j["min_abs_det"] = FiniteOrNull(min_abs_det);
  j["median_abs_det"] = FiniteOrNull(median_abs_det);
  j["max_condition_number"] = FiniteOrNull(max_condition_number);
  j["singular_fraction"] = singular_fraction;
  j["det_tol"] = det_tol;
  j["inverse_grad_norm_proxy"] = FiniteOrNull(inverse_grad_norm_proxy);
  j["proxy_exponent"] = proxy_exponent;
  if (exponents) {
    j["declared_exponents"] = {{"q", exponents->q}, {"r", exponents->r},
                               {"s", exponents->s}};
    j["exponent_threshold"] = FiniteOrNull(*exponent_threshold);
    j["exponent_check"] = *exponent_check;
  }
  j["declared_flow_generation"] = declared_flow_generation;
  j["declared_divergence_regularity"] = declared_divergence_regularity;
  j["frame_condition"] = frame_condition_passes() ? "pass" : "fail";
  return j;
}

HormanderReport HormanderScan(const FieldSet& fields,
                              const std::vector<BracketTerm>& terms,
                              const Box& region, const HormanderOptions& options) {
  if (options.n_samples < 1) throw InvalidArgument("n_samples must be >= 1");
  if (!(options.det_tol >= 0.0)) throw InvalidArgument("det_tol must be >= 0");
  const int d = region.dim();
  const FieldSet rows = Evaluators(terms, fields);
  if (static_cast<int>(rows.size()) != d) {
    throw DimensionError("need exactly " + std::to_string(d) + " terms");
  }

  HormanderReport rep;
  rep.region = region;
  rep.n_samples = options.n_samples;
  rep.terms = terms;
  rep.det_tol = options.det_tol;
  rep.exponents = options.exponents;
  rep.declared_flow_generation = options.declared_flow_generation;
  rep.declared_divergence_regularity = options.declared_divergence_regularity;
  if (options.exponents) {
    rep.exponent_threshold = ExponentThreshold(*options.exponents, d);
    rep.exponent_check = options.exponents->s > *rep.exponent_threshold;
    rep.proxy_exponent = options.exponents->s;
  }

  const std::int64_t n = options.n_samples;
  std::vector<double> dets(n), conds(n);
  std::vector<char> singular(n);
  ParallelChunks(n, 1024, options.threads,
                 [&](std::int64_t, std::int64_t begin, std::int64_t end) {
                   for (std::int64_t i = begin; i < end; ++i) {
                     CounterRng rng(options.seed, Stream::kHormander, i);
                     const Mat y = AssembleY(rows, rng.UniformInBox(region));
                     const double det = y.determinant();
                     dets[i] = std::abs(det);
                     singular[i] = Singular(y, det, options.det_tol);
                     if (singular[i]) {
                       conds[i] = kInf;
                     } else {
                       Eigen::JacobiSVD<Mat> svd(y);
                       const Vec& sv = svd.singularValues();
                       conds[i] = sv[0] / sv[d - 1];
                     }
                   }
                 });
  rep.singular_count = std::count(singular.begin(), singular.end(), 1);
  rep.singular_fraction = static_cast<double>(rep.singular_count) / n;
  rep.min_abs_det = *std::min_element(dets.begin(), dets.end());
  std::vector<double> sorted = dets;
  std::sort(sorted.begin(), sorted.end());
  rep.median_abs_det = n % 2 ? sorted[n / 2]
                             : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  rep.max_condition_number = rep.singular_count == n ? kInf : 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    if (!singular[i]) rep.max_condition_number = std::max(rep.max_condition_number, conds[i]);
  }

  // Inverse-gradient proxy on cell centers of a sub-grid.
  const int per_axis = std::clamp(options.proxy_points_per_axis, 1, 16);
  std::int64_t points = 1;
  for (int k = 0; k < d; ++k) points *= per_axis;
  const Vec cell = region.Width() / per_axis;
  const double p = rep.proxy_exponent;
  std::vector<double> partial(ChunkCount(points, 256), 0.0);
  ParallelChunks(points, 256, options.threads,
                 [&](std::int64_t c, std::int64_t begin, std::int64_t end) {
                   double sum = 0.0;
                   Vec x(d);
                   for (std::int64_t i = begin; i < end; ++i) {
                     std::int64_t rest = i;
                     for (int k = d - 1; k >= 0; --k) {
                       x[k] = region.lo[k] + (rest % per_axis + 0.5) * cell[k];
                       rest /= per_axis;
                     }
                     double grad_sq = 0.0;
                     for (int k = 0; k < d; ++k) {
                       const double h = kProxyStep * std::max(1.0, std::abs(x[k]));
                       Vec xp = x, xm = x;
                       xp[k] += h;
                       xm[k] -= h;
                       const Mat yp = AssembleY(rows, xp);
                       const Mat ym = AssembleY(rows, xm);
                       const double dp = yp.determinant();
                       const double dm = ym.determinant();
                       if (Singular(yp, dp, options.det_tol) ||
                           Singular(ym, dm, options.det_tol)) {
                         sum = kInf;
                         break;
                       }
                       grad_sq += ((yp.inverse() - ym.inverse()) / (2.0 * h))
                                      .squaredNorm();
                     }
                     if (!std::isfinite(sum)) break;
                     sum += std::pow(std::sqrt(grad_sq), p);
                   }
                   partial[c] = sum;
                 });
  const double total = std::accumulate(partial.begin(), partial.end(), 0.0);
  rep.inverse_grad_norm_proxy =
      std::isfinite(total) ? std::pow(total * cell.prod(), 1.0 / p) : kInf;
  return rep;
}

std::vector<BracketTerm> SelectTerms(const FieldSet& fields, const Box& region,
                                     int max_depth, int pilot_samples,
                                     std::uint64_t seed) {
  if (fields.empty()) throw InvalidArgument("need at least one field");
  if (pilot_samples < 1) throw InvalidArgument("pilot_samples must be >= 1");
  const int d = region.dim();
  const std::vector<BracketTerm> tower =
      BuildTower(static_cast<int>(fields.size()), max_depth);
  const int n = static_cast<int>(tower.size());
  if (n < d) {
    throw InvalidArgument("tower has " + std::to_string(n) +
                          " terms, fewer than the dimension");
  }
  // Term values at each pilot point, computed once.
  const FieldSet evals = Evaluators(tower, fields);
  std::vector<std::vector<Vec>> values(pilot_samples);
  for (int i = 0; i < pilot_samples; ++i) {
    CounterRng rng(seed, Stream::kHormander, static_cast<std::uint64_t>(i));
    const Vec x = rng.UniformInBox(region);
    for (const FieldPtr& f : evals) values[i].push_back((*f)(x));
  }
  std::vector<int> combo(d);
  std::iota(combo.begin(), combo.end(), 0);
  std::vector<int> best = combo;
  double best_score = -1.0;
  bool done = false;
  std::size_t visited = 0;
  Mat y(d, d);
  while (!done) {
    if (++visited > kMaxCombinations) {
      throw InvalidArgument("too many term combinations; pass terms explicitly");
    }
    double score = kInf;
    for (int i = 0; i < pilot_samples && score > best_score; ++i) {
      for (int j = 0; j < d; ++j) y.row(j) = values[i][combo[j]].transpose();
      score = std::min(score, std::abs(y.determinant()));
    }
    if (score > best_score) {
      best_score = score;
      best = combo;
    }
    NextCombination(combo, n, &done);
  }
  std::vector<BracketTerm> chosen;
  for (int k : best) chosen.push_back(tower[k]);
  return chosen;
}

nlohmann::json LocalizedReport::ToJson() const {
  nlohmann::json j;
  j["boxes"] = nlohmann::json::array();
  for (std::size_t k = 0; k < reports.size(); ++k) {
    nlohmann::json r = reports[k].ToJson();
    r["pass"] = static_cast<bool>(passes[k]);
    j["boxes"].push_back(r);
  }
  j["connected"] = connected;
  j["all_pass"] = all_pass;
  return j;
}

LocalizedReport LocalizedScan(const FieldSet& fields,
                              const std::vector<LocalBox>& boxes,
                              const Box& region, const HormanderOptions& options) {
  if (boxes.empty()) throw InvalidArgument("need at least one box");
  const int d = region.dim();
  // Coverage on a lattice including the region corners.
  const int per_axis = std::max(3, std::min(17, static_cast<int>(std::pow(20000.0, 1.0 / d))));
  std::vector<int> idx(d, 0);
  while (true) {
    Vec x(d);
    for (int k = 0; k < d; ++k) {
      x[k] = region.lo[k] + region.Width()[k] * idx[k] / (per_axis - 1);
    }
    const bool covered = std::any_of(boxes.begin(), boxes.end(),
                                     [&](const LocalBox& b) { return b.box.Contains(x); });
    if (!covered) {
      throw InvalidArgument("boxes do not cover the region (first gap near " +
                            std::to_string(x[0]) + ", ...)");
    }
    int k = d - 1;
    while (k >= 0 && ++idx[k] == per_axis) idx[k--] = 0;
    if (k < 0) break;
  }

  LocalizedReport out;
  for (const LocalBox& b : boxes) {
    if (b.box.dim() != d) throw DimensionError("box dimension differs from region");
    const std::vector<BracketTerm> terms =
        b.terms.empty() ? SelectTerms(fields, b.box, 2, 256, options.seed) : b.terms;
    out.reports.push_back(HormanderScan(fields, terms, b.box, options));
    out.passes.push_back(out.reports.back().frame_condition_passes());
  }
  // Connected components of passing boxes under overlap.
  const std::size_t m = boxes.size();
  std::vector<int> component(m, -1);
  int components = 0;
  for (std::size_t s = 0; s < m; ++s) {
    if (!out.passes[s] || component[s] >= 0) continue;
    std::vector<std::size_t> stack = {s};
    component[s] = components;
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < m; ++b) {
        if (out.passes[b] && component[b] < 0 && boxes[a].box.Intersects(boxes[b].box)) {
          component[b] = components;
          stack.push_back(b);
        }
      }
    }
    ++components;
  }
  out.connected = components == 1;
  out.all_pass = std::all_of(out.passes.begin(), out.passes.end(), [](bool p) { return p; });
  return out;
}

}  // namespace geoctl
