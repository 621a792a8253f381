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

#include "geoctl/density.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "geoctl/lie_algebra.h"
#include "geoctl/parallel.h"
#include "geoctl/quadrature.h"
#include "geoctl/random.h"

namespace geoctl {
namespace {

constexpr std::int64_t kChunk = 1024;

// Lattice points of a box with `n` points per axis (endpoints included).
// With boundary_only, only points with at least one extreme coordinate.
std::vector<Vec> BoxLattice(const Box& box, int n, bool boundary_only) {
  const int d = box.dim();
  std::vector<Vec> points;
  std::vector<int> idx(d, 0);
  while (true) {
    bool on_boundary = false;
    Vec x(d);
    for (int k = 0; k < d; ++k) {
      on_boundary |= idx[k] == 0 || idx[k] == n - 1;
      x[k] = box.lo[k] + box.Width()[k] * idx[k] / (n - 1);
    }
    if (on_boundary || !boundary_only) points.push_back(std::move(x));
    int k = d - 1;
    while (k >= 0 && ++idx[k] == n) idx[k--] = 0;
    if (k < 0) break;
  }
  return points;
}

int LatticeSize(int dim, double budget) {
  return std::max(3, static_cast<int>(std::floor(std::pow(budget, 1.0 / dim))));
}

Box Hull(const Box& a, const Box& b) {
  return Box(a.lo.cwiseMin(b.lo), a.hi.cwiseMax(b.hi));
}

}  // namespace

DensityRecord LiouvilleDensity(const Field& field, const Vec& y, double t,
                               const IntegratorConfig& cfg,
                               int nodes_per_unit_time) {
  if (nodes_per_unit_time < 1) {
    throw InvalidArgument("nodes_per_unit_time must be >= 1");
  }
  DensityRecord rec;
  rec.t = t;
  rec.y = y;
  Vec z = y;
  double integral = 0.0;
  if (t != 0.0) {
    const double span = std::abs(t);
    const int panels = std::max(1, static_cast<int>(std::ceil(span)));
    const QuadratureRule rule = GaussLegendre(nodes_per_unit_time);
    const double h = span / panels;
    // Backward-flow times -tau, increasing in magnitude, then -t itself.
    std::vector<double> times;
    std::vector<double> weights;
    for (int p = 0; p < panels; ++p) {
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double tau = (p + 0.5) * h + 0.5 * h * rule.nodes[k];
        times.push_back(-std::copysign(tau, t));
        weights.push_back(0.5 * h * rule.weights[k]);
      }
    }
    std::vector<std::size_t> order(times.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(times[a]) < std::abs(times[b]);
    });
    std::vector<double> sorted;
    for (std::size_t i : order) sorted.push_back(times[i]);
    sorted.push_back(-t);
    const std::vector<Vec> states = IntegrateFlowAt(field, y, sorted, cfg);
    for (std::size_t i = 0; i < order.size(); ++i) {
      integral += weights[order[i]] * field.Divergence(states[i]);
    }
    // The integral runs over tau in [0, t]; for t < 0 it changes sign.
    if (t < 0) integral = -integral;
    z = states.back();
  }
  rec.rho = std::exp(-integral);
  const double g = field.Divergence(z);
  rec.rho_t = -rec.rho * g;
  rec.rho_tt = rec.rho * (g * g + field.GradDivergence(z).dot(field(z)));
  return rec;
}

TestFunction::TestFunction(Box support, const std::string& expression)
    : support_(std::move(support)),
      expression_(Expression::Parse(expression, support_.dim())) {
  const int n = std::min(33, LatticeSize(dim(), 36000.0));
  for (const Vec& x : BoxLattice(support_, n, false)) {
    sup_norm_ = std::max(sup_norm_, std::abs((*this)(x)));
  }
}

double TestFunction::Cutoff(const Vec& x, Vec* grad) const {
  const int d = dim();
  const Vec half = 0.5 * support_.Width();
  const Vec center = support_.Center();
  double value = 1.0;
  Vec factors(d), dfactors(d);
  for (int k = 0; k < d; ++k) {
    const double u = (x[k] - center[k]) / half[k];
    const double q = 1.0 - u * u;
    if (q <= 0.0) {
      if (grad) grad->setZero(d);
      return 0.0;
    }
    factors[k] = std::exp(1.0 - 1.0 / q);
    dfactors[k] = factors[k] * (-2.0 * u / (q * q)) / half[k];
    value *= factors[k];
  }
  if (grad) {
    grad->resize(d);
    for (int k = 0; k < d; ++k) {
      double others = 1.0;
      for (int j = 0; j < d; ++j) {
        if (j != k) others *= factors[j];
      }
      (*grad)[k] = dfactors[k] * others;
    }
  }
  return value;
}

double TestFunction::operator()(const Vec& x) const {
  const double c = Cutoff(x, nullptr);
  if (c == 0.0) return 0.0;
  return c * expression_.Eval(std::span<const double>(x.data(), x.size()));
}

Vec TestFunction::Gradient(const Vec& x) const {
  Vec dc;
  const double c = Cutoff(x, &dc);
  if (c == 0.0) return Vec::Zero(dim());
  const std::span<const double> xs(x.data(), x.size());
  Vec grad(dim());
  double value = 0.0;
  for (int k = 0; k < dim(); ++k) {
    const Dual e = expression_.EvalDual(xs, k);
    value = e.value;
    grad[k] = e.deriv * c;
  }
  return grad + value * dc;
}

Box PreimageBox(const Field& field, const Box& support, double t,
                const IntegratorConfig& cfg) {
  const int n = LatticeSize(support.dim(), 4000.0);
  const std::vector<Vec> lattice = BoxLattice(support, std::min(n, 9), true);
  Vec lo = Vec::Constant(support.dim(), std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  for (const Vec& p : lattice) {
    const Vec q = IntegrateFlow(field, p, -t, cfg);
    lo = lo.cwiseMin(q);
    hi = hi.cwiseMax(q);
  }
  const Vec pad = 0.05 * (hi - lo) + Vec::Constant(lo.size(), 1e-9);
  return Box(lo - pad, hi + pad);
}

namespace {

void CheckNoEscape(const Field& field, const TestFunction& f, double t,
                   const Box& box, const IntegratorConfig& cfg) {
  const int n = std::min(9, LatticeSize(box.dim(), 4000.0));
  for (const Vec& p : BoxLattice(box, n, true)) {
    if (f(IntegrateFlow(field, p, t, cfg)) != 0.0) {
      throw SupportEscapeError(
          "test function is nonzero on the sampling box boundary after the "
          "flow; enlarge the sampling box");
    }
  }
}

}  // namespace

PushforwardEstimate PushforwardIntegral(const Field& field, const TestFunction& f,
                                        double t, std::int64_t n_samples,
                                        std::uint64_t seed,
                                        const IntegratorConfig& cfg, int threads,
                                        std::optional<Box> sampling_box) {
  if (n_samples < 2) throw InvalidArgument("n_samples must be >= 2");
  if (field.dim() != f.dim()) {
    throw DimensionError("test function and field dimensions differ");
  }
  PushforwardEstimate est;
  est.sampling_box =
      sampling_box ? *sampling_box : PreimageBox(field, f.support(), t, cfg);
  CheckNoEscape(field, f, t, est.sampling_box, cfg);

  const std::int64_t chunks = ChunkCount(n_samples, kChunk);
  std::vector<double> sums(chunks, 0.0), squares(chunks, 0.0);
  ParallelChunks(n_samples, kChunk, threads,
                 [&](std::int64_t c, std::int64_t begin, std::int64_t end) {
                   double s = 0.0, s2 = 0.0;
                   for (std::int64_t i = begin; i < end; ++i) {
                     CounterRng rng(seed, Stream::kPushforward, i);
                     const Vec x = rng.UniformInBox(est.sampling_box);
                     const double v = f(IntegrateFlow(field, x, t, cfg));
                     s += v;
                     s2 += v * v;
                   }
                   sums[c] = s;
                   squares[c] = s2;
                 });
  const double n = static_cast<double>(n_samples);
  const double mean = std::accumulate(sums.begin(), sums.end(), 0.0) / n;
  const double mean2 = std::accumulate(squares.begin(), squares.end(), 0.0) / n;
  const double vol = est.sampling_box.Volume();
  est.value = vol * mean;
  est.std_error = vol * std::sqrt(std::max(0.0, mean2 - mean * mean) / (n - 1));
  est.samples = n_samples;
  return est;
}

TaylorResult TaylorRemainder(const Field& field, const TestFunction& f, double t,
                             const IntegratorConfig& cfg,
                             const TaylorOptions& options) {
  if (field.dim() != f.dim()) {
    throw DimensionError("test function and field dimensions differ");
  }
  TaylorResult result;
  result.t = t;
  if (t == 0.0) return result;

  const int d = f.dim();
  const Box sampling = PreimageBox(field, f.support(), t, cfg);
  CheckNoEscape(field, f, t, sampling, cfg);
  const Box region = Hull(sampling, f.support());
  auto paired = [&](const Vec& x) {
    const double fx = f(x);
    double v = f(IntegrateFlow(field, x, t, cfg)) - fx;
    if (fx != 0.0) v += t * fx * field.Divergence(x);
    return v;
  };

  if (options.method == IntegrationMethod::kQuadrature) {
    int n = options.points_per_axis;
    if (n <= 0) n = d == 1 ? 4001 : d == 2 ? 201 : d == 3 ? 41 : 11;
    std::int64_t total = 1;
    for (int k = 0; k < d; ++k) total *= n;
    const Vec width = region.Width() / n;
    const std::int64_t chunks = ChunkCount(total, kChunk);
    std::vector<double> sums(chunks, 0.0);
    ParallelChunks(total, kChunk, options.threads,
                   [&](std::int64_t c, std::int64_t begin, std::int64_t end) {
                     double s = 0.0;
                     Vec x(d);
                     for (std::int64_t i = begin; i < end; ++i) {
                       std::int64_t rest = i;
                       for (int k = d - 1; k >= 0; --k) {
                         x[k] = region.lo[k] + (rest % n + 0.5) * width[k];
                         rest /= n;
                       }
                       s += paired(x);
                     }
                     sums[c] = s;
                   });
    result.remainder =
        std::accumulate(sums.begin(), sums.end(), 0.0) * width.prod();
  } else {
    const std::int64_t total = options.samples;
    if (total < 2) throw InvalidArgument("samples must be >= 2");
    const std::int64_t chunks = ChunkCount(total, kChunk);
    std::vector<double> sums(chunks, 0.0), squares(chunks, 0.0);
    ParallelChunks(total, kChunk, options.threads,
                   [&](std::int64_t c, std::int64_t begin, std::int64_t end) {
                     double s = 0.0, s2 = 0.0;
                     for (std::int64_t i = begin; i < end; ++i) {
                       CounterRng rng(options.seed, Stream::kTaylor, i);
                       const double v = paired(rng.UniformInBox(region));
                       s += v;
                       s2 += v * v;
                     }
                     sums[c] = s;
                     squares[c] = s2;
                   });
    const double n = static_cast<double>(total);
    const double mean = std::accumulate(sums.begin(), sums.end(), 0.0) / n;
    const double mean2 =
        std::accumulate(squares.begin(), squares.end(), 0.0) / n;
    result.remainder = region.Volume() * mean;
    result.std_error =
        region.Volume() * std::sqrt(std::max(0.0, mean2 - mean * mean) / (n - 1));
  }
  const double scale = f.SupNorm() * t * t / 2.0;
  result.bound_ratio = scale > 0.0 ? result.remainder / scale : 0.0;
  return result;
}

double TransportResidual(const OccupancyGrid& set, const Field& field,
                         const TestFunction& phi) {
  const GridGeometry& geo = set.geometry();
  if (geo.dim() != field.dim() || geo.dim() != phi.dim()) {
    throw DimensionError("grid, field and test function dimensions differ");
  }
  double sum = 0.0;
  for (std::int64_t c = 0; c < geo.cell_count(); ++c) {
    if (!set.Test(c)) continue;
    const Vec x = geo.CellCenter(c);
    const double p = phi(x);
    const Vec grad = phi.Gradient(x);
    if (p == 0.0 && grad.isZero(0.0)) continue;
    sum += grad.dot(field(x)) + p * field.Divergence(x);
  }
  return -sum * geo.cell_volume();
}

double BracketTransportResidual(const OccupancyGrid& set, const FieldPtr& u,
                                const FieldPtr& v, const TestFunction& phi) {
  const GridGeometry& geo = set.geometry();
  if (geo.dim() != u->dim() || geo.dim() != v->dim() || geo.dim() != phi.dim()) {
    throw DimensionError("grid, fields and test function dimensions differ");
  }
  double sum = 0.0;
  for (std::int64_t c = 0; c < geo.cell_count(); ++c) {
    if (!set.Test(c)) continue;
    const Vec x = geo.CellCenter(c);
    const double p = phi(x);
    const Vec grad = phi.Gradient(x);
    if (p == 0.0 && grad.isZero(0.0)) continue;
    sum += grad.dot(Bracket(*u, *v, x)) + p * DivBracket(*u, *v, x);
  }
  return -sum * geo.cell_volume();
}

double PullbackMonotonicityCheck(const ScalarGrid& f, const ScalarGrid& g,
                                 const Field& field, double t,
                                 std::int64_t n_samples, std::uint64_t seed,
                                 const IntegratorConfig& cfg, double tolerance) {
  if (!(f.geometry() == g.geometry())) {
    throw InvalidArgument("f and g must share one grid geometry");
  }
  if (f.geometry().dim() != field.dim()) {
    throw DimensionError("grid and field dimensions differ");
  }
  for (std::int64_t c = 0; c < f.geometry().cell_count(); ++c) {
    if (f[c] > g[c]) throw InvalidArgument("precondition f <= g violated");
  }
  if (n_samples < 1) throw InvalidArgument("n_samples must be >= 1");
  std::int64_t violations = 0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    CounterRng rng(seed, Stream::kPullback, i);
    const Vec y = IntegrateFlow(field, rng.UniformInBox(f.geometry().box()), t, cfg);
    if (f.ValueAt(y) > g.ValueAt(y) + tolerance) ++violations;
  }
  return static_cast<double>(violations) / n_samples;
}

double LogLogSlope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("LogLogSlope needs two equal-length series of >= 2");
  }
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || y[i] == 0.0) {
      throw InvalidArgument("LogLogSlope needs x > 0 and y != 0");
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(std::abs(y[i]));
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw InvalidArgument("LogLogSlope needs distinct x values");
  return sxy / sxx;
}

}  // namespace geoctl
