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

#ifndef GEOCTL_DENSITY_H_
#define GEOCTL_DENSITY_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "geoctl/expression.h"
#include "geoctl/field.h"
#include "geoctl/flow.h"
#include "geoctl/grid.h"

namespace geoctl {

// Density rho(t, y) of mu_t = (e^{tV})_# Lebesgue and its first two time
// derivatives at y.
struct DensityRecord {
  double t = 0.0;
  Vec y;
  double rho = 1.0;
  double rho_t = 0.0;
  double rho_tt = 0.0;
};

// rho(t, y) = exp(-int_0^t div V(e^{-tau V}(y)) dtau), with the integral
// taken by composite Gauss-Legendre (`nodes_per_unit_time` nodes per unit of
// |t|) over states from the backward flow. With z = e^{-tV}(y) and
// g = div V(z):
//   rho_t  = -rho g
//   rho_tt =  rho (g^2 + grad div V(z) . V(z)).
DensityRecord LiouvilleDensity(const Field& field, const Vec& y, double t,
                               const IntegratorConfig& cfg,
                               int nodes_per_unit_time = 16);

// Smooth compactly supported test function: a scalar expression times the
// tensor cutoff prod_k exp(1 - 1/(1 - u_k^2)), u_k the coordinate rescaled
// to [-1, 1] across the support box. Gradients are exact (dual numbers for
// the expression, closed form for the cutoff).
class TestFunction {
 public:
  explicit TestFunction(Box support, const std::string& expression = "1");

  int dim() const { return support_.dim(); }
  const Box& support() const { return support_; }
  double operator()(const Vec& x) const;
  Vec Gradient(const Vec& x) const;
  // max |f| over a 33^d (at most ~3.6e4 point) lattice of the support.
  double SupNorm() const { return sup_norm_; }

 private:
  double Cutoff(const Vec& x, Vec* grad) const;

  Box support_;
  Expression expression_;
  double sup_norm_ = 0.0;
};

// The sampled function left the sampling box: f(e^{tV}(x)) is nonzero on the
// box boundary.
class SupportEscapeError : public Error {
 public:
  using Error::Error;
};

// Bounding box of e^{-tV}(supp f), from the backward images of a lattice on
// the support boundary, widened by 5% per side.
Box PreimageBox(const Field& field, const Box& support, double t,
                const IntegratorConfig& cfg);

struct PushforwardEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
  Box sampling_box;
};

// Monte Carlo estimate of int f dmu_t = int f(e^{tV}(x)) dx over a box holding
// the preimage of supp f (PreimageBox unless given). Sample i uses
// CounterRng(seed, kPushforward, i). Throws SupportEscapeError when f o e^{tV}
// is nonzero on the sampling box boundary.
PushforwardEstimate PushforwardIntegral(const Field& field, const TestFunction& f,
                                        double t, std::int64_t n_samples,
                                        std::uint64_t seed,
                                        const IntegratorConfig& cfg,
                                        int threads = 1,
                                        std::optional<Box> sampling_box = std::nullopt);

enum class IntegrationMethod { kQuadrature, kMonteCarlo };

struct TaylorOptions {
  IntegrationMethod method = IntegrationMethod::kQuadrature;
  // Midpoint points per axis; 0 picks 4001 / 201 / 41 for d = 1 / 2 / 3.
  int points_per_axis = 0;
  std::int64_t samples = 200000;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct TaylorResult {
  double t = 0.0;
  // R(t) = int f dmu_t - int f dx + t int f div V dx.
  double remainder = 0.0;
  // R(t) / (|f|_inf t^2 / 2); 0 at t = 0.
  double bound_ratio = 0.0;
  // Zero for quadrature.
  double std_error = 0.0;
};

// Quadrature evaluates the three integrals separately with the midpoint rule.
// Monte Carlo averages the paired integrand
//   f(e^{tV}(x)) - f(x) + t f(x) div V(x)
// over one box, so the correction terms cancel sample by sample.
TaylorResult TaylorRemainder(const Field& field, const TestFunction& f, double t,
                             const IntegratorConfig& cfg,
                             const TaylorOptions& options = {});

// -sum over occupied cells of (grad phi . F + phi div F)(center) * cell volume:
// the weak form of F . grad 1_E = 0 tested against phi.
double TransportResidual(const OccupancyGrid& set, const Field& field,
                         const TestFunction& phi);

// Same with F = [U, V] and div [U, V] = U . grad div V - V . grad div U.
double BracketTransportResidual(const OccupancyGrid& set, const FieldPtr& u,
                                const FieldPtr& v, const TestFunction& phi);

// Fraction of x uniform in the grid box with f(e^{tV}(x)) > g(e^{tV}(x)) + tol.
// f and g share one geometry and satisfy f <= g cellwise (else
// InvalidArgument).
double PullbackMonotonicityCheck(const ScalarGrid& f, const ScalarGrid& g,
                                 const Field& field, double t,
                                 std::int64_t n_samples, std::uint64_t seed,
                                 const IntegratorConfig& cfg,
                                 double tolerance = 1e-12);

// Least-squares slope of log|y| against log x.
double LogLogSlope(std::span<const double> x, std::span<const double> y);

}  // namespace geoctl

#endif  // GEOCTL_DENSITY_H_
