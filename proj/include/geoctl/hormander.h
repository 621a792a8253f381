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

#ifndef GEOCTL_HORMANDER_H_
#define GEOCTL_HORMANDER_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "geoctl/common.h"
#include "geoctl/field.h"
#include "geoctl/lie_algebra.h"
#include "json.hpp"

namespace geoctl {

// Integrability exponents entered by the user for the bracket-frame
// condition: q (growth), r (divergence), s (inverse frame regularity).
struct DeclaredExponents {
  double q = 1.0;
  double r = 1.0;
  double s = 1.0;
};

// (min(q*, r))' with q* the critical Sobolev exponent of q in dimension d.
double ExponentThreshold(const DeclaredExponents& e, int dim);

struct HormanderOptions {
  std::int64_t n_samples = 10000;
  std::uint64_t seed = 0;
  // A sample is singular when |det Y| <= det_tol * prod_j |Y_j|.
  double det_tol = 1e-9;
  int threads = 1;
  std::optional<DeclaredExponents> exponents;
  // Regularity statements the scan cannot test; carried into the report.
  bool declared_flow_generation = false;
  bool declared_divergence_regularity = false;
  // Points per axis of the sub-grid for the inverse-gradient proxy (<= 16).
  int proxy_points_per_axis = 16;
};

struct HormanderReport {
  Box region;
  std::int64_t n_samples = 0;
  std::vector<BracketTerm> terms;
  double min_abs_det = 0.0;
  double median_abs_det = 0.0;
  // Over non-singular samples; +inf when every sample is singular.
  double max_condition_number = 0.0;
  double singular_fraction = 0.0;
  std::int64_t singular_count = 0;
  double det_tol = 1e-9;
  // (sum over sub-grid cells of |grad Y^{-1}|_F^s * cell volume)^{1/s} with
  // s the declared exponent (2 if none); +inf if Y is singular at a sub-grid
  // point. A proxy only.
  double inverse_grad_norm_proxy = 0.0;
  double proxy_exponent = 2.0;
  std::optional<DeclaredExponents> exponents;
  std::optional<double> exponent_threshold;
  std::optional<bool> exponent_check;
  bool declared_flow_generation = false;
  bool declared_divergence_regularity = false;

  // No singular sample, finite proxy, and the exponent arithmetic holds when
  // exponents were declared.
  bool frame_condition_passes() const;
  nlohmann::json ToJson() const;
};

// d x d matrix whose row j is terms[j] evaluated at x.
Mat AssembleY(const FieldSet& term_fields, const Vec& x);
Mat AssembleY(const std::vector<BracketTerm>& terms, const FieldSet& fields,
              const Vec& x);

// Samples x uniformly in the region (sample i from CounterRng(seed,
// kHormander, i)) and aggregates determinant and conditioning statistics of
// Y(x). Deterministic for a given seed regardless of thread count.
HormanderReport HormanderScan(const FieldSet& fields,
                              const std::vector<BracketTerm>& terms,
                              const Box& region, const HormanderOptions& options);

// The d terms from the depth <= max_depth tower maximizing min |det Y| over
// `pilot_samples` points of the region. Ties keep the earliest combination
// (shallower terms first).
std::vector<BracketTerm> SelectTerms(const FieldSet& fields, const Box& region,
                                     int max_depth = 2, int pilot_samples = 256,
                                     std::uint64_t seed = 0);

struct LocalBox {
  Box box;
  // Empty: chosen by SelectTerms for this box.
  std::vector<BracketTerm> terms;
};

struct LocalizedReport {
  std::vector<HormanderReport> reports;
  std::vector<bool> passes;
  // Passing boxes form one nonempty connected component of the overlap graph.
  bool connected = false;
  bool all_pass = false;

  nlohmann::json ToJson() const;
};

// One scan per box. Throws InvalidArgument when a lattice of `region` is not
// covered by the boxes.
LocalizedReport LocalizedScan(const FieldSet& fields,
                              const std::vector<LocalBox>& boxes,
                              const Box& region, const HormanderOptions& options);

}  // namespace geoctl

#endif  // GEOCTL_HORMANDER_H_
