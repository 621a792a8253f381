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

#include "geoctl/mollifier.h"

#include <cmath>
#include <numbers>

#include "geoctl/quadrature.h"

namespace geoctl {

double BumpProfile(double t) {
  const double a = std::abs(t);
  if (a >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - a * a));
}

double BumpNormalization(int dim) {
  if (dim < 1) throw DimensionError("dimension must be positive");
  // Surface measure of the unit sphere S^{d-1}.
  const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * dim) /
                        std::tgamma(0.5 * dim);
  static const QuadratureRule rule = GaussLegendre(20);
  const double radial = CompositeGauss(
      [dim](double r) { return BumpProfile(r) * std::pow(r, dim - 1); }, 0.0,
      1.0, 400, rule);
  // In 1D the "sphere" is two points and the radial integral runs over [0,1).
  return 1.0 / (sphere * radial);
}

MollifiedField::MollifiedField(FieldPtr base, MollifierSpec spec)
    : base_(std::move(base)), spec_(spec) {
  if (!(spec_.epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (spec_.quadrature_points_per_axis < 1) {
    throw InvalidArgument("quadrature_points_per_axis must be positive");
  }
  const int d = base_->dim();
  const int n = spec_.quadrature_points_per_axis;
  const double eps = spec_.epsilon;
  const double cell = 2.0 * eps / n;
  const double cell_volume = std::pow(cell, d);
  const double scale = BumpNormalization(d) / std::pow(eps, d);

  std::vector<int> idx(d, 0);
  Vec y(d);
  for (;;) {
    for (int k = 0; k < d; ++k) y[k] = -eps + (idx[k] + 0.5) * cell;
    const double w = scale * BumpProfile(y.norm() / eps) * cell_volume;
    if (w > 0.0) {
      offsets_.push_back(y);
      weights_.push_back(w);
      raw_mass_ += w;
    }
    int k = 0;
    while (k < d && ++idx[k] == n) idx[k++] = 0;
    if (k == d) break;
  }
  if (weights_.empty()) {
    throw InvalidArgument("mollifier quadrature has no interior nodes");
  }
  for (double& w : weights_) w /= raw_mass_;
}

void MollifiedField::Eval(std::span<const double> x,
                          std::span<double> out) const {
  const int d = dim();
  Vec shifted(d);
  Vec value(d);
  for (int i = 0; i < d; ++i) out[i] = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    for (int i = 0; i < d; ++i) shifted[i] = x[i] - offsets_[k][i];
    base_->Eval({shifted.data(), static_cast<std::size_t>(d)},
                {value.data(), static_cast<std::size_t>(d)});
    for (int i = 0; i < d; ++i) out[i] += weights_[k] * value[i];
  }
  CheckFinite(out, "mollified value");
}

std::shared_ptr<MollifiedField> Mollify(FieldPtr base, MollifierSpec spec) {
  return std::make_shared<MollifiedField>(std::move(base), spec);
}

}  // namespace geoctl
