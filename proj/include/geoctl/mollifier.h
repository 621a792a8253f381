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

#ifndef GEOCTL_MOLLIFIER_H_
#define GEOCTL_MOLLIFIER_H_

#include <memory>
#include <span>
#include <vector>

#include "geoctl/field.h"

namespace geoctl {

struct MollifierSpec {
  double epsilon = 0.1;
  int quadrature_points_per_axis = 9;
};

// The bump profile exp(-1 / (1 - t^2)) for |t| < 1, zero otherwise.
double BumpProfile(double t);

// 1 / integral over R^d of BumpProfile(|x|), computed by radial quadrature to
// relative accuracy well below 1e-10.
double BumpNormalization(int dim);

// Convolution of a field with the radial kernel
//   phi_eps(y) = c_d eps^-d BumpProfile(|y| / eps)
// discretized by the tensor-product midpoint rule on [-eps, eps]^d. The
// discrete weights are rescaled to sum to exactly one, so constants and (by
// node symmetry) affine fields are reproduced exactly. The midpoint error is
// O((eps / n)^2 * |D^2 F|) for smooth F with n points per axis.
class MollifiedField final : public Field {
 public:
  MollifiedField(FieldPtr base, MollifierSpec spec);

  int dim() const override { return base_->dim(); }
  // Throws NonFiniteError if the integrand is non-finite at a node.
  void Eval(std::span<const double> x, std::span<double> out) const override;
  double fd_step() const override { return base_->fd_step(); }

  const MollifierSpec& spec() const { return spec_; }
  std::size_t node_count() const { return weights_.size(); }
  // Sum of the raw (unrescaled) midpoint weights c_d eps^-d phi * cell volume.
  double raw_mass() const { return raw_mass_; }

 private:
  FieldPtr base_;
  MollifierSpec spec_;
  std::vector<Vec> offsets_;
  std::vector<double> weights_;
  double raw_mass_ = 0.0;
};

std::shared_ptr<MollifiedField> Mollify(FieldPtr base, MollifierSpec spec);

}  // namespace geoctl

#endif  // GEOCTL_MOLLIFIER_H_
