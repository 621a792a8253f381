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

#include "geoctl/field.h"

#include <cmath>

namespace geoctl {

void CheckFinite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw NonFiniteError(std::string("non-finite ") + what);
  }
}

Vec Field::operator()(const Vec& x) const {
  if (x.size() != dim()) throw DimensionError("point dimension mismatch");
  Vec out(dim());
  Eval({x.data(), static_cast<std::size_t>(x.size())},
       {out.data(), static_cast<std::size_t>(out.size())});
  return out;
}

Mat Field::CentralJacobian(const Vec& x) const {
  const int d = dim();
  Mat jac(d, d);
  Vec xp = x;
  Vec xm = x;
  for (int j = 0; j < d; ++j) {
    const double h = fd_step() * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    jac.col(j) = ((*this)(xp) - (*this)(xm)) / (xp[j] - xm[j]);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  CheckFinite({jac.data(), static_cast<std::size_t>(jac.size())}, "derivative");
  return jac;
}

double Field::Divergence(const Vec& x) const { return Jacobian(x).trace(); }

Vec Field::GradDivergence(const Vec& x) const {
  const int d = dim();
  Vec grad(d);
  Vec xp = x;
  Vec xm = x;
  for (int j = 0; j < d; ++j) {
    const double h = fd_step() * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    grad[j] = (Divergence(xp) - Divergence(xm)) / (xp[j] - xm[j]);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  CheckFinite({grad.data(), static_cast<std::size_t>(grad.size())},
              "divergence gradient");
  return grad;
}

std::shared_ptr<VectorField> VectorField::Parse(
    const std::vector<std::string>& expressions, int dim, std::string label,
    double fd_step) {
  if (dim < 1) throw DimensionError("dimension must be positive");
  if (static_cast<int>(expressions.size()) != dim) {
    throw DimensionError("expected " + std::to_string(dim) +
                         " component expressions, got " +
                         std::to_string(expressions.size()));
  }
  if (!(fd_step > 0.0)) throw InvalidArgument("fd_step must be positive");
  std::shared_ptr<VectorField> field(new VectorField());
  field->label_ = std::move(label);
  field->fd_step_ = fd_step;
  for (const auto& text : expressions) {
    field->components_.push_back(Expression::Parse(text, dim));
    field->kinks_ += field->components_.back().kink_count();
  }
  return field;
}

void VectorField::Eval(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < components_.size(); ++i) {
    out[i] = components_[i].Eval(x);
  }
  CheckFinite(out, "field value");
}

Mat VectorField::Jacobian(const Vec& x) const {
  return smooth() ? DualJacobian(x) : CentralJacobian(x);
}

Mat VectorField::DualJacobian(const Vec& x) const {
  const int d = dim();
  if (x.size() != d) throw DimensionError("point dimension mismatch");
  Mat jac(d, d);
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      jac(i, j) = components_[i].EvalDual(xs, j).deriv;
    }
  }
  CheckFinite({jac.data(), static_cast<std::size_t>(jac.size())}, "derivative");
  return jac;
}

void VectorField::KinkArguments(const Vec& x, std::vector<double>* out) const {
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  for (const auto& c : components_) c.KinkArguments(xs, out);
}

std::vector<std::string> VectorField::expressions() const {
  std::vector<std::string> out;
  out.reserve(components_.size());
  for (const auto& c : components_) out.push_back(c.text());
  return out;
}

LinearCombination::LinearCombination(double a, FieldPtr f, double b, FieldPtr g)
    : a_(a), b_(b), f_(std::move(f)), g_(std::move(g)) {
  if (f_->dim() != g_->dim()) throw DimensionError("field dimensions differ");
}

void LinearCombination::Eval(std::span<const double> x,
                             std::span<double> out) const {
  Vec gv(dim());
  f_->Eval(x, out);
  g_->Eval(x, {gv.data(), static_cast<std::size_t>(gv.size())});
  for (int i = 0; i < dim(); ++i) out[i] = a_ * out[i] + b_ * gv[i];
}

Mat LinearCombination::Jacobian(const Vec& x) const {
  return a_ * f_->Jacobian(x) + b_ * g_->Jacobian(x);
}

}  // namespace geoctl
