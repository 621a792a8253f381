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

#ifndef GEOCTL_FIELD_H_
#define GEOCTL_FIELD_H_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "geoctl/common.h"
#include "geoctl/expression.h"

namespace geoctl {

inline constexpr double kDefaultFdStep = 1e-5;

// A vector field R^d -> R^d. Implementations are immutable once built and
// may be shared between threads.
class Field {
 public:
  virtual ~Field() = default;

  virtual int dim() const = 0;

  // Writes F(x) into `out`. Throws NonFiniteError on NaN/Inf.
  virtual void Eval(std::span<const double> x, std::span<double> out) const = 0;

  // Entry (i, j) is dF_i/dx_j. The default is CentralJacobian().
  virtual Mat Jacobian(const Vec& x) const { return CentralJacobian(x); }

  // Central differences, step fd_step() * max(1, |x_j|) along axis j.
  Mat CentralJacobian(const Vec& x) const;

  // Base step for finite differences.
  virtual double fd_step() const { return kDefaultFdStep; }

  // False if the field contains abs/sign/min/max anywhere in its definition.
  virtual bool smooth() const { return true; }

  // Signed kink indicators at x; empty for smooth fields.
  virtual void KinkArguments(const Vec& /*x*/, std::vector<double>* /*out*/) const {}

  Vec operator()(const Vec& x) const;

  // Always the trace of Jacobian(x).
  double Divergence(const Vec& x) const;

  // Central differences of Divergence() with step fd_step().
  Vec GradDivergence(const Vec& x) const;
};

using FieldPtr = std::shared_ptr<const Field>;
using FieldSet = std::vector<FieldPtr>;

// A field given by one expression per component.
class VectorField final : public Field {
 public:
  static std::shared_ptr<VectorField> Parse(
      const std::vector<std::string>& expressions, int dim,
      std::string label = "", double fd_step = kDefaultFdStep);

  int dim() const override { return static_cast<int>(components_.size()); }
  void Eval(std::span<const double> x, std::span<double> out) const override;

  // Dual numbers when smooth(), central differences otherwise.
  Mat Jacobian(const Vec& x) const override;

  // Forward-mode Jacobian. Throws KinkError at a kink of a non-smooth
  // primitive and NonFiniteError for infinite derivatives.
  Mat DualJacobian(const Vec& x) const;

  double fd_step() const override { return fd_step_; }
  bool smooth() const override { return kinks_ == 0; }
  void KinkArguments(const Vec& x, std::vector<double>* out) const override;

  const std::string& label() const { return label_; }
  std::vector<std::string> expressions() const;
  const std::vector<Expression>& components() const { return components_; }

 private:
  VectorField() = default;

  std::vector<Expression> components_;
  std::string label_;
  double fd_step_ = kDefaultFdStep;
  int kinks_ = 0;
};

// a * F + b * G, pointwise.
class LinearCombination final : public Field {
 public:
  LinearCombination(double a, FieldPtr f, double b, FieldPtr g);

  int dim() const override { return f_->dim(); }
  void Eval(std::span<const double> x, std::span<double> out) const override;
  Mat Jacobian(const Vec& x) const override;
  double fd_step() const override { return f_->fd_step(); }
  bool smooth() const override { return f_->smooth() && g_->smooth(); }

 private:
  double a_;
  double b_;
  FieldPtr f_;
  FieldPtr g_;
};

// Throws NonFiniteError naming `what` if any entry is NaN/Inf.
void CheckFinite(std::span<const double> values, const char* what);

}  // namespace geoctl

#endif  // GEOCTL_FIELD_H_
