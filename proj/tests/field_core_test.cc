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


#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "geoctl/expression.h"
#include "geoctl/field.h"
#include "geoctl/growth.h"
#include "geoctl/mollifier.h"
#include "geoctl/random.h"
#include "gtest/gtest.h"
#include "test_fields.h"

namespace geoctl {
namespace {

using testing::Heisenberg;
using testing::MakeField;
using testing::V;

constexpr double kExact = 0.0;
constexpr double kFdTol = 1e-8;
constexpr double kJacobianAgreement = 1e-6;

TEST(ExpressionTest, EvaluatesArithmeticAndFunctions) {
  const Expression e = Expression::Parse("2*x1^2 - sin(x2) + max(x1, x2)/4", 2);
  const double x[] = {1.5, 0.3};
  EXPECT_DOUBLE_EQ(e.Eval(x), 2 * 2.25 - std::sin(0.3) + 1.5 / 4);
  EXPECT_FALSE(e.smooth());
  EXPECT_EQ(e.max_variable(), 2);
}

TEST(ExpressionTest, PrecedenceAndUnaryMinus) {
  const double x[] = {2.0};
  EXPECT_DOUBLE_EQ(Expression::Parse("-x1^2", 1).Eval(x), -4.0);
  EXPECT_DOUBLE_EQ(Expression::Parse("2^3^2", 1).Eval(x), 512.0);
  EXPECT_DOUBLE_EQ(Expression::Parse("1 - 2 - 3", 1).Eval(x), -4.0);
  EXPECT_DOUBLE_EQ(Expression::Parse("8 / 2 / 2", 1).Eval(x), 2.0);
  EXPECT_DOUBLE_EQ(Expression::Parse("pi", 1).Eval(x), std::numbers::pi);
}

TEST(ExpressionTest, RejectsMalformedText) {
  EXPECT_THROW(Expression::Parse("x1 +", 1), ParseError);
  EXPECT_THROW(Expression::Parse("foo(x1)", 1), ParseError);
  EXPECT_THROW(Expression::Parse("(x1", 1), ParseError);
  EXPECT_THROW(Expression::Parse("x3", 2), ParseError);
  EXPECT_THROW(Expression::Parse("x0", 2), ParseError);
}

TEST(ExpressionTest, DualDerivativeMatchesClosedForm) {
  const Expression e = Expression::Parse("x1*exp(x2) + cos(x1*x2)", 2);
  const double x[] = {0.7, -0.4};
  const Dual d0 = e.EvalDual(x, 0);
  const Dual d1 = e.EvalDual(x, 1);
  EXPECT_NEAR(d0.deriv, std::exp(-0.4) + 0.4 * std::sin(0.7 * -0.4), 1e-14);
  EXPECT_NEAR(d1.deriv, 0.7 * std::exp(-0.4) - 0.7 * std::sin(0.7 * -0.4), 1e-14);
}

TEST(ExpressionTest, DualRefusesKink) {
  const Expression e = Expression::Parse("abs(x1)", 1);
  const double at_kink[] = {0.0};
  EXPECT_THROW(e.EvalDual(at_kink, 0), KinkError);
  std::vector<double> kinks;
  const double away[] = {-0.25};
  e.KinkArguments(away, &kinks);
  ASSERT_EQ(kinks.size(), 1u);
  EXPECT_DOUBLE_EQ(kinks[0], -0.25);
}

TEST(FieldTest, ParsesHeisenbergGenerator) {
  const FieldPtr x1 = MakeField({"1", "0", "-x2/2"}, 3);
  EXPECT_EQ(x1->dim(), 3);
  EXPECT_NEAR(((*x1)(V({0, 0, 0})) - V({1, 0, 0})).norm(), 0.0, kExact);
}

TEST(FieldTest, IdentityFieldInOneDimension) {
  const FieldPtr f = MakeField({"x1"}, 1);
  EXPECT_DOUBLE_EQ((*f)(V({2.0}))[0], 2.0);
  EXPECT_DOUBLE_EQ((*f)(V({0.0}))[0], 0.0);
}

TEST(FieldTest, RejectsArityMismatch) {
  EXPECT_THROW(VectorField::Parse({"x1*x2 + sin(x1)"}, 2), DimensionError);
}

TEST(FieldTest, EvaluatesSecondHeisenbergGenerator) {
  const FieldPtr x2 = Heisenberg()[1];
  EXPECT_NEAR(((*x2)(V({1, 0, 0})) - V({0, 1, 0.5})).norm(), 0.0, kExact);
}

TEST(FieldTest, NonFiniteValueIsAnError) {
  const FieldPtr f = MakeField({"1/x1"}, 1);
  EXPECT_THROW((*f)(V({0.0})), NonFiniteError);
}

TEST(FieldTest, RejectsWrongPointDimension) {
  EXPECT_THROW((*Heisenberg()[0])(V({1.0, 2.0})), DimensionError);
}

TEST(JacobianTest, LinearFieldHasUnitJacobian) {
  const FieldPtr f = MakeField({"x1"}, 1);
  for (double x : {-3.0, 0.0, 0.4, 11.0}) {
    EXPECT_DOUBLE_EQ(f->Jacobian(V({x}))(0, 0), 1.0);
  }
}

TEST(JacobianTest, HeisenbergSecondGeneratorHasOneEntry) {
  const FieldPtr x2 = Heisenberg()[1];
  Mat expected = Mat::Zero(3, 3);
  expected(2, 0) = 0.5;
  for (const Vec& x : {V({0, 0, 0}), V({0.3, -0.8, 2.0})}) {
    EXPECT_NEAR((x2->Jacobian(x) - expected).norm(), 0.0, 1e-15);
  }
}

TEST(JacobianTest, AbsAwayFromKinkUsesCentralDifferences) {
  const FieldPtr f = MakeField({"abs(x1)"}, 1);
  EXPECT_FALSE(f->smooth());
  EXPECT_NEAR(f->Jacobian(V({0.5}))(0, 0), 1.0, kFdTol);
}

TEST(JacobianTest, DualAndCentralDifferencesAgree) {
  const auto f = VectorField::Parse(
      {"x1*x2 + sin(x3)", "exp(x1/3) - x2^3/5", "cos(x1 + x2) * x3"}, 3);
  for (int i = 0; i < 200; ++i) {
    CounterRng rng(11, Stream::kTest, i);
    const Vec x = rng.UniformInBox(Box::Cube(3, 2.0));
    EXPECT_LE((f->DualJacobian(x) - f->CentralJacobian(x)).cwiseAbs().maxCoeff(),
              kJacobianAgreement);
  }
}

TEST(DivergenceTest, IdentityFieldHasDivergenceD) {
  for (int d = 1; d <= 4; ++d) {
    std::vector<std::string> comps;
    for (int k = 1; k <= d; ++k) comps.push_back("x" + std::to_string(k));
    const FieldPtr f = MakeField(comps, d);
    EXPECT_DOUBLE_EQ(f->Divergence(Vec::Constant(d, 0.3)), d);
  }
}

TEST(DivergenceTest, DivergenceFreeExamples) {
  const Vec x = V({0.2, -0.7, 0.4});
  for (const FieldPtr& f : Heisenberg()) EXPECT_DOUBLE_EQ(f->Divergence(x), 0.0);
  EXPECT_DOUBLE_EQ(testing::PlanarRotation()->Divergence(V({0.1, 0.9})), 0.0);
}

TEST(DivergenceTest, EqualsJacobianTrace) {
  const FieldPtr f = MakeField({"x1^2*x2", "sin(x1) + x2^3"}, 2);
  for (int i = 0; i < 50; ++i) {
    CounterRng rng(3, Stream::kTest, i);
    const Vec x = rng.UniformInBox(Box::Cube(2, 2.0));
    EXPECT_EQ(f->Divergence(x), f->Jacobian(x).trace());
  }
}

TEST(GradDivergenceTest, Examples) {
  EXPECT_NEAR(testing::Identity1d()->GradDivergence(V({0.6})).norm(), 0.0, 1e-8);
  const FieldPtr sq = MakeField({"x1^2", "0"}, 2);
  for (const Vec& x : {V({0, 0}), V({0.5, -1.2})}) {
    EXPECT_NEAR((sq->GradDivergence(x) - V({2, 0})).norm(), 0.0, 1e-6);
  }
  EXPECT_NEAR(Heisenberg()[0]->GradDivergence(V({0.3, 0.1, -0.2})).norm(), 0.0, 1e-6);
}

TEST(MollifierTest, KernelHasUnitMass) {
  for (int d = 1; d <= 3; ++d) {
    const double c = BumpNormalization(d);
    EXPECT_GT(c, 0.0);
  }
  EXPECT_DOUBLE_EQ(BumpProfile(1.0), 0.0);
  EXPECT_DOUBLE_EQ(BumpProfile(-1.5), 0.0);
  EXPECT_DOUBLE_EQ(BumpProfile(0.0), std::exp(-1.0));
  // 1D oracle: integral of exp(-1/(1-t^2)) over [-1, 1] by dense midpoint.
  const int n = 2000000;
  double integral = 0.0;
  for (int i = 0; i < n; ++i) integral += BumpProfile(-1.0 + (i + 0.5) * 2.0 / n);
  integral *= 2.0 / n;
  EXPECT_NEAR(BumpNormalization(1) * integral, 1.0, 1e-10);
}

TEST(MollifierTest, ConstantFieldIsReproducedExactly) {
  const auto m = Mollify(MakeField({"1", "0"}, 2), {0.2, 9});
  const Vec y = (*m)(V({0.3, -0.4}));
  EXPECT_DOUBLE_EQ(y[0], 1.0);
  EXPECT_DOUBLE_EQ(y[1], 0.0);
}

TEST(MollifierTest, LinearFieldIsReproduced) {
  for (double eps : {0.01, 0.1, 0.5}) {
    const auto m = Mollify(testing::Identity1d(), {eps, 9});
    for (double x : {-1.0, 0.0, 0.37, 2.5}) {
      EXPECT_NEAR((*m)(V({x}))[0], x, 1e-8);
    }
  }
}

TEST(MollifierTest, SignIsOddAtOrigin) {
  const auto m = Mollify(MakeField({"sign(x1)"}, 1), {0.1, 9});
  EXPECT_NEAR((*m)(V({0.0}))[0], 0.0, 1e-10);
}

TEST(MollifierTest, IsLinearInTheField) {
  const FieldPtr f = MakeField({"x1^2", "abs(x2)"}, 2);
  const FieldPtr g = MakeField({"sin(x2)", "x1*x2"}, 2);
  const MollifierSpec spec{0.15, 9};
  const auto combo = Mollify(std::make_shared<LinearCombination>(2.0, f, -0.5, g), spec);
  const auto mf = Mollify(f, spec);
  const auto mg = Mollify(g, spec);
  for (int i = 0; i < 20; ++i) {
    CounterRng rng(5, Stream::kTest, i);
    const Vec x = rng.UniformInBox(Box::Cube(2, 1.0));
    EXPECT_LE(((*combo)(x) - (2.0 * (*mf)(x) - 0.5 * (*mg)(x))).norm(), 1e-10);
  }
}

TEST(MollifierTest, PreservesSublinearGrowth) {
  // |F(x)| <= |x| + 1 for this field; the mollified field obeys the same
  // bound with beta replaced by alpha + beta.
  const double alpha = 1.0, beta = 1.0;
  const FieldPtr f = MakeField({"abs(x1) + sign(x2)", "-x2"}, 2);
  const auto m = Mollify(f, {0.3, 9});
  for (int i = 0; i < 200; ++i) {
    CounterRng rng(8, Stream::kTest, i);
    const Vec x = rng.UniformInBox(Box::Cube(2, 3.0));
    EXPECT_LE((*m)(x).norm(), alpha * x.norm() + alpha + beta + 1e-12);
  }
}

TEST(MollifierTest, ConvergesToSmoothField) {
  const FieldPtr f = MakeField({"sin(x1)*x2", "exp(-x1)"}, 2);
  const Vec x = V({0.4, -0.3});
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {0.2, 0.1, 0.05}) {
    const double err = ((*Mollify(f, {eps, 9}))(x) - (*f)(x)).norm();
    EXPECT_LT(err, prev);
    prev = err;
  }
}

TEST(GrowthTest, SafetyRadiusExamples) {
  EXPECT_NEAR(SafetyRadius(1.0, 1.0, 2.0, 1.0), 3.0 * std::numbers::e - 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(SafetyRadius(1.0, 0.0, 1.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(SafetyRadius(0.0, 1.0, 0.0, 2.0), 2.0);
  EXPECT_NEAR(SafetyRadius(1e-8, 1.0, 0.0, 2.0), 2.0, 1e-7);
  EXPECT_THROW(SafetyRadius(-1.0, 1.0, 1.0, 1.0), InvalidArgument);
}

TEST(GrowthTest, GrowthBoundsRecordRadius) {
  const GrowthBounds g = GrowthBounds::Make(1.0, 1.0, 2.0, 1.0);
  EXPECT_DOUBLE_EQ(g.safety_radius, ((1.0 * 2.0 + 1.0) * std::exp(1.0) - 1.0) / 1.0);
}

TEST(GrowthTest, SublinearFitIdentity) {
  const SublinearFit fit = FitSublinear(*testing::Identity1d(), Box::Cube(1, 1.0), 200, 1);
  EXPECT_LE(fit.alpha, 1.0);
  EXPECT_NEAR(fit.beta, 0.0, 1e-12);
  EXPECT_FALSE(fit.local_only);
}

TEST(GrowthTest, SublinearFitHeisenbergIsFeasible) {
  const Box region = Box::Cube(3, 1.0);
  const SublinearFit fit = FitSublinear(*Heisenberg()[0], region, 500, 2);
  for (int i = 0; i < 2000; ++i) {
    CounterRng rng(4, Stream::kTest, i);
    const Vec x = rng.UniformInBox(region);
    EXPECT_LE((*Heisenberg()[0])(x).norm(), fit.alpha * x.norm() + fit.beta + 1e-12);
  }
  // The hand bound alpha = 0.5, beta = 1 holds everywhere.
  for (int i = 0; i < 2000; ++i) {
    CounterRng rng(6, Stream::kTest, i);
    const Vec x = rng.UniformInBox(Box::Cube(3, 50.0));
    EXPECT_LE((*Heisenberg()[0])(x).norm(), 0.5 * x.norm() + 1.0);
  }
}

TEST(GrowthTest, QuadraticGrowthIsFlaggedLocal) {
  const SublinearFit fit = FitSublinear(*MakeField({"x1^2"}, 1), Box::Cube(1, 10.0), 200, 3);
  EXPECT_TRUE(fit.local_only);
}

TEST(GrowthTest, SobolevConjugate) {
  EXPECT_DOUBLE_EQ(SobolevConjugate(1.5, 3), 3.0);
  EXPECT_TRUE(std::isinf(SobolevConjugate(4.0, 3)));
  EXPECT_DOUBLE_EQ(SobolevConjugate(1.0, 2), 2.0);
  double prev = 0.0;
  for (double p = 1.0; p < 3.0; p += 0.05) {
    const double q = SobolevConjugate(p, 3);
    EXPECT_GE(q, prev);
    prev = q;
  }
}

TEST(GrowthTest, HolderConjugate) {
  EXPECT_DOUBLE_EQ(HolderConjugate(2.0), 2.0);
  EXPECT_DOUBLE_EQ(HolderConjugate(3.0), 1.5);
  EXPECT_TRUE(std::isinf(HolderConjugate(1.0)));
  EXPECT_DOUBLE_EQ(HolderConjugate(std::numeric_limits<double>::infinity()), 1.0);
}

}  // namespace
}  // namespace geoctl
