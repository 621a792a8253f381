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
#include <vector>

#include "geoctl/hormander.h"
#include "geoctl/random.h"
#include "gtest/gtest.h"
#include "test_fields.h"

namespace geoctl {
namespace {

using testing::Heisenberg;
using testing::MakeField;
using testing::V;

constexpr double kDetTol = 1e-9;

std::vector<BracketTerm> Terms(std::initializer_list<const char*> texts) {
  std::vector<BracketTerm> out;
  for (const char* t : texts) out.push_back(BracketTerm::Parse(t));
  return out;
}

HormanderOptions Options(std::int64_t n, std::uint64_t seed = 0) {
  HormanderOptions opt;
  opt.n_samples = n;
  opt.seed = seed;
  return opt;
}

TEST(AssembleYTest, HeisenbergFrameHasUnitDeterminant) {
  const FieldSet h = Heisenberg();
  const auto terms = Terms({"1", "2", "[1,2]"});
  for (int i = 0; i < 20; ++i) {
    CounterRng rng(1, Stream::kTest, i);
    const Vec x = rng.UniformInBox(Box::Cube(3, 2.0));
    const Mat y = AssembleY(terms, h, x);
    EXPECT_NEAR(y(0, 2), -x[1] / 2, 1e-12);
    EXPECT_NEAR(y(1, 2), x[0] / 2, 1e-12);
    EXPECT_NEAR(y.determinant(), 1.0, kDetTol);
  }
}

TEST(AssembleYTest, GrushinPairDegeneratesOnTheAxis) {
  const Mat y = AssembleY(Terms({"1", "2"}), testing::Grushin(), V({0.0, 0.4}));
  EXPECT_EQ(y.determinant(), 0.0);
}

TEST(AssembleYTest, RotationTripleIsTangentToSpheres) {
  const auto terms = Terms({"3", "1", "[3,1]"});
  for (int i = 0; i < 20; ++i) {
    CounterRng rng(2, Stream::kTest, i);
    const Vec x = rng.UniformInBox(Box::Cube(3, 1.0));
    const Mat y = AssembleY(terms, testing::Rotations(), x);
    EXPECT_LE((y * x).norm(), 1e-6);
    EXPECT_NEAR(y.determinant(), 0.0, 1e-6);
  }
}

TEST(AssembleYTest, RowOrderOnlyFlipsTheSign) {
  const FieldSet h = Heisenberg();
  const Vec x = V({0.3, -0.2, 0.5});
  const double a = AssembleY(Terms({"1", "2", "[1,2]"}), h, x).determinant();
  const double b = AssembleY(Terms({"[1,2]", "1", "2"}), h, x).determinant();
  const double c = AssembleY(Terms({"2", "1", "[1,2]"}), h, x).determinant();
  EXPECT_NEAR(std::abs(a), std::abs(b), 1e-12);
  EXPECT_NEAR(std::abs(a), std::abs(c), 1e-12);
  EXPECT_NEAR(a, -c, 1e-12);
}

TEST(HormanderScanTest, HeisenbergTriple) {
  const HormanderReport r = HormanderScan(Heisenberg(), Terms({"1", "2", "[1,2]"}),
                                          Box::Cube(3, 1.0), Options(10000));
  EXPECT_EQ(r.singular_fraction, 0.0);
  EXPECT_NEAR(r.min_abs_det, 1.0, kDetTol);
  EXPECT_LE(r.min_abs_det, r.median_abs_det);
  EXPECT_TRUE(std::isfinite(r.max_condition_number));
  EXPECT_TRUE(std::isfinite(r.inverse_grad_norm_proxy));
  EXPECT_TRUE(r.frame_condition_passes());
}

TEST(HormanderScanTest, ConditionNumberIsStableAcrossSeeds) {
  const auto terms = Terms({"1", "2", "[1,2]"});
  const double a =
      HormanderScan(Heisenberg(), terms, Box::Cube(3, 1.0), Options(10000, 1)).max_condition_number;
  const double b =
      HormanderScan(Heisenberg(), terms, Box::Cube(3, 1.0), Options(10000, 2)).max_condition_number;
  EXPECT_NEAR(a / b, 1.0, 0.1);
}

TEST(HormanderScanTest, RotationTripleIsSingularEverywhere) {
  const HormanderReport r = HormanderScan(testing::Rotations(), Terms({"3", "1", "[3,1]"}),
                                          Box::Cube(3, 1.0), Options(2000));
  EXPECT_EQ(r.singular_fraction, 1.0);
  EXPECT_TRUE(std::isinf(r.max_condition_number));
  EXPECT_FALSE(r.frame_condition_passes());
  EXPECT_TRUE(r.ToJson()["max_condition_number"].is_null());
}

TEST(HormanderScanTest, GrushinScans) {
  const FieldSet g = testing::Grushin();
  const HormanderReport pair =
      HormanderScan(g, Terms({"1", "2"}), Box::Cube(2, 1.0), Options(5000));
  EXPECT_EQ(pair.singular_fraction, 0.0);
  EXPECT_LT(pair.min_abs_det, 1e-2);
  const HormanderReport frame =
      HormanderScan(g, Terms({"1", "[1,2]"}), Box::Cube(2, 1.0), Options(5000));
  EXPECT_EQ(frame.singular_fraction, 0.0);
  EXPECT_NEAR(frame.min_abs_det, 1.0, kDetTol);
}

TEST(HormanderScanTest, IndependentOfThreadCount) {
  HormanderOptions one = Options(4000, 9);
  HormanderOptions four = one;
  four.threads = 4;
  const auto terms = Terms({"1", "2"});
  const HormanderReport a = HormanderScan(testing::Grushin(), terms, Box::Cube(2, 1.0), one);
  const HormanderReport b = HormanderScan(testing::Grushin(), terms, Box::Cube(2, 1.0), four);
  EXPECT_EQ(a.ToJson().dump(), b.ToJson().dump());
}

TEST(HormanderScanTest, SingularFractionGrowsWithTolerance) {
  // Rows (1, 0) and (1, x1): |det| / (row norm product) = |x1| / sqrt(1 + x1^2),
  // so a larger tolerance can only flag more samples.
  const FieldSet sheared = {MakeField({"1", "0"}, 2), MakeField({"1", "x1"}, 2)};
  double prev = 0.0;
  for (double tol : {1e-9, 1e-3, 1e-2, 1e-1, 0.5}) {
    HormanderOptions opt = Options(4000, 3);
    opt.det_tol = tol;
    const HormanderReport r = HormanderScan(sheared, Terms({"1", "2"}), Box::Cube(2, 1.0), opt);
    EXPECT_GE(r.singular_fraction, prev);
    EXPECT_GE(r.singular_fraction, 0.0);
    EXPECT_LE(r.singular_fraction, 1.0);
    prev = r.singular_fraction;
  }
  EXPECT_GT(prev, 0.0);
}

TEST(HormanderScanTest, ScalingATermScalesTheDeterminant) {
  const FieldSet g = {MakeField({"1", "0"}, 2), MakeField({"1", "x1"}, 2)};
  const FieldSet scaled = {g[0], MakeField({"3", "3*x1"}, 2)};
  const auto terms = Terms({"1", "2"});
  HormanderOptions opt = Options(3000, 4);
  opt.det_tol = 0.05;
  const HormanderReport a = HormanderScan(g, terms, Box::Cube(2, 1.0), opt);
  const HormanderReport b = HormanderScan(scaled, terms, Box::Cube(2, 1.0), opt);
  EXPECT_NEAR(b.min_abs_det, 3.0 * a.min_abs_det, 1e-12);
  EXPECT_GT(a.singular_fraction, 0.0);
  EXPECT_EQ(a.singular_fraction, b.singular_fraction);
}

TEST(HormanderScanTest, DeclaredExponents) {
  DeclaredExponents e;
  e.q = 1.5;
  e.r = 2.0;
  e.s = 2.5;
  EXPECT_DOUBLE_EQ(ExponentThreshold(e, 3), 2.0);
  HormanderOptions opt = Options(500);
  opt.exponents = e;
  opt.declared_flow_generation = true;
  const HormanderReport pass =
      HormanderScan(Heisenberg(), Terms({"1", "2", "[1,2]"}), Box::Cube(3, 1.0), opt);
  ASSERT_TRUE(pass.exponent_check.has_value());
  EXPECT_TRUE(*pass.exponent_check);
  EXPECT_TRUE(pass.frame_condition_passes());
  EXPECT_TRUE(pass.ToJson()["declared_flow_generation"].get<bool>());
  opt.exponents->s = 1.5;
  const HormanderReport fail =
      HormanderScan(Heisenberg(), Terms({"1", "2", "[1,2]"}), Box::Cube(3, 1.0), opt);
  EXPECT_FALSE(*fail.exponent_check);
  EXPECT_FALSE(fail.frame_condition_passes());
}

TEST(SelectTermsTest, FindsTheHeisenbergFrame) {
  const auto terms = SelectTerms(Heisenberg(), Box::Cube(3, 1.0), 2, 128, 1);
  ASSERT_EQ(terms.size(), 3u);
  const HormanderReport r = HormanderScan(Heisenberg(), terms, Box::Cube(3, 1.0), Options(1000));
  EXPECT_NEAR(r.min_abs_det, 1.0, kDetTol);
}

TEST(LocalizedScanTest, SingleBoxEqualsPlainScan) {
  const auto terms = Terms({"1", "2", "[1,2]"});
  const Box region = Box::Cube(3, 1.0);
  const LocalizedReport loc =
      LocalizedScan(Heisenberg(), {LocalBox{region, terms}}, region, Options(1000));
  const HormanderReport plain = HormanderScan(Heisenberg(), terms, region, Options(1000));
  ASSERT_EQ(loc.reports.size(), 1u);
  EXPECT_EQ(loc.reports[0].ToJson().dump(), plain.ToJson().dump());
  EXPECT_TRUE(loc.all_pass);
  EXPECT_TRUE(loc.connected);
}

TEST(LocalizedScanTest, GrushinCoverWithPerBoxTerms) {
  const std::vector<LocalBox> boxes = {
      {Box(V({0.1, -1.0}), V({1.0, 1.0})), Terms({"1", "2"})},
      {Box(V({-1.0, -1.0}), V({-0.1, 1.0})), Terms({"1", "2"})},
      {Box(V({-0.2, -1.0}), V({0.2, 1.0})), Terms({"1", "[1,2]"})},
  };
  const LocalizedReport r =
      LocalizedScan(testing::Grushin(), boxes, Box::Cube(2, 1.0), Options(2000));
  EXPECT_TRUE(r.all_pass);
  EXPECT_TRUE(r.connected);
}

TEST(LocalizedScanTest, RotationCoverFails) {
  const std::vector<LocalBox> boxes = {
      {Box(V({-1.0, -1.0, -1.0}), V({0.1, 1.0, 1.0})), {}},
      {Box(V({-0.1, -1.0, -1.0}), V({1.0, 1.0, 1.0})), {}},
  };
  const LocalizedReport r =
      LocalizedScan(testing::Rotations(), boxes, Box::Cube(3, 1.0), Options(500));
  EXPECT_FALSE(r.all_pass);
  for (bool p : r.passes) EXPECT_FALSE(p);
  EXPECT_FALSE(r.connected);
}

TEST(LocalizedScanTest, RejectsIncompleteCover) {
  const std::vector<LocalBox> boxes = {
      {Box(V({0.1, -1.0}), V({1.0, 1.0})), Terms({"1", "2"})}};
  EXPECT_THROW(LocalizedScan(testing::Grushin(), boxes, Box::Cube(2, 1.0), Options(100)),
               InvalidArgument);
}

}  // namespace
}  // namespace geoctl
