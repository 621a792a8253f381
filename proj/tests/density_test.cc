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
#include <vector>

#include "geoctl/density.h"
#include "geoctl/grid.h"
#include "geoctl/random.h"
#include "gtest/gtest.h"
#include "test_fields.h"

namespace geoctl {
namespace {

using testing::Heisenberg;
using testing::MakeField;
using testing::V;

constexpr double kDensityTol = 1e-6;

// Dense midpoint quadrature of f over its support.
double Integral1d(const TestFunction& f, int n = 200000) {
  const double lo = f.support().lo[0], hi = f.support().hi[0];
  const double h = (hi - lo) / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += f(V({lo + (i + 0.5) * h}));
  return sum * h;
}

double Integral2d(const TestFunction& f, int n = 800) {
  const Box& b = f.support();
  const Vec h = b.Width() / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      sum += f(V({b.lo[0] + (i + 0.5) * h[0], b.lo[1] + (j + 0.5) * h[1]}));
    }
  }
  return sum * h.prod();
}

TEST(LiouvilleTest, LinearFieldHasExponentialDensity) {
  for (double t : {-1.0, -0.5, 0.5, 1.0}) {
    for (double y : {-0.8, 0.0, 2.0}) {
      const DensityRecord r = LiouvilleDensity(*testing::Identity1d(), V({y}), t, {});
      EXPECT_NEAR(r.rho, std::exp(-t), kDensityTol);
      EXPECT_NEAR(r.rho_t, -std::exp(-t), kDensityTol);
      EXPECT_NEAR(r.rho_tt, std::exp(-t), kDensityTol);
    }
  }
}

TEST(LiouvilleTest, QuadraticFieldMatchesChangeOfVariables) {
  // e^{tV}(x) = x / (1 - t x), so rho(t, y) = (1 + t y)^-2.
  const FieldPtr f = MakeField({"x1^2"}, 1);
  for (double t : {-0.5, 0.3, 0.8}) {
    for (double y : {-0.4, 0.25, 0.6}) {
      const double a = 1.0 + t * y;
      const DensityRecord r = LiouvilleDensity(*f, V({y}), t, {});
      EXPECT_NEAR(r.rho, std::pow(a, -2), kDensityTol);
      EXPECT_NEAR(r.rho_t, -2.0 * y * std::pow(a, -3), kDensityTol);
      EXPECT_NEAR(r.rho_tt, 6.0 * y * y * std::pow(a, -4), 1e-5);
    }
  }
}

TEST(LiouvilleTest, RotationPreservesVolume) {
  for (double t : {-2.0, 0.7, 3.0}) {
    const DensityRecord r = LiouvilleDensity(*testing::PlanarRotation(), V({0.4, -0.9}), t, {});
    EXPECT_NEAR(r.rho, 1.0, 1e-8);
    EXPECT_NEAR(r.rho_t, 0.0, 1e-8);
    EXPECT_NEAR(r.rho_tt, 0.0, 1e-6);
  }
}

TEST(LiouvilleTest, InitialDensityIsOne) {
  const FieldPtr f = MakeField({"x1*x2", "sin(x1) + x2^2"}, 2);
  for (int i = 0; i < 20; ++i) {
    CounterRng rng(1, Stream::kTest, i);
    const Vec y = rng.UniformInBox(Box::Cube(2, 1.0));
    const DensityRecord r = LiouvilleDensity(*f, y, 0.0, {});
    EXPECT_EQ(r.rho, 1.0);
    EXPECT_NEAR(r.rho_t, -f->Divergence(y), 1e-12);
  }
}

TEST(TestFunctionTest, VanishesOutsideSupport) {
  const TestFunction f(Box(V({-0.5, 0.0}), V({0.5, 1.0})), "1 + x1*x2");
  EXPECT_EQ(f(V({0.6, 0.5})), 0.0);
  EXPECT_EQ(f(V({0.0, 1.0})), 0.0);
  EXPECT_EQ(f.Gradient(V({-0.7, 0.2})).norm(), 0.0);
  EXPECT_NEAR(f(V({0.0, 0.5})), 1.0, 1e-15);
  EXPECT_GE(f.SupNorm(), 1.0);
}

TEST(TestFunctionTest, GradientMatchesCentralDifferences) {
  const TestFunction f(Box(V({-0.5, -0.6, -0.4}), V({0.7, 0.5, 0.6})), "1 + x1 + x2*x3");
  for (int i = 0; i < 100; ++i) {
    CounterRng rng(2, Stream::kTest, i);
    const Vec x = rng.UniformInBox(f.support());
    Vec fd(3);
    for (int k = 0; k < 3; ++k) {
      Vec e = Vec::Zero(3);
      e[k] = 1e-6;
      fd[k] = (f(x + e) - f(x - e)) / 2e-6;
    }
    EXPECT_LE((f.Gradient(x) - fd).norm(), 1e-6);
  }
}

TEST(PushforwardTest, ZeroTimeIsPlainIntegral) {
  const TestFunction f(Box(V({-0.3}), V({0.6})), "1 + x1");
  const PushforwardEstimate e =
      PushforwardIntegral(*testing::Identity1d(), f, 0.0, 100000, 1, {});
  EXPECT_NEAR(e.value, Integral1d(f), 3 * e.std_error);
}

TEST(PushforwardTest, RotationIsMeasurePreserving) {
  const TestFunction f(Box(V({-0.2, -0.5}), V({0.6, 0.4})), "2 + x1 - x2^2");
  const double exact = Integral2d(f);
  for (double t : {0.3, 1.0}) {
    const PushforwardEstimate e =
        PushforwardIntegral(*testing::PlanarRotation(), f, t, 200000, 3, {});
    EXPECT_NEAR(e.value, exact, 3 * e.std_error);
  }
}

TEST(PushforwardTest, LinearFieldScalesTheIntegral) {
  const TestFunction f(Box(V({-0.4}), V({0.9})), "1 + x1^2");
  const double exact = Integral1d(f);
  for (double t : {0.5, -0.5}) {
    const PushforwardEstimate e =
        PushforwardIntegral(*testing::Identity1d(), f, t, 100000, 4, {});
    EXPECT_NEAR(e.value, std::exp(-t) * exact, 3 * e.std_error);
  }
}

TEST(PushforwardTest, DetectsTooSmallSamplingBox) {
  const TestFunction f(Box(V({-0.4}), V({0.9})));
  EXPECT_THROW(PushforwardIntegral(*testing::Identity1d(), f, 1.0, 1000, 1, {}, 1,
                                   Box(V({-0.1}), V({0.1}))),
               SupportEscapeError);
}

TEST(PushforwardTest, AgreesWithDensityQuadrature) {
  // int f dmu_t = int f rho(t, .) dy.
  const FieldPtr v = MakeField({"x1^2"}, 1);
  const TestFunction f(Box(V({0.1}), V({0.8})), "1 + x1");
  const double t = 0.5;
  const int n = 400;
  double quad = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = 0.1 + (i + 0.5) * 0.7 / n;
    quad += f(V({y})) * LiouvilleDensity(*v, V({y}), t, {}).rho;
  }
  quad *= 0.7 / n;
  const PushforwardEstimate e = PushforwardIntegral(*v, f, t, 200000, 5, {});
  EXPECT_NEAR(e.value, quad, 3 * e.std_error + 1e-6);
}

TEST(PushforwardTest, ThreadCountDoesNotChangeTheEstimate) {
  const TestFunction f(Box(V({-0.2, -0.5}), V({0.6, 0.4})));
  const auto a = PushforwardIntegral(*testing::PlanarRotation(), f, 0.4, 30000, 6, {}, 1);
  const auto b = PushforwardIntegral(*testing::PlanarRotation(), f, 0.4, 30000, 6, {}, 4);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(TaylorTest, ZeroTimeIsExactlyZero) {
  const TestFunction f(Box(V({-0.5}), V({0.7})));
  const TaylorResult r = TaylorRemainder(*testing::Identity1d(), f, 0.0, {});
  EXPECT_EQ(r.remainder, 0.0);
  EXPECT_EQ(r.bound_ratio, 0.0);
}

TEST(TaylorTest, LinearFieldClosedForm) {
  const TestFunction f(Box(V({-0.5}), V({0.7})), "1 + x1");
  const double integral = Integral1d(f);
  std::vector<double> ts = {0.2, 0.1, 0.05, 0.025}, rs;
  for (double t : ts) {
    const TaylorResult r = TaylorRemainder(*testing::Identity1d(), f, t, {});
    const double exact = (std::exp(-t) - 1.0 + t) * integral;
    EXPECT_NEAR(r.remainder, exact, 0.05 * std::abs(exact));
    EXPECT_LE(std::abs(r.bound_ratio), 2.0);
    rs.push_back(r.remainder);
  }
  EXPECT_GE(LogLogSlope(ts, rs), 1.9);
}

TEST(TaylorTest, RotationRemainderIsMonteCarloNoise) {
  const TestFunction f(Box(V({-0.5, -0.4}), V({0.6, 0.5})), "1 + x1");
  TaylorOptions opt;
  opt.method = IntegrationMethod::kMonteCarlo;
  opt.samples = 100000;
  opt.seed = 3;
  for (double t : {0.2, 0.05}) {
    const TaylorResult r = TaylorRemainder(*testing::PlanarRotation(), f, t, {}, opt);
    EXPECT_GT(r.std_error, 0.0);
    EXPECT_LE(std::abs(r.remainder), 3 * r.std_error);
  }
}

TEST(TransportTest, FullBoxResidualVanishes) {
  OccupancyGrid full(GridGeometry::Uniform(Box::Cube(2, 1.0), 128));
  full.MarkAll();
  const TestFunction phi(Box(V({-0.6, -0.5}), V({0.7, 0.4})), "1 + x1*x2");
  const FieldPtr f = MakeField({"x2^2 + 1", "sin(x1)*x2"}, 2);
  EXPECT_NEAR(TransportResidual(full, *f, phi), 0.0, 1e-5);
}

TEST(TransportTest, HalfSpaceDetectsNonInvariance) {
  // E = {x1 < 0}, F = (1, 0): residual = -int phi(0, x2) dx2.
  const GridGeometry geo = GridGeometry::Uniform(Box::Cube(2, 1.0), 400);
  OccupancyGrid half(geo);
  for (std::int64_t c = 0; c < geo.cell_count(); ++c) {
    if (geo.CellCenter(c)[0] < 0.0) half.Mark(c);
  }
  const TestFunction phi(Box(V({-0.5, -0.5}), V({0.5, 0.5})));
  const int n = 100000;
  double surface = 0.0;
  for (int i = 0; i < n; ++i) surface += phi(V({0.0, -0.5 + (i + 0.5) / n}));
  surface /= n;
  const double r = TransportResidual(half, *MakeField({"1", "0"}, 2), phi);
  EXPECT_NEAR(r, -surface, 1e-4);
  EXPECT_LT(r, -0.1);
}

TEST(TransportTest, BracketResidualOnFullHeisenbergBox) {
  OccupancyGrid full(GridGeometry::Uniform(Box::Cube(3, 1.0), 96));
  full.MarkAll();
  const TestFunction phi(Box(V({-0.7, -0.6, -0.7}), V({0.6, 0.7, 0.65})), "1 + x3");
  const FieldSet h = Heisenberg();
  EXPECT_NEAR(BracketTransportResidual(full, h[0], h[1], phi), 0.0, 1e-4);
  EXPECT_NEAR(TransportResidual(full, *h[0], phi), 0.0, 1e-4);
}

TEST(TransportTest, InvariantSetResidualDecreasesUnderRefinement) {
  // A disc is invariant under the rotation; its residual is pure
  // discretization error, not monotone cell by cell because of the staircase
  // boundary.
  const TestFunction phi(Box(V({-0.9, -0.8}), V({0.85, 0.95})), "1 + x1 - x2/2");
  const FieldPtr rot = testing::PlanarRotation();
  std::vector<double> h, res;
  for (int n : {32, 64, 128, 256, 512}) {
    const GridGeometry geo = GridGeometry::Uniform(Box::Cube(2, 1.2), n);
    OccupancyGrid disc(geo);
    for (std::int64_t c = 0; c < geo.cell_count(); ++c) {
      if (geo.CellCenter(c).norm() <= 0.7) disc.Mark(c);
    }
    h.push_back(geo.cell_width()[0]);
    res.push_back(TransportResidual(disc, *rot, phi));
  }
  EXPECT_LT(std::abs(res.back()), 0.1 * std::abs(res.front()));
  EXPECT_GE(LogLogSlope(h, res), 0.5);
}

TEST(PullbackTest, MonotonicityOfComposition) {
  const GridGeometry geo = GridGeometry::Uniform(Box::Cube(2, 1.5), 64);
  ScalarGrid small(geo), large(geo);
  for (std::int64_t c = 0; c < geo.cell_count(); ++c) {
    const double r = geo.CellCenter(c).norm();
    small[c] = r <= 0.5 ? 1.0 : 0.0;
    large[c] = r <= 1.0 ? 1.0 : 0.0;
  }
  const FieldPtr rot = testing::PlanarRotation();
  EXPECT_EQ(PullbackMonotonicityCheck(small, small, *rot, 0.7, 2000, 1, {}), 0.0);
  EXPECT_EQ(PullbackMonotonicityCheck(small, large, *rot, 0.7, 2000, 1, {}), 0.0);
  const FieldPtr lin = MakeField({"x1", "x2"}, 2);
  EXPECT_EQ(PullbackMonotonicityCheck(small, large, *lin, 0.3, 2000, 2, {}), 0.0);
  EXPECT_THROW(PullbackMonotonicityCheck(large, small, *rot, 0.7, 10, 1, {}), InvalidArgument);
}

TEST(LogLogSlopeTest, RecoversPowerLaw) {
  const std::vector<double> x = {1, 2, 4, 8};
  const std::vector<double> y = {3, 12, 48, 192};
  EXPECT_NEAR(LogLogSlope(x, y), 2.0, 1e-12);
  EXPECT_THROW(LogLogSlope(std::vector<double>{1.0}, std::vector<double>{1.0}), InvalidArgument);
}

}  // namespace
}  // namespace geoctl
