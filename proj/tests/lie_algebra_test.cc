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


#include <set>
#include <string>
#include <vector>

#include "geoctl/lie_algebra.h"
#include "geoctl/random.h"
#include "gtest/gtest.h"
#include "test_fields.h"

namespace geoctl {
namespace {

using testing::Heisenberg;
using testing::MakeField;
using testing::V;

constexpr double kBracketTol = 1e-6;
constexpr double kJacobiTol = 1e-4;
constexpr double kIdentityTol = 1e-5;

std::vector<std::string> Texts(const std::vector<BracketTerm>& terms) {
  std::vector<std::string> out;
  for (const BracketTerm& t : terms) out.push_back(t.ToString());
  return out;
}

Vec RandomPoint(int dim, std::uint64_t seed, int i, double half_width = 1.0) {
  CounterRng rng(seed, Stream::kTest, i);
  return rng.UniformInBox(Box::Cube(dim, half_width));
}

TEST(BracketTest, HeisenbergBracketIsVertical) {
  const FieldSet h = Heisenberg();
  for (int i = 0; i < 100; ++i) {
    const Vec x = RandomPoint(3, 1, i);
    EXPECT_LE((Bracket(*h[0], *h[1], x) - V({0, 0, 1})).norm(), kBracketTol);
  }
}

TEST(BracketTest, HeisenbergBracketMatchesCentralDifferenceOracle) {
  // Independent oracle: DV U - DU V with hand-rolled central differences.
  const FieldSet h = Heisenberg();
  const Vec x = V({0.3, -0.6, 0.2});
  const double step = 1e-5;
  Mat du(3, 3), dv(3, 3);
  for (int j = 0; j < 3; ++j) {
    Vec e = Vec::Zero(3);
    e[j] = step;
    du.col(j) = ((*h[0])(x + e) - (*h[0])(x - e)) / (2 * step);
    dv.col(j) = ((*h[1])(x + e) - (*h[1])(x - e)) / (2 * step);
  }
  const Vec oracle = dv * (*h[0])(x) - du * (*h[1])(x);
  EXPECT_LE((Bracket(*h[0], *h[1], x) - oracle).norm(), kBracketTol);
}

TEST(BracketTest, SelfBracketVanishes) {
  const FieldPtr f = MakeField({"x1*x2", "sin(x1)"}, 2);
  EXPECT_EQ(Bracket(*f, *f, V({0.4, 0.9})).norm(), 0.0);
}

TEST(BracketTest, GrushinBracket) {
  const FieldSet g = testing::Grushin();
  for (int i = 0; i < 100; ++i) {
    EXPECT_LE((Bracket(*g[0], *g[1], RandomPoint(2, 2, i)) - V({0, 1})).norm(),
              kBracketTol);
  }
}

TEST(BracketTest, Antisymmetry) {
  const FieldPtr u = MakeField({"x1^2 - x3", "x2*x3", "sin(x1)"}, 3);
  const FieldPtr v = MakeField({"x2", "exp(x3/2)", "x1*x2"}, 3);
  for (int i = 0; i < 50; ++i) {
    const Vec x = RandomPoint(3, 3, i);
    EXPECT_EQ(Bracket(*u, *v, x), -Bracket(*v, *u, x));
  }
}

TEST(BracketTest, BilinearOverConstants) {
  const FieldPtr u = MakeField({"x1^2", "x1*x2"}, 2);
  const FieldPtr v = MakeField({"x2^3", "cos(x1)"}, 2);
  const FieldPtr w = MakeField({"x1 - x2", "x1*x1*x2"}, 2);
  const auto combo = std::make_shared<LinearCombination>(1.5, v, -2.0, w);
  for (int i = 0; i < 50; ++i) {
    const Vec x = RandomPoint(2, 4, i);
    const Vec lhs = Bracket(*u, *combo, x);
    const Vec rhs = 1.5 * Bracket(*u, *v, x) - 2.0 * Bracket(*u, *w, x);
    EXPECT_LE((lhs - rhs).norm(), 1e-8);
  }
}

TEST(BracketTest, JacobiIdentity) {
  const FieldPtr u = MakeField({"x2^2", "x1*x3", "x1"}, 3);
  const FieldPtr v = MakeField({"x3", "x1^2 - x2", "x2*x3"}, 3);
  const FieldPtr w = MakeField({"x1*x2", "1 + x3^2", "-x1"}, 3);
  const auto uv = std::make_shared<BracketField>(u, v);
  const auto vw = std::make_shared<BracketField>(v, w);
  const auto wu = std::make_shared<BracketField>(w, u);
  for (int i = 0; i < 50; ++i) {
    const Vec x = RandomPoint(3, 5, i);
    const Vec sum = Bracket(*uv, *w, x) + Bracket(*vw, *u, x) + Bracket(*wu, *v, x);
    EXPECT_LE(sum.norm(), kJacobiTol);
  }
}

TEST(BracketTermTest, ParseAndPrintRoundTrip) {
  for (const char* text : {"1", "[1,2]", "[[1,2],1]", "[[1,3],[2,3]]"}) {
    EXPECT_EQ(BracketTerm::Parse(text).ToString(), text);
    EXPECT_EQ(BracketTerm::FromJson(BracketTerm::Parse(text).ToJson()).ToString(), text);
  }
  EXPECT_THROW(BracketTerm::Parse("[1,"), Error);
  EXPECT_THROW(BracketTerm::Parse("0"), Error);
}

TEST(BracketTermTest, DepthAndProvenance) {
  const BracketTerm leaf = BracketTerm::Leaf(1);
  EXPECT_EQ(leaf.depth(), 0);
  EXPECT_TRUE(leaf.is_leaf());
  EXPECT_EQ(leaf.provenance(), std::set<int>({1}));
  const BracketTerm t = BracketTerm::Parse("[[1,2],1]");
  EXPECT_EQ(t.depth(), 2);
  EXPECT_FALSE(t.is_leaf());
  EXPECT_EQ(t.provenance(), std::set<int>({0, 1}));
  EXPECT_EQ(t.required_fields(), 2);
}

TEST(BracketTermTest, CanonicalFormIdentifiesAntisymmetricPairs) {
  EXPECT_EQ(BracketTerm::Parse("[2,1]").Canonical(), BracketTerm::Parse("[1,2]").Canonical());
  EXPECT_EQ(BracketTerm::Parse("[1,[1,2]]").Canonical(),
            BracketTerm::Parse("[[1,2],1]").Canonical());
}

TEST(BracketTermTest, EvaluatorComposesBrackets) {
  const FieldSet h = Heisenberg();
  const FieldPtr b = BracketTerm::Parse("[1,2]").MakeEvaluator(h);
  EXPECT_LE(((*b)(V({0.2, 0.3, 0.4})) - V({0, 0, 1})).norm(), kBracketTol);
  const FieldPtr bb = BracketTerm::Parse("[[1,2],1]").MakeEvaluator(h);
  EXPECT_LE((*bb)(V({0.2, 0.3, 0.4})).norm(), 1e-5);
  EXPECT_THROW(BracketTerm::Parse("[1,3]").MakeEvaluator(h), InvalidArgument);
}

TEST(TowerTest, DepthOneOverTwoFields) {
  EXPECT_EQ(Texts(BuildTower(2, 1)), (std::vector<std::string>{"1", "2", "[1,2]"}));
}

TEST(TowerTest, SingleFieldHasOnlyTheLeaf) {
  for (int depth : {0, 1, 3}) {
    EXPECT_EQ(Texts(BuildTower(1, depth)), (std::vector<std::string>{"1"}));
  }
}

TEST(TowerTest, DepthTwoOverTwoFields) {
  const std::vector<BracketTerm> tower = BuildTower(2, 2);
  EXPECT_EQ(Texts(tower),
            (std::vector<std::string>{"1", "2", "[1,2]", "[[1,2],1]", "[[1,2],2]"}));
  for (const BracketTerm& t : tower) {
    if (t.depth() == 2) {
      EXPECT_EQ(t.provenance(), std::set<int>({0, 1}));
    }
  }
}

TEST(TowerTest, EnumerationOracle) {
  // Brute force: all trees up to depth 2 over 3 leaves, reduced by canonical
  // form, with self-brackets dropped.
  std::vector<BracketTerm> level0, level1;
  std::set<std::string> seen;
  for (int i = 0; i < 3; ++i) level0.push_back(BracketTerm::Leaf(i));
  for (const auto& a : level0) {
    for (const auto& b : level0) {
      if (a == b) continue;
      const BracketTerm t = BracketTerm::Node(a, b).Canonical();
      if (seen.insert(t.ToString()).second) level1.push_back(t);
    }
  }
  std::set<std::string> level2;
  for (const auto& a : level1) {
    for (const auto& b : level0) level2.insert(BracketTerm::Node(a, b).Canonical().ToString());
    for (const auto& b : level1) {
      if (a == b) continue;
      level2.insert(BracketTerm::Node(a, b).Canonical().ToString());
    }
  }
  const std::vector<BracketTerm> tower = BuildTower(3, 2);
  std::size_t depth2 = 0;
  for (const BracketTerm& t : tower) {
    if (t.depth() == 2) {
      ++depth2;
      EXPECT_TRUE(level2.count(t.ToString())) << t.ToString();
    }
    for (int p : t.provenance()) EXPECT_LT(p, 3);
    if (t.depth() >= 1) {
      EXPECT_GE(t.provenance().size(), 2u);
    }
  }
  EXPECT_EQ(depth2, level2.size());
  EXPECT_EQ(tower.size(), 3 + level1.size() + level2.size());
}

TEST(TowerTest, SizeGuard) { EXPECT_THROW(BuildTower(6, 4), InvalidArgument); }

TEST(DivBracketTest, HeisenbergPairIsDivergenceFree) {
  const FieldSet h = Heisenberg();
  EXPECT_NEAR(DivBracket(*h[0], *h[1], V({0.5, -0.2, 0.9})), 0.0, 1e-8);
}

TEST(DivBracketTest, PlanarPolynomialPair) {
  const FieldPtr u = MakeField({"x1^2", "0"}, 2);
  const FieldPtr v = MakeField({"0", "x2"}, 2);
  for (int i = 0; i < 20; ++i) {
    const Vec x = RandomPoint(2, 6, i);
    EXPECT_NEAR(DivBracket(*u, *v, x), 0.0, 1e-6);
    const BracketField b(u, v);
    EXPECT_NEAR(b.Divergence(x), 0.0, 1e-6);
  }
}

TEST(DivBracketTest, ClosedFormAgainstHandComputation) {
  // U = (x1 x2, 0), V = (0, x1^2): div U = x2, div V = 0, so
  // div [U, V] = -V . grad div U = -x1^2.
  const FieldPtr u = MakeField({"x1*x2", "0"}, 2);
  const FieldPtr v = MakeField({"0", "x1^2"}, 2);
  for (int i = 0; i < 20; ++i) {
    const Vec x = RandomPoint(2, 7, i);
    EXPECT_NEAR(DivBracket(*u, *v, x), -x[0] * x[0], 1e-6);
  }
}

TEST(BracketIdentityTest, Residuals) {
  const FieldPtr u = MakeField({"x1^2*x2", "x1 - x2^3"}, 2);
  const FieldPtr v = MakeField({"x2^2", "x1*x2 + x1^3"}, 2);
  EXPECT_LE(BracketIdentityResidual(u, v, Box::Cube(2, 1.0), 100, 1), kIdentityTol);
  const FieldSet h = Heisenberg();
  EXPECT_LE(BracketIdentityResidual(h[0], h[1], Box::Cube(3, 1.0), 100, 1), 1e-8);
  EXPECT_EQ(BracketIdentityResidual(u, u, Box::Cube(2, 1.0), 100, 1), 0.0);
}

}  // namespace
}  // namespace geoctl
