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

#include "geoctl/lie_algebra.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "geoctl/random.h"

namespace geoctl {

Vec Bracket(const Field& u, const Field& v, const Vec& x) {
  const Vec uv = u(x);
  const Vec vv = v(x);
  const Vec out = v.Jacobian(x) * uv - u.Jacobian(x) * vv;
  CheckFinite({out.data(), static_cast<std::size_t>(out.size())}, "bracket");
  return out;
}

BracketField::BracketField(FieldPtr u, FieldPtr v)
    : u_(std::move(u)), v_(std::move(v)) {
  if (u_->dim() != v_->dim()) throw DimensionError("field dimensions differ");
}

void BracketField::Eval(std::span<const double> x, std::span<double> out) const {
  const Vec xv = Eigen::Map<const Vec>(x.data(), static_cast<Eigen::Index>(x.size()));
  const Vec b = Bracket(*u_, *v_, xv);
  for (int i = 0; i < dim(); ++i) out[i] = b[i];
}

void BracketField::KinkArguments(const Vec& x, std::vector<double>* out) const {
  u_->KinkArguments(x, out);
  v_->KinkArguments(x, out);
}

BracketTerm BracketTerm::Leaf(int index) {
  if (index < 0) throw InvalidArgument("leaf index must be nonnegative");
  BracketTerm t;
  t.index_ = index;
  t.provenance_.insert(index);
  return t;
}

BracketTerm BracketTerm::Node(BracketTerm left, BracketTerm right) {
  BracketTerm t;
  t.depth_ = 1 + std::max(left.depth_, right.depth_);
  t.provenance_ = left.provenance_;
  t.provenance_.insert(right.provenance_.begin(), right.provenance_.end());
  t.left_ = std::make_shared<const BracketTerm>(std::move(left));
  t.right_ = std::make_shared<const BracketTerm>(std::move(right));
  return t;
}

BracketTerm BracketTerm::FromJson(const nlohmann::json& j) {
  if (j.is_number_integer()) {
    const int index = j.get<int>();
    if (index < 1) throw InvalidArgument("bracket leaf indices are 1-based");
    return Leaf(index - 1);
  }
  if (j.is_array() && j.size() == 2) {
    return Node(FromJson(j[0]), FromJson(j[1]));
  }
  if (j.is_array() && j.size() == 1) return FromJson(j[0]);
  throw InvalidArgument("bracket term must be an index or a pair: " + j.dump());
}

BracketTerm BracketTerm::Parse(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("malformed bracket term", e.byte == 0 ? 0 : e.byte - 1);
  }
  return FromJson(j);
}

BracketTerm BracketTerm::Canonical() const {
  if (is_leaf()) return *this;
  BracketTerm a = left_->Canonical();
  BracketTerm b = right_->Canonical();
  const bool swap = a.depth() != b.depth() ? a.depth() < b.depth()
                                           : b.ToString() < a.ToString();
  return swap ? Node(std::move(b), std::move(a)) : Node(std::move(a), std::move(b));
}

FieldPtr BracketTerm::MakeEvaluator(const FieldSet& fields) const {
  if (is_leaf()) {
    if (index_ >= static_cast<int>(fields.size())) {
      throw InvalidArgument("bracket term references X" +
                            std::to_string(index_ + 1) + " but only " +
                            std::to_string(fields.size()) + " fields exist");
    }
    return fields[index_];
  }
  return std::make_shared<BracketField>(left_->MakeEvaluator(fields),
                                        right_->MakeEvaluator(fields));
}

std::string BracketTerm::ToString() const {
  if (is_leaf()) return std::to_string(index_ + 1);
  return "[" + left_->ToString() + "," + right_->ToString() + "]";
}

nlohmann::json BracketTerm::ToJson() const {
  if (is_leaf()) return index_ + 1;
  return nlohmann::json::array({left_->ToJson(), right_->ToJson()});
}

std::vector<BracketTerm> BuildTower(int field_count, int max_depth) {
  if (max_depth < 0) throw InvalidArgument("max_depth must be nonnegative");
  if (field_count < 1) throw InvalidArgument("need at least one field");
  std::vector<BracketTerm> tower;
  std::vector<std::size_t> level_start{0};
  for (int i = 0; i < field_count; ++i) tower.push_back(BracketTerm::Leaf(i));
  for (int m = 1; m <= max_depth; ++m) {
    std::map<std::string, BracketTerm> level;
    const std::size_t prev_begin = level_start.back();
    const std::size_t prev_end = tower.size();
    for (std::size_t a = prev_begin; a < prev_end; ++a) {
      for (std::size_t b = 0; b < prev_end; ++b) {
        if (a == b) continue;
        BracketTerm t = BracketTerm::Node(tower[a], tower[b]).Canonical();
        if (t.left() == t.right()) continue;
        level.emplace(t.ToString(), std::move(t));
        if (tower.size() + level.size() > kMaxTowerTerms) {
          throw InvalidArgument("bracket tower exceeds " +
                                std::to_string(kMaxTowerTerms) + " terms");
        }
      }
    }
    if (level.empty()) break;
    level_start.push_back(prev_end);
    for (auto& [key, term] : level) tower.push_back(std::move(term));
  }
  return tower;
}

double DivBracket(const Field& u, const Field& v, const Vec& x) {
  const double out = u(x).dot(v.GradDivergence(x)) - v(x).dot(u.GradDivergence(x));
  if (!std::isfinite(out)) throw NonFiniteError("non-finite bracket divergence");
  return out;
}

double BracketIdentityResidual(const FieldPtr& u, const FieldPtr& v,
                               const Box& region, int samples,
                               std::uint64_t seed) {
  const BracketField bracket(u, v);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    CounterRng rng(seed, Stream::kBracketResidual, static_cast<std::uint64_t>(i));
    const Vec x = rng.UniformInBox(region);
    const double direct = bracket.Divergence(x);
    worst = std::max(worst, std::abs(direct - DivBracket(*u, *v, x)));
  }
  return worst;
}

}  // namespace geoctl
