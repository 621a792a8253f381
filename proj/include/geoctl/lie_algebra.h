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

#ifndef GEOCTL_LIE_ALGEBRA_H_
#define GEOCTL_LIE_ALGEBRA_H_

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "geoctl/field.h"
#include "json.hpp"

namespace geoctl {

// Step used when differentiating a bracket numerically; larger than the leaf
// step because each nesting level amplifies differencing noise.
inline constexpr double kNestedFdStep = 1e-4;

// [U, V](x) = DV(x) U(x) - DU(x) V(x).
Vec Bracket(const Field& u, const Field& v, const Vec& x);

// The bracket [U, V] as a field. Its Jacobian is taken by central differences
// with kNestedFdStep.
class BracketField final : public Field {
 public:
  BracketField(FieldPtr u, FieldPtr v);

  int dim() const override { return u_->dim(); }
  void Eval(std::span<const double> x, std::span<double> out) const override;
  double fd_step() const override { return kNestedFdStep; }
  bool smooth() const override { return u_->smooth() && v_->smooth(); }
  void KinkArguments(const Vec& x, std::vector<double>* out) const override;

 private:
  FieldPtr u_;
  FieldPtr v_;
};

// A bracket tree over base-field indices. Indices are 0-based in code and
// 1-based in text: leaf 0 prints as "1", and [[X1,X2],X1] as "[[1,2],1]".
class BracketTerm {
 public:
  static BracketTerm Leaf(int index);
  static BracketTerm Node(BracketTerm left, BracketTerm right);

  // Parses a nested index list such as "[[1,2],1]" or "2".
  static BracketTerm Parse(std::string_view text);
  static BracketTerm FromJson(const nlohmann::json& j);

  bool is_leaf() const { return left_ == nullptr; }
  int leaf_index() const { return index_; }
  const BracketTerm& left() const { return *left_; }
  const BracketTerm& right() const { return *right_; }
  // 0 for leaves, 1 + max(child depths) otherwise.
  int depth() const { return depth_; }
  // Indices of all leaves.
  const std::set<int>& provenance() const { return provenance_; }
  // Largest leaf index + 1.
  int required_fields() const { return provenance_.empty() ? 0 : *provenance_.rbegin() + 1; }

  // Children canonically ordered: deeper subtree first, then by text. Used to
  // deduplicate terms that agree up to antisymmetry.
  BracketTerm Canonical() const;

  // Composable evaluator; throws InvalidArgument for out-of-range leaves.
  FieldPtr MakeEvaluator(const FieldSet& fields) const;

  std::string ToString() const;
  nlohmann::json ToJson() const;

  bool operator==(const BracketTerm& other) const {
    return ToString() == other.ToString();
  }

 private:
  BracketTerm() = default;

  int index_ = -1;
  int depth_ = 0;
  std::shared_ptr<const BracketTerm> left_;
  std::shared_ptr<const BracketTerm> right_;
  std::set<int> provenance_;
};

inline constexpr std::size_t kMaxTowerTerms = 10000;

// All bracket trees over `field_count` base fields with depth <= max_depth,
// deduplicated up to antisymmetry, [Y, Y] dropped. Ordered by depth, then
// by canonical text. Throws InvalidArgument beyond kMaxTowerTerms terms.
std::vector<BracketTerm> BuildTower(int field_count, int max_depth);

// U(x) . grad div V(x) - V(x) . grad div U(x).
double DivBracket(const Field& u, const Field& v, const Vec& x);

// Max over sampled x of |div [U,V](x) - DivBracket(U, V, x)|, where the left
// side differentiates the pointwise bracket numerically.
double BracketIdentityResidual(const FieldPtr& u, const FieldPtr& v,
                               const Box& region, int samples,
                               std::uint64_t seed);

}  // namespace geoctl

#endif  // GEOCTL_LIE_ALGEBRA_H_
