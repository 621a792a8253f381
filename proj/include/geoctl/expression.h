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

#ifndef GEOCTL_EXPRESSION_H_
#define GEOCTL_EXPRESSION_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geoctl {

// Value and one directional derivative, for forward-mode differentiation.
struct Dual {
  double value = 0.0;
  double deriv = 0.0;
};

// A scalar expression over x1..xd compiled to postfix code.
//
// Grammar:
//   expr    := term { ('+' | '-') term }
//   term    := unary { ('*' | '/') unary }
//   unary   := ('+' | '-') unary | power
//   power   := primary [ '^' unary ]
//   primary := number | 'x' digits | 'pi' | func '(' expr { ',' expr } ')'
//            | '(' expr ')'
//   func    := sin | cos | exp | sqrt | abs | sign | min | max | pow
//
// abs, sign, min and max are the non-smooth primitives.
class Expression {
 public:
  enum class Op : std::uint8_t {
    kConst, kVar, kAdd, kSub, kMul, kDiv, kNeg, kPow,
    kSin, kCos, kExp, kSqrt, kAbs, kSign, kMin, kMax,
  };

  struct Instr {
    Op op;
    int var = 0;
    double value = 0.0;
  };

  // Throws ParseError (with byte position) on malformed text or when a
  // variable index lies outside 1..dim.
  static Expression Parse(std::string_view text, int dim);

  double Eval(std::span<const double> x) const;

  // Derivative along the coordinate axis `direction` (0-based). Throws
  // KinkError when a non-smooth primitive sits exactly on its kink.
  Dual EvalDual(std::span<const double> x, int direction) const;

  // Appends, for each non-smooth primitive, the signed quantity whose sign
  // change marks a kink: the abs/sign argument, or a - b for min/max.
  void KinkArguments(std::span<const double> x,
                     std::vector<double>* out) const;

  bool smooth() const { return kink_count_ == 0; }
  int kink_count() const { return kink_count_; }
  // Largest variable index referenced (1-based), 0 for constants.
  int max_variable() const { return max_variable_; }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
  std::vector<Instr> code_;
  int stack_depth_ = 0;
  int kink_count_ = 0;
  int max_variable_ = 0;
};

}  // namespace geoctl

#endif  // GEOCTL_EXPRESSION_H_
