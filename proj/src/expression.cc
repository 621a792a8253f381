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

#include "geoctl/expression.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "geoctl/common.h"

namespace geoctl {
namespace {

using Op = Expression::Op;
using Instr = Expression::Instr;

struct FunctionInfo {
  std::string_view name;
  Op op;
  int arity;
};

constexpr FunctionInfo kFunctions[] = {
    {"sin", Op::kSin, 1},   {"cos", Op::kCos, 1},   {"exp", Op::kExp, 1},
    {"sqrt", Op::kSqrt, 1}, {"abs", Op::kAbs, 1},   {"sign", Op::kSign, 1},
    {"min", Op::kMin, 2},   {"max", Op::kMax, 2},   {"pow", Op::kPow, 2},
};

class Parser {
 public:
  Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

  void Run(std::vector<Instr>* code, int* depth, int* kinks, int* max_var) {
    SkipSpace();
    if (pos_ == text_.size()) Fail("empty expression");
    ParseExpr();
    SkipSpace();
    if (pos_ != text_.size()) Fail("unexpected character");
    *code = std::move(code_);
    *depth = max_depth_;
    *kinks = kinks_;
    *max_var = max_var_;
  }

 private:
  [[noreturn]] void Fail(const std::string& what) const {
    throw ParseError(what, pos_);
  }

  void SkipSpace() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool Accept(char c) {
    SkipSpace();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void Expect(char c) {
    if (!Accept(c)) Fail(std::string("expected '") + c + "'");
  }

  void Emit(Instr instr, int pops, int pushes) {
    depth_ += pushes - pops;
    max_depth_ = std::max(max_depth_, depth_);
    if (instr.op == Op::kAbs || instr.op == Op::kSign ||
        instr.op == Op::kMin || instr.op == Op::kMax) {
      ++kinks_;
    }
    code_.push_back(instr);
  }

  void ParseExpr() {
    ParseTerm();
    for (;;) {
      if (Accept('+')) {
        ParseTerm();
        Emit({Op::kAdd}, 2, 1);
      } else if (Accept('-')) {
        ParseTerm();
        Emit({Op::kSub}, 2, 1);
      } else {
        return;
      }
    }
  }

  void ParseTerm() {
    ParseUnary();
    for (;;) {
      if (Accept('*')) {
        ParseUnary();
        Emit({Op::kMul}, 2, 1);
      } else if (Accept('/')) {
        ParseUnary();
        Emit({Op::kDiv}, 2, 1);
      } else {
        return;
      }
    }
  }

  void ParseUnary() {
    if (Accept('-')) {
      ParseUnary();
      Emit({Op::kNeg}, 1, 1);
    } else if (Accept('+')) {
      ParseUnary();
    } else {
      ParsePower();
    }
  }

  void ParsePower() {
    ParsePrimary();
    if (Accept('^')) {
      ParseUnary();
      Emit({Op::kPow}, 2, 1);
    }
  }

  void ParsePrimary() {
    SkipSpace();
    if (pos_ >= text_.size()) Fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      ParseExpr();
      Expect(')');
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      ParseNumber();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isalnum(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      }
      ParseIdentifier(text_.substr(start, pos_ - start), start);
      return;
    }
    Fail("unexpected character");
  }

  void ParseNumber() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          ++pos_;
        }
      }
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      pos_ = start;
      Fail("malformed number");
    }
    Emit({Op::kConst, 0, value}, 0, 1);
  }

  void ParseIdentifier(std::string_view name, std::size_t start) {
    if (name.size() > 1 && name[0] == 'x' &&
        std::all_of(name.begin() + 1, name.end(),
                    [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      int index = 0;
      std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (index < 1 || index > dim_) {
        pos_ = start;
        Fail("unknown variable '" + std::string(name) + "' for dimension " +
             std::to_string(dim_));
      }
      max_var_ = std::max(max_var_, index);
      Emit({Op::kVar, index - 1, 0.0}, 0, 1);
      return;
    }
    if (name == "pi") {
      Emit({Op::kConst, 0, std::numbers::pi}, 0, 1);
      return;
    }
    for (const auto& fn : kFunctions) {
      if (fn.name != name) continue;
      Expect('(');
      ParseExpr();
      for (int a = 1; a < fn.arity; ++a) {
        Expect(',');
        ParseExpr();
      }
      Expect(')');
      Emit({fn.op}, fn.arity, 1);
      return;
    }
    pos_ = start;
    Fail("unknown identifier '" + std::string(name) + "'");
  }

  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;
  std::vector<Instr> code_;
  int depth_ = 0;
  int max_depth_ = 0;
  int kinks_ = 0;
  int max_var_ = 0;
};

double SignOf(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

constexpr int kInlineStack = 64;

}  // namespace

Expression Expression::Parse(std::string_view text, int dim) {
  if (dim < 1) throw DimensionError("dimension must be positive");
  Expression e;
  e.text_ = std::string(text);
  Parser(text, dim).Run(&e.code_, &e.stack_depth_, &e.kink_count_,
                        &e.max_variable_);
  return e;
}

double Expression::Eval(std::span<const double> x) const {
  double inline_stack[kInlineStack];
  std::vector<double> heap;
  double* s = inline_stack;
  if (stack_depth_ > kInlineStack) {
    heap.resize(stack_depth_);
    s = heap.data();
  }
  s[0] = 0.0;
  int top = -1;
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::kConst: s[++top] = in.value; break;
      case Op::kVar: s[++top] = x[in.var]; break;
      case Op::kAdd: s[top - 1] += s[top]; --top; break;
      case Op::kSub: s[top - 1] -= s[top]; --top; break;
      case Op::kMul: s[top - 1] *= s[top]; --top; break;
      case Op::kDiv: s[top - 1] /= s[top]; --top; break;
      case Op::kPow: s[top - 1] = std::pow(s[top - 1], s[top]); --top; break;
      case Op::kMin: s[top - 1] = std::min(s[top - 1], s[top]); --top; break;
      case Op::kMax: s[top - 1] = std::max(s[top - 1], s[top]); --top; break;
      case Op::kNeg: s[top] = -s[top]; break;
      case Op::kSin: s[top] = std::sin(s[top]); break;
      case Op::kCos: s[top] = std::cos(s[top]); break;
      case Op::kExp: s[top] = std::exp(s[top]); break;
      case Op::kSqrt: s[top] = std::sqrt(s[top]); break;
      case Op::kAbs: s[top] = std::abs(s[top]); break;
      case Op::kSign: s[top] = SignOf(s[top]); break;
    }
  }
  return s[0];
}

Dual Expression::EvalDual(std::span<const double> x, int direction) const {
  std::vector<Dual> s(std::max(stack_depth_, 1));
  int top = -1;
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::kConst: s[++top] = {in.value, 0.0}; break;
      case Op::kVar:
        s[++top] = {x[in.var], in.var == direction ? 1.0 : 0.0};
        break;
      case Op::kAdd: {
        Dual& a = s[top - 1];
        const Dual& b = s[top--];
        a = {a.value + b.value, a.deriv + b.deriv};
        break;
      }
      case Op::kSub: {
        Dual& a = s[top - 1];
        const Dual& b = s[top--];
        a = {a.value - b.value, a.deriv - b.deriv};
        break;
      }
      case Op::kMul: {
        Dual& a = s[top - 1];
        const Dual& b = s[top--];
        a = {a.value * b.value, a.deriv * b.value + a.value * b.deriv};
        break;
      }
      case Op::kDiv: {
        Dual& a = s[top - 1];
        const Dual& b = s[top--];
        const double q = a.value / b.value;
        a = {q, (a.deriv - q * b.deriv) / b.value};
        break;
      }
      case Op::kPow: {
        Dual& a = s[top - 1];
        const Dual& b = s[top--];
        const double v = std::pow(a.value, b.value);
        double d = 0.0;
        if (a.deriv != 0.0) {
          d += b.value * std::pow(a.value, b.value - 1.0) * a.deriv;
        }
        if (b.deriv != 0.0) d += v * std::log(a.value) * b.deriv;
        a = {v, d};
        break;
      }
      case Op::kMin:
      case Op::kMax: {
        Dual& a = s[top - 1];
        const Dual& b = s[top--];
        if (a.value == b.value && a.deriv != b.deriv) {
          throw KinkError("min/max evaluated at a tie");
        }
        const bool take_a =
            in.op == Op::kMin ? a.value <= b.value : a.value >= b.value;
        if (!take_a) a = b;
        break;
      }
      case Op::kNeg: s[top] = {-s[top].value, -s[top].deriv}; break;
      case Op::kSin:
        s[top] = {std::sin(s[top].value), std::cos(s[top].value) * s[top].deriv};
        break;
      case Op::kCos:
        s[top] = {std::cos(s[top].value), -std::sin(s[top].value) * s[top].deriv};
        break;
      case Op::kExp: {
        const double e = std::exp(s[top].value);
        s[top] = {e, e * s[top].deriv};
        break;
      }
      case Op::kSqrt: {
        const double r = std::sqrt(s[top].value);
        s[top] = {r, s[top].deriv == 0.0 ? 0.0 : 0.5 * s[top].deriv / r};
        break;
      }
      case Op::kAbs:
        if (s[top].value == 0.0) throw KinkError("abs evaluated at 0");
        s[top] = {std::abs(s[top].value), SignOf(s[top].value) * s[top].deriv};
        break;
      case Op::kSign:
        if (s[top].value == 0.0) throw KinkError("sign evaluated at 0");
        s[top] = {SignOf(s[top].value), 0.0};
        break;
    }
  }
  return s[0];
}

void Expression::KinkArguments(std::span<const double> x,
                               std::vector<double>* out) const {
  if (kink_count_ == 0) return;
  std::vector<double> s(std::max(stack_depth_, 1));
  int top = -1;
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::kConst: s[++top] = in.value; break;
      case Op::kVar: s[++top] = x[in.var]; break;
      case Op::kAdd: s[top - 1] += s[top]; --top; break;
      case Op::kSub: s[top - 1] -= s[top]; --top; break;
      case Op::kMul: s[top - 1] *= s[top]; --top; break;
      case Op::kDiv: s[top - 1] /= s[top]; --top; break;
      case Op::kPow: s[top - 1] = std::pow(s[top - 1], s[top]); --top; break;
      case Op::kMin:
        out->push_back(s[top - 1] - s[top]);
        s[top - 1] = std::min(s[top - 1], s[top]);
        --top;
        break;
      case Op::kMax:
        out->push_back(s[top - 1] - s[top]);
        s[top - 1] = std::max(s[top - 1], s[top]);
        --top;
        break;
      case Op::kNeg: s[top] = -s[top]; break;
      case Op::kSin: s[top] = std::sin(s[top]); break;
      case Op::kCos: s[top] = std::cos(s[top]); break;
      case Op::kExp: s[top] = std::exp(s[top]); break;
      case Op::kSqrt: s[top] = std::sqrt(s[top]); break;
      case Op::kAbs:
        out->push_back(s[top]);
        s[top] = std::abs(s[top]);
        break;
      case Op::kSign:
        out->push_back(s[top]);
        s[top] = SignOf(s[top]);
        break;
    }
  }
}

}  // namespace geoctl
