// Copyright 2026 The ocsr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <string>
#include <unordered_map>

#include "ocsr/errors.hpp"
#include "ocsr/expr.hpp"

namespace ocsr {

namespace {

class Differentiator {
 public:
  explicit Differentiator(std::string_view var) : var_(var) {}

  Expr operator()(const Expr& e) {
    switch (e.op()) {
      case Op::constant: return Expr();
      case Op::variable: return e.name() == var_ ? Expr::constant(1.0) : Expr();
      default: break;
    }
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    Expr d = rule(e);
    memo_.emplace(e.id(), d);
    return d;
  }

 private:
  Expr rule(const Expr& e) {
    const Expr& a = e.left();
    switch (e.op()) {
      case Op::add: return (*this)(a) + (*this)(e.right());
      case Op::sub: return (*this)(a) - (*this)(e.right());
      case Op::neg: return -(*this)(a);
      case Op::mul: {
        const Expr& b = e.right();
        Expr da = (*this)(a);
        Expr db = (*this)(b);
        return da * b + a * db;
      }
      case Op::div: {
        const Expr& b = e.right();
        Expr da = (*this)(a);
        Expr db = (*this)(b);
        if (db.is_constant(0.0)) return da / b;
        return (da * b - a * db) / pow(b, Expr::constant(2.0));
      }
      case Op::pow: {
        const Expr& b = e.right();
        Expr da = (*this)(a);
        Expr db = (*this)(b);
        if (db.is_constant(0.0)) return b * pow(a, b - Expr::constant(1.0)) * da;
        return e * (db * apply(Func::log, a) + b * da / a);
      }
      case Op::func: {
        Expr da = (*this)(a);
        if (da.is_constant(0.0)) return Expr();
        switch (e.func()) {
          case Func::sin: return apply(Func::cos, a) * da;
          case Func::cos: return -(apply(Func::sin, a) * da);
          case Func::tan: return da / pow(apply(Func::cos, a), Expr::constant(2.0));
          case Func::exp: return e * da;
          case Func::log: return da / a;
          case Func::sqrt: return da / (Expr::constant(2.0) * e);
        }
        break;
      }
      default: break;
    }
    return Expr();
  }

  std::string_view var_;
  std::unordered_map<const void*, Expr> memo_;
};

}  // namespace

Expr diff(const Expr& e, std::string_view var) { return Differentiator(var)(e); }

Expr total_derivative(const Expr& e, const VarTable& table) {
  const auto vars = free_variables(e);
  Expr result;
  // Walk in table order so the printed result is stable.
  for (const Var& v : table.vars()) {
    if (!vars.count(v.name)) continue;
    if (v.kind == VarKind::parameter) continue;
    Expr partial = diff(e, v.name);
    if (partial.is_constant(0.0)) continue;
    if (v.kind == VarKind::time) {
      result = result + partial;
      continue;
    }
    const std::string* image = table.prolongation(v.name);
    if (!image) throw ProblemError("missing prolongation for '" + v.name + "'");
    result = result + partial * Expr::variable(*image);
  }
  for (const auto& name : vars)
    if (!table.contains(name)) throw UnknownIdentifierError(name);
  return result;
}

}  // namespace ocsr
