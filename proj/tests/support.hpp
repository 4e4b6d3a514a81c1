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

// Shared helpers for the test binaries: a seeded random expression
// generator and small numeric oracles.
#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ocsr/errors.hpp"
#include "ocsr/expr.hpp"
#include "ocsr/problem.hpp"

namespace ocsr::testing {

/// Smooth random expressions. Denominators, logarithms and roots are fed
/// strictly positive arguments so finite differences stay meaningful.
class ExprGen {
 public:
  ExprGen(std::vector<std::string> vars, std::uint64_t seed) : vars_(std::move(vars)), rng_(seed) {}

  Expr operator()(int depth = 4) { return gen(depth); }

  std::mt19937_64& rng() { return rng_; }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  Expr leaf() {
    if (pick(3) == 0) {
      const double c = std::round(std::uniform_real_distribution<double>(-3.0, 3.0)(rng_) * 4.0) / 4.0;
      return Expr::constant(c == 0.0 ? 0.5 : c);
    }
    return Expr::variable(vars_[static_cast<std::size_t>(pick(static_cast<int>(vars_.size())))]);
  }

  Expr positive(int depth) { return Expr::constant(1.0) + pow(gen(depth), Expr::constant(2.0)); }

  Expr gen(int depth) {
    if (depth <= 0 || pick(5) == 0) return leaf();
    const int d = depth - 1;
    switch (pick(11)) {
      case 0:
      case 1:
        return Expr::raw(Op::add, gen(d), gen(d));
      case 2:
        return Expr::raw(Op::sub, gen(d), gen(d));
      case 3:
      case 4:
        return Expr::raw(Op::mul, gen(d), gen(d));
      case 5:
        return Expr::raw(Op::div, gen(d), positive(d));
      case 6:
        return Expr::raw(Op::pow, gen(d), Expr::constant(static_cast<double>(2 + pick(2))));
      case 7:
        return Expr::raw(Op::neg, gen(d));
      case 8:
        return Expr::raw_func(pick(2) == 0 ? Func::sin : Func::cos, gen(d));
      case 9:
        return Expr::raw_func(pick(2) == 0 ? Func::log : Func::sqrt, positive(d));
      default:
        return Expr::raw_func(Func::exp, Expr::raw_func(Func::sin, gen(d)));
    }
  }

  std::vector<std::string> vars_;
  std::mt19937_64 rng_;
};

inline VarTable plain_table(const std::vector<std::string>& names, VarKind kind = VarKind::state) {
  VarTable t;
  for (const auto& n : names) t.add({n, kind});
  return t;
}

/// Central difference of e along `var` at `point`, step 1e-5 (1 + |x|).
inline double central_difference(const Expr& e, const std::string& var, Assignment point) {
  const double x = point.at(var);
  const double h = 1e-5 * (1.0 + std::abs(x));
  point[var] = x + h;
  const double fp = eval(e, point);
  point[var] = x - h;
  const double fm = eval(e, point);
  return (fp - fm) / (2.0 * h);
}

/// Coefficients of the descriptor benchmark: a1..a3, b1..b3, r.
using Coefficients = std::map<std::string, double>;

inline Coefficients unit_coefficients() {
  return {{"a1", 1}, {"a2", 1}, {"a3", 1}, {"b1", 1}, {"b2", 1}, {"b3", 1}, {"r", 1}};
}

inline Coefficients random_coefficients(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.5, 2.0);
  Coefficients c;
  for (const char* n : {"a1", "a2", "a3", "b1", "b2", "b3", "r"}) c[n] = U(rng);
  return c;
}

/// Three-state descriptor system with two differential and one algebraic
/// constraint. Pinned coefficients when `values` is given, ranged otherwise.
inline ImplicitProblem descriptor_problem(const std::optional<Coefficients>& values = unit_coefficients()) {
  std::vector<Parameter> params;
  for (const char* n : {"a1", "a2", "a3", "b1", "b2", "b3", "r"}) {
    Parameter p{n, std::nullopt, 0.5, 2.0, true};
    if (values) p.value = values->at(n);
    params.push_back(p);
  }
  return make_implicit({"q1", "q2", "q3"}, {"u"}, {"v_q2 - q1 - b1*u", "v_q3 - q2 - b2*u", "q3 + b3*u"},
                       "0.5*(a1*q1^2 + a2*q2^2 + a3*q3^2 + r*u^2)", params);
}

}  // namespace ocsr::testing
