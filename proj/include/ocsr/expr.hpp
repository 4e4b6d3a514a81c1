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

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ocsr {

enum class VarKind : std::uint8_t {
  time,
  state,
  velocity,
  control,
  momentum_p,   // the energy momentum p conjugate to t
  momentum_pi,  // p_i conjugate to a coordinate
  multiplier,
  parameter,
  auxiliary,
};

std::string_view to_string(VarKind kind);

struct Var {
  std::string name;
  VarKind kind = VarKind::auxiliary;
  // Parameter data, ignored for other kinds. `value` pins the parameter for
  // sampling and numerics; otherwise samples are drawn from [lo, hi].
  std::optional<double> value;
  double lo = -1.0;
  double hi = 1.0;
  bool nonzero = false;
};

/// Ordered variable registry of a coordinate chart, with the jet prolongation
/// map (q -> v, v -> w) used by total derivatives.
class VarTable {
 public:
  const Var& add(Var var);
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  const Var* find(std::string_view name) const;
  const Var& at(std::string_view name) const;
  std::optional<std::size_t> index_of(std::string_view name) const;
  const std::vector<Var>& vars() const { return vars_; }
  std::size_t size() const { return vars_.size(); }
  std::vector<std::string> names_of(VarKind kind) const;

  void set_prolongation(const std::string& from, const std::string& to);
  const std::string* prolongation(std::string_view name) const;
  const std::map<std::string, std::string, std::less<>>& prolongations() const { return prolong_; }

 private:
  std::vector<Var> vars_;
  std::unordered_map<std::string, std::size_t> index_;
  std::map<std::string, std::string, std::less<>> prolong_;
};

enum class Op : std::uint8_t { constant, variable, add, sub, mul, div, pow, neg, func };
enum class Func : std::uint8_t { sin, cos, tan, exp, log, sqrt };

std::string_view to_string(Func f);
std::optional<Func> func_from_name(std::string_view name);

/// Immutable scalar expression. Copies share the underlying tree.
class Expr {
 public:
  Expr();  // the constant 0
  static Expr constant(double c);
  static Expr variable(std::string name);
  // Structural constructors, no folding. The parser builds with these.
  static Expr raw(Op op, Expr a, Expr b = Expr());
  static Expr raw_func(Func f, Expr a);

  Op op() const;
  double constant_value() const;
  const std::string& name() const;
  Func func() const;
  const Expr& left() const;
  const Expr& right() const;
  std::size_t size() const;
  std::size_t hash() const;
  const void* id() const { return node_.get(); }

  bool is_constant() const { return op() == Op::constant; }
  bool is_constant(double c) const { return is_constant() && constant_value() == c; }
  bool is_variable() const { return op() == Op::variable; }

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Folding constructors: constant folding plus the shallow identities
// 0*x, 1*x, x+0, x-x, x/1, x^1, x^0, --x.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr apply(Func f, const Expr& arg);
inline Expr operator*(double c, const Expr& e) { return Expr::constant(c) * e; }
inline Expr operator+(const Expr& e, double c) { return e + Expr::constant(c); }
inline Expr operator-(const Expr& e, double c) { return e - Expr::constant(c); }

Expr simplify(const Expr& e);

// Grammar: identifiers [A-Za-z_][A-Za-z0-9_]*, decimal literals with optional
// fraction and exponent, + - * / ^ with ^ right-associative and precedence
// ^ > unary - > * / > binary + -, parentheses, and sin/cos/tan/exp/log/sqrt calls.
Expr parse(std::string_view text, const VarTable& table);

std::string to_string(const Expr& e);
std::ostream& operator<<(std::ostream& os, const Expr& e);

std::set<std::string> free_variables(const Expr& e);
bool depends_on(const Expr& e, std::string_view name);

Expr diff(const Expr& e, std::string_view var);

/// d/dt along the jet prolongation: de/dt + sum_x prolong(x) * de/dx.
/// Parameters are constant in time; any other variable with a nonzero
/// partial must have a prolongation image.
Expr total_derivative(const Expr& e, const VarTable& table);

using Substitution = std::map<std::string, Expr, std::less<>>;
Expr substitute(const Expr& e, const Substitution& subs);

using Assignment = std::map<std::string, double, std::less<>>;
double eval(const Expr& e, const Assignment& point);

}  // namespace ocsr
