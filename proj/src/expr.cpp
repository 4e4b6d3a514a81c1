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

#include "ocsr/expr.hpp"

#include <bit>
#include <functional>
#include <unordered_map>

#include "checked_math.hpp"
#include "ocsr/errors.hpp"

namespace ocsr {

std::string_view to_string(VarKind kind) {
  switch (kind) {
    case VarKind::time: return "time";
    case VarKind::state: return "state";
    case VarKind::velocity: return "velocity";
    case VarKind::control: return "control";
    case VarKind::momentum_p: return "momentum-p";
    case VarKind::momentum_pi: return "momentum-pi";
    case VarKind::multiplier: return "multiplier";
    case VarKind::parameter: return "parameter";
    case VarKind::auxiliary: return "auxiliary";
  }
  return "?";
}

const Var& VarTable::add(Var var) {
  if (index_.count(var.name)) throw ProblemError("name collision: '" + var.name + "'");
  index_.emplace(var.name, vars_.size());
  vars_.push_back(std::move(var));
  return vars_.back();
}

const Var* VarTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : &vars_[it->second];
}

const Var& VarTable::at(std::string_view name) const {
  if (const Var* v = find(name)) return *v;
  throw UnknownIdentifierError(std::string(name));
}

std::optional<std::size_t> VarTable::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> VarTable::names_of(VarKind kind) const {
  std::vector<std::string> out;
  for (const auto& v : vars_)
    if (v.kind == kind) out.push_back(v.name);
  return out;
}

void VarTable::set_prolongation(const std::string& from, const std::string& to) {
  const Var& src = at(from);
  at(to);
  if (src.kind == VarKind::time) throw ProblemError("time has no prolongation");
  for (const auto& [k, v] : prolong_)
    if (v == to && k != from)
      throw ProblemError("prolongation not injective: '" + k + "' and '" + from + "' both map to '" + to + "'");
  prolong_[from] = to;
}

const std::string* VarTable::prolongation(std::string_view name) const {
  auto it = prolong_.find(name);
  return it == prolong_.end() ? nullptr : &it->second;
}

std::string_view to_string(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::tan: return "tan";
    case Func::exp: return "exp";
    case Func::log: return "log";
    case Func::sqrt: return "sqrt";
  }
  return "?";
}

std::optional<Func> func_from_name(std::string_view name) {
  if (name == "sin") return Func::sin;
  if (name == "cos") return Func::cos;
  if (name == "tan") return Func::tan;
  if (name == "exp") return Func::exp;
  if (name == "log") return Func::log;
  if (name == "sqrt") return Func::sqrt;
  return std::nullopt;
}

struct Expr::Node {
  Op op = Op::constant;
  Func fn = Func::sin;
  double value = 0.0;
  std::string name;
  Expr a{std::shared_ptr<const Node>{}};
  Expr b{std::shared_ptr<const Node>{}};
  std::size_t hash = 0;
  std::size_t size = 1;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Expr::Expr() {
  static const std::shared_ptr<const Node> zero = [] {
    auto n = std::make_shared<Node>();
    n->hash = mix(static_cast<std::size_t>(Op::constant), std::hash<double>{}(0.0));
    return n;
  }();
  node_ = zero;
}

Expr Expr::constant(double c) {
  if (c == 0.0) return Expr();
  auto n = std::make_shared<Node>();
  n->op = Op::constant;
  n->value = c;
  n->hash = mix(static_cast<std::size_t>(Op::constant), std::hash<double>{}(c));
  return Expr(std::move(n));
}

Expr Expr::variable(std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::variable;
  n->hash = mix(static_cast<std::size_t>(Op::variable), std::hash<std::string>{}(name));
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::raw(Op op, Expr a, Expr b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  std::size_t h = mix(static_cast<std::size_t>(op) * 7919U, a.hash());
  n->size = 1 + a.size();
  if (op != Op::neg) {
    h = mix(h, b.hash());
    n->size += b.size();
  }
  n->hash = h;
  n->a = std::move(a);
  if (op != Op::neg) n->b = std::move(b);
  return Expr(std::move(n));
}

Expr Expr::raw_func(Func f, Expr a) {
  auto n = std::make_shared<Node>();
  n->op = Op::func;
  n->fn = f;
  n->hash = mix(mix(static_cast<std::size_t>(Op::func) * 7919U, static_cast<std::size_t>(f) + 101U), a.hash());
  n->size = 1 + a.size();
  n->a = std::move(a);
  return Expr(std::move(n));
}

Op Expr::op() const { return node_->op; }
double Expr::constant_value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
Func Expr::func() const { return node_->fn; }
const Expr& Expr::left() const { return node_->a; }
const Expr& Expr::right() const { return node_->b; }
std::size_t Expr::size() const { return node_ ? node_->size : 0; }
std::size_t Expr::hash() const { return node_ ? node_->hash : 0; }

bool operator==(const Expr& x, const Expr& y) {
  if (x.node_ == y.node_) return true;
  if (!x.node_ || !y.node_) return false;
  if (x.hash() != y.hash() || x.op() != y.op() || x.size() != y.size()) return false;
  switch (x.op()) {
    case Op::constant: return x.constant_value() == y.constant_value();
    case Op::variable: return x.name() == y.name();
    case Op::neg: return x.left() == y.left();
    case Op::func: return x.func() == y.func() && x.left() == y.left();
    default: return x.left() == y.left() && x.right() == y.right();
  }
}

namespace {

bool is_negative_constant(const Expr& e) { return e.is_constant() && e.constant_value() < 0.0; }

template <typename F>
std::optional<double> try_fold(F&& f) {
  try {
    return f();
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    if (auto v = try_fold([&] { return detail::finite_or_throw(a.constant_value() + b.constant_value()); }))
      return Expr::constant(*v);
  }
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  if (b.op() == Op::neg) return a - b.left();
  if (is_negative_constant(b)) return a - Expr::constant(-b.constant_value());
  return Expr::raw(Op::add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    if (auto v = try_fold([&] { return detail::finite_or_throw(a.constant_value() - b.constant_value()); }))
      return Expr::constant(*v);
  }
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  if (a == b) return Expr();
  if (b.op() == Op::neg) return a + b.left();
  if (is_negative_constant(b)) return a + Expr::constant(-b.constant_value());
  return Expr::raw(Op::sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    if (auto v = try_fold([&] { return detail::finite_or_throw(a.constant_value() * b.constant_value()); }))
      return Expr::constant(*v);
  }
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr();
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return -b;
  if (b.is_constant(-1.0)) return -a;
  if (a.op() == Op::neg && b.op() == Op::neg) return a.left() * b.left();
  if (a.op() == Op::neg) return -(a.left() * b);
  if (b.op() == Op::neg) return -(a * b.left());
  if (b.is_constant() && !a.is_constant()) return b * a;
  if (a.is_constant() && b.op() == Op::mul && b.left().is_constant()) return (a * b.left()) * b.right();
  if (!a.is_constant() && b.op() == Op::mul && b.left().is_constant()) return b.left() * (a * b.right());
  return Expr::raw(Op::mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) {
    if (auto v = try_fold([&] { return detail::checked_div(a.constant_value(), b.constant_value()); }))
      return Expr::constant(*v);
  }
  if (a.is_constant(0.0) && !b.is_constant()) return Expr();
  if (b.is_constant(1.0)) return a;
  if (b.is_constant(-1.0)) return -a;
  return Expr::raw(Op::div, a, b);
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr::constant(0.0 - a.constant_value());
  if (a.op() == Op::neg) return a.left();
  if (a.op() == Op::sub) return Expr::raw(Op::sub, a.right(), a.left());
  return Expr::raw(Op::neg, a);
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (base.is_constant() && exponent.is_constant()) {
    if (auto v = try_fold([&] { return detail::checked_pow(base.constant_value(), exponent.constant_value()); }))
      return Expr::constant(*v);
  }
  if (exponent.is_constant(1.0)) return base;
  if (exponent.is_constant(0.0)) return Expr::constant(1.0);
  if (base.is_constant(1.0)) return Expr::constant(1.0);
  return Expr::raw(Op::pow, base, exponent);
}

Expr apply(Func f, const Expr& arg) {
  if (arg.is_constant()) {
    if (auto v = try_fold([&] { return detail::checked_func(f, arg.constant_value()); }))
      return Expr::constant(*v);
  }
  return Expr::raw_func(f, arg);
}

namespace {

using Memo = std::unordered_map<const void*, Expr>;

Expr rebuild(const Expr& e, const Expr& a, const Expr& b) {
  switch (e.op()) {
    case Op::add: return a + b;
    case Op::sub: return a - b;
    case Op::mul: return a * b;
    case Op::div: return a / b;
    case Op::pow: return pow(a, b);
    case Op::neg: return -a;
    case Op::func: return apply(e.func(), a);
    default: return e;
  }
}

Expr simplify_rec(const Expr& e, Memo& memo) {
  if (e.op() == Op::constant || e.op() == Op::variable) return e;
  if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
  Expr a = simplify_rec(e.left(), memo);
  Expr b = (e.op() == Op::neg || e.op() == Op::func) ? Expr() : simplify_rec(e.right(), memo);
  Expr out = rebuild(e, a, b);
  memo.emplace(e.id(), out);
  return out;
}

Expr substitute_rec(const Expr& e, const Substitution& subs, Memo& memo) {
  if (e.op() == Op::constant) return e;
  if (e.op() == Op::variable) {
    auto it = subs.find(e.name());
    return it == subs.end() ? e : it->second;
  }
  if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
  Expr a = substitute_rec(e.left(), subs, memo);
  Expr b = (e.op() == Op::neg || e.op() == Op::func) ? Expr() : substitute_rec(e.right(), subs, memo);
  Expr out = rebuild(e, a, b);
  memo.emplace(e.id(), out);
  return out;
}

void collect_vars(const Expr& e, std::set<std::string>& out, std::unordered_map<const void*, bool>& seen) {
  if (e.op() == Op::constant) return;
  if (e.op() == Op::variable) {
    out.insert(e.name());
    return;
  }
  if (!seen.emplace(e.id(), true).second) return;
  collect_vars(e.left(), out, seen);
  if (e.op() != Op::neg && e.op() != Op::func) collect_vars(e.right(), out, seen);
}

}  // namespace

Expr simplify(const Expr& e) {
  Memo memo;
  return simplify_rec(e, memo);
}

Expr substitute(const Expr& e, const Substitution& subs) {
  if (subs.empty()) return e;
  Memo memo;
  return substitute_rec(e, subs, memo);
}

std::set<std::string> free_variables(const Expr& e) {
  std::set<std::string> out;
  std::unordered_map<const void*, bool> seen;
  collect_vars(e, out, seen);
  return out;
}

bool depends_on(const Expr& e, std::string_view name) {
  return free_variables(e).count(std::string(name)) > 0;
}

}  // namespace ocsr
