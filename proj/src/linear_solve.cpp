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

#include "ocsr/linear_solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Dense>

#include "ocsr/errors.hpp"

namespace ocsr {

namespace {

bool is_coordinate(VarKind k) {
  switch (k) {
    case VarKind::state:
    case VarKind::velocity:
    case VarKind::control:
    case VarKind::momentum_p:
    case VarKind::momentum_pi:
      return true;
    default:
      return false;
  }
}

int kind_rank(VarKind k) {
  switch (k) {
    case VarKind::momentum_p:
      return 0;
    case VarKind::velocity:
      return 1;
    case VarKind::control:
      return 2;
    case VarKind::momentum_pi:
      return 3;
    default:
      return 4;
  }
}

bool parameters_only(const Expr& e, const VarTable& table) {
  for (const auto& v : free_variables(e))
    if (table.at(v).kind != VarKind::parameter) return false;
  return true;
}

Expr solve_for(const Expr& eq, const std::string& x, const Expr& coef) {
  Expr rest = substitute(eq, Substitution{{x, Expr::constant(0.0)}});
  return (-rest) / coef;
}

}  // namespace

Expr Reduction::apply(const Expr& e) const {
  if (map_.empty()) return e;
  return substitute(e, map_);
}

bool Reduction::solves(std::string_view coordinate) const { return map_.find(coordinate) != map_.end(); }

bool Reduction::try_add(const Expr& c, const VarTable& table, Sampler& sampler, ZeroTest opts) {
  struct Candidate {
    std::string name;
    Expr coef;
    std::tuple<int, int, int, int, std::size_t> key;
  };
  std::optional<Candidate> best;
  for (const auto& x : free_variables(c)) {
    const Var& var = table.at(x);
    if (!is_coordinate(var.kind) || map_.count(x)) continue;
    Expr coef = diff(c, x);
    if (depends_on(coef, x)) continue;
    if (!is_nonvanishing(coef, table, sampler, opts)) continue;
    const bool constant = parameters_only(coef, table);
    const bool unit = coef.is_constant(1.0) || coef.is_constant(-1.0);
    Candidate cand{x, coef,
                   {constant ? 0 : 1, unit ? 0 : 1, coef.is_constant() ? 0 : 1, kind_rank(var.kind), coef.size()}};
    if (!best || cand.key < best->key) best = std::move(cand);
  }
  if (!best) {
    unsolved_.push_back(c);
    return false;
  }
  Expr value = solve_for(c, best->name, best->coef);
  const Substitution one{{best->name, value}};
  for (auto& entry : entries_) {
    entry.value = substitute(entry.value, one);
    map_[entry.coordinate] = entry.value;
  }
  for (auto& u : unsolved_) u = substitute(u, one);
  entries_.push_back({best->name, value});
  map_[best->name] = value;
  return true;
}

bool Reduction::is_new(const Expr& c, const VarTable& table, Sampler& sampler, ZeroTest opts) const {
  if (is_zero(c, table, sampler, opts)) return false;
  if (unsolved_.empty()) return true;
  std::vector<Expr> all{c};
  for (const auto& u : unsolved_) all.push_back(apply(u));
  constexpr int kPoints = 16;
  auto s = sample(all, table, sampler, kPoints);
  const auto rows = static_cast<Eigen::Index>(s.values[0].size());
  Eigen::MatrixXd basis(rows, static_cast<Eigen::Index>(unsolved_.size()));
  Eigen::VectorXd target(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    target(i) = s.values[0][i];
    for (std::size_t k = 0; k < unsolved_.size(); ++k) basis(i, static_cast<Eigen::Index>(k)) = s.values[k + 1][i];
  }
  Eigen::VectorXd coeffs = basis.completeOrthogonalDecomposition().solve(target);
  const double residual = (basis * coeffs - target).norm();
  return residual > 1e-7 * (1.0 + target.norm());
}

LinearSolution solve_linear(std::vector<Expr> equations, const std::vector<std::string>& unknowns,
                            const VarTable& table, Sampler& sampler, const Reduction* reduction, ZeroTest opts) {
  std::set<std::string, std::less<>> open(unknowns.begin(), unknowns.end());
  auto reduce = [&](const Expr& e) { return reduction ? reduction->apply(e) : e; };
  auto unknowns_in = [&](const Expr& e) {
    std::vector<std::string> out;
    for (const auto& v : free_variables(e))
      if (open.count(v)) out.push_back(v);
    return out;
  };

  for (auto& eq : equations) {
    eq = reduce(eq);
    const auto xs = unknowns_in(eq);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const Expr dx = diff(eq, xs[i]);
      for (std::size_t j = i; j < xs.size(); ++j)
        if (!is_zero(diff(dx, xs[j]), table, sampler, opts))
          throw DerivationError("equation is not affine in " + xs[i] + " and " + xs[j] + ": " + to_string(eq));
    }
  }

  LinearSolution out;
  while (true) {
    // Harvest equations free of open unknowns.
    std::vector<Expr> kept;
    for (auto& eq : equations) {
      if (!unknowns_in(eq).empty()) {
        kept.push_back(eq);
        continue;
      }
      if (eq.is_constant()) {
        if (eq.constant_value() != 0.0)
          throw InconsistentError("equation reduces to the nonzero constant " + to_string(eq));
        continue;
      }
      if (is_zero(eq, table, sampler, opts)) continue;
      out.residuals.push_back(eq);
    }
    equations = std::move(kept);
    if (equations.empty()) break;

    struct Pivot {
      std::size_t row;
      std::string x;
      Expr coef;
      std::pair<int, std::size_t> key;
    };
    std::optional<Pivot> best;
    for (std::size_t r = 0; r < equations.size(); ++r) {
      for (const auto& x : unknowns_in(equations[r])) {
        Expr coef = diff(equations[r], x);
        if (!is_nonvanishing(coef, table, sampler, opts)) continue;
        Pivot p{r, x, coef, {parameters_only(coef, table) ? 0 : 1, coef.size()}};
        if (!best || p.key < best->key) best = std::move(p);
      }
    }
    if (!best) {
      // Unknowns whose coefficients vanish identically drop out; anything
      // else needs a case split.
      bool progressed = false;
      for (auto& eq : equations) {
        Substitution zeros;
        for (const auto& x : unknowns_in(eq)) {
          if (!is_zero(diff(eq, x), table, sampler, opts)) continue;
          zeros[x] = Expr::constant(0.0);
        }
        if (!zeros.empty()) {
          eq = substitute(eq, zeros);
          progressed = true;
        }
      }
      if (progressed) continue;
      out.pending = equations;
      std::string what = "no pivot is certainly nonzero in:";
      for (const auto& eq : equations) what += " [" + to_string(eq) + "]";
      throw SingularError(what + " (needs a case split)");
    }

    Expr value = reduce(solve_for(equations[best->row], best->x, best->coef));
    const Substitution one{{best->x, value}};
    for (auto& [name, rhs] : out.solved) rhs = substitute(rhs, one);
    out.solved[best->x] = value;
    out.order.push_back(best->x);
    open.erase(best->x);
    equations.erase(equations.begin() + static_cast<std::ptrdiff_t>(best->row));
    for (auto& eq : equations) eq = reduce(substitute(eq, one));
  }
  return out;
}

}  // namespace ocsr
