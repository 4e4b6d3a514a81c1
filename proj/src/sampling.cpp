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

#include "ocsr/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "ocsr/errors.hpp"
#include "ocsr/program.hpp"

namespace ocsr {

double Sampler::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng_);
}

double Sampler::draw(const Var& var) {
  if (var.kind != VarKind::parameter) return uniform(-1.0, 1.0);
  if (var.value) return *var.value;
  double x = uniform(var.lo, var.hi);
  if (var.nonzero) {
    const double guard = 1e-3 * std::max(1.0, var.hi - var.lo);
    for (int i = 0; i < 100 && std::abs(x) < guard; ++i) x = uniform(var.lo, var.hi);
  }
  return x;
}

Samples sample(std::span<const Expr> exprs, const VarTable& table, Sampler& sampler, int trials) {
  std::set<std::string> names;
  for (const Expr& e : exprs) {
    auto fv = free_variables(e);
    names.insert(fv.begin(), fv.end());
  }
  std::vector<const Var*> vars;
  for (const auto& n : names) vars.push_back(&table.at(n));
  std::vector<std::string> ordered(names.begin(), names.end());
  auto slot_of = [&](std::string_view name) -> std::optional<std::size_t> {
    auto it = std::lower_bound(ordered.begin(), ordered.end(), name);
    if (it == ordered.end() || *it != name) return std::nullopt;
    return static_cast<std::size_t>(it - ordered.begin());
  };
  std::vector<Program> programs;
  for (const Expr& e : exprs) programs.emplace_back(std::span<const Expr>(&e, 1), slot_of);

  Samples out;
  out.values.resize(exprs.size());
  out.scales.resize(exprs.size());
  std::vector<double> point(vars.size());
  int valid = 0;
  for (int attempt = 0; attempt < 4 * trials && valid < trials; ++attempt) {
    for (std::size_t i = 0; i < vars.size(); ++i) point[i] = sampler.draw(*vars[i]);
    std::vector<double> vals(exprs.size()), scs(exprs.size());
    try {
      for (std::size_t k = 0; k < programs.size(); ++k) vals[k] = programs[k].run_one(point, &scs[k]);
    } catch (const DomainError&) {
      continue;
    }
    for (std::size_t k = 0; k < programs.size(); ++k) {
      out.values[k].push_back(vals[k]);
      out.scales[k].push_back(scs[k]);
    }
    ++valid;
  }
  if (valid == 0) throw UndecidableError("every sample point hit a domain error");
  return out;
}

bool is_zero(const Expr& e, const VarTable& table, Sampler& sampler, ZeroTest opts) {
  if (opts.trials < 1) throw Error("is_zero needs at least one trial");
  if (e.is_constant()) return e.constant_value() == 0.0;
  auto s = sample(std::span<const Expr>(&e, 1), table, sampler, opts.trials);
  for (std::size_t i = 0; i < s.values[0].size(); ++i)
    if (std::abs(s.values[0][i]) > opts.tol * (1.0 + s.scales[0][i])) return false;
  return true;
}

std::optional<double> proportional(const Expr& e1, const Expr& e2, const VarTable& table, Sampler& sampler,
                                   ZeroTest opts) {
  const Expr pair[2] = {e1, e2};
  auto s = sample(pair, table, sampler, opts.trials);
  std::optional<double> ratio;
  const double rel = std::max(1e-7, opts.tol);
  for (std::size_t i = 0; i < s.values[0].size(); ++i) {
    const double a = s.values[0][i];
    const double b = s.values[1][i];
    const bool a_zero = std::abs(a) <= opts.tol * (1.0 + s.scales[0][i]);
    const bool b_zero = std::abs(b) <= opts.tol * (1.0 + s.scales[1][i]);
    if (b_zero) {
      if (!a_zero) return std::nullopt;
      continue;
    }
    const double r = a / b;
    if (!ratio) {
      ratio = r;
    } else if (std::abs(r - *ratio) > rel * (1.0 + std::abs(*ratio))) {
      return std::nullopt;
    }
  }
  return ratio;
}

bool is_nonvanishing(const Expr& e, const VarTable& table, Sampler& sampler, ZeroTest opts) {
  if (e.is_constant()) return e.constant_value() != 0.0;
  auto s = sample(std::span<const Expr>(&e, 1), table, sampler, opts.trials);
  const double floor = std::sqrt(opts.tol);
  int sign = 0;
  for (std::size_t i = 0; i < s.values[0].size(); ++i) {
    const double v = s.values[0][i];
    if (std::abs(v) <= floor * (1.0 + s.scales[0][i])) return false;
    const int sg = v > 0 ? 1 : -1;
    if (sign != 0 && sg != sign) return false;
    sign = sg;
  }
  return true;
}

}  // namespace ocsr
