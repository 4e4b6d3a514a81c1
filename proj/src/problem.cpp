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

#include "ocsr/problem.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Dense>

#include "linalg.hpp"
#include "ocsr/errors.hpp"
#include "ocsr/program.hpp"

namespace ocsr {

std::string velocity_name(std::string_view state) { return "v_" + std::string(state); }
std::string momentum_name(std::string_view coordinate) { return "p_" + std::string(coordinate); }

namespace {

constexpr int kValidationPoints = 32;

void add_or_record(VarTable& table, Var var, std::vector<std::string>& collisions) {
  if (table.contains(var.name)) {
    collisions.push_back(var.name);
    return;
  }
  table.add(std::move(var));
}

void add_params(VarTable& table, const std::vector<Parameter>& params, std::vector<std::string>& collisions) {
  for (const auto& p : params) {
    Var v{p.name, VarKind::parameter, p.value, p.lo, p.hi, p.nonzero};
    add_or_record(table, std::move(v), collisions);
  }
}

std::vector<Expr> parse_all(const std::vector<std::string>& texts, const VarTable& table) {
  std::vector<Expr> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(parse(t, table));
  return out;
}

std::vector<std::string> prefixed(const std::vector<std::string>& names, std::string_view prefix) {
  std::vector<std::string> out;
  for (const auto& n : names) out.push_back(std::string(prefix) + n);
  return out;
}

bool is_reserved(std::string_view name) {
  static const char* prefixes[] = {"p_", "A_", "B_", "C_", "D_", "lambda_"};
  if (name == "t" || name == "p" || name == "E" || func_from_name(name)) return true;
  return std::any_of(std::begin(prefixes), std::end(prefixes),
                     [&](const char* pre) { return name.rfind(pre, 0) == 0; });
}

void check_vars(const Expr& e, const std::set<std::string>& allowed, const std::string& what,
                std::vector<std::string>& violations) {
  for (const auto& v : free_variables(e))
    if (!allowed.count(v)) violations.push_back(what + " may not depend on '" + v + "'");
}

std::set<std::string> names_of_kinds(const VarTable& table, std::initializer_list<VarKind> kinds) {
  std::set<std::string> out;
  for (const auto& v : table.vars())
    if (std::find(kinds.begin(), kinds.end(), v.kind) != kinds.end()) out.insert(v.name);
  return out;
}

std::vector<double> random_point(const VarTable& table, Sampler& sampler) {
  std::vector<double> x;
  x.reserve(table.size());
  for (const auto& v : table.vars()) x.push_back(sampler.draw(v));
  return x;
}

void check_user_names(const std::vector<std::string>& collisions, const std::vector<std::string>& user,
                      std::vector<std::string>& violations) {
  for (const auto& c : collisions) violations.push_back("name collision: '" + c + "'");
  for (const auto& n : user)
    if (is_reserved(n)) violations.push_back("name collision: '" + n + "' is reserved");
}

std::vector<std::string> param_names(const VarTable& table) { return table.names_of(VarKind::parameter); }

// Jacobian rank of `rows` w.r.t. `cols`, taking the value seen at >= 90% of the points.
std::pair<std::size_t, bool> typical_rank(const std::vector<Expr>& rows, const std::vector<std::string>& cols,
                                          const VarTable& table, Sampler& sampler, std::size_t wanted) {
  std::vector<Expr> entries;
  for (const auto& r : rows)
    for (const auto& c : cols) entries.push_back(diff(r, c));
  Program prog = compile_for(entries, table);
  std::vector<double> out(entries.size());
  int hits = 0, valid = 0;
  std::map<int, int> histogram;
  for (int k = 0; k < kValidationPoints; ++k) {
    auto x = random_point(table, sampler);
    try {
      prog.run(x, out);
    } catch (const DomainError&) {
      continue;
    }
    Eigen::MatrixXd j(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < cols.size(); ++c) j(r, c) = out[r * cols.size() + c];
    const int rk = detail::numeric_rank(j);
    ++histogram[rk];
    ++valid;
    if (static_cast<std::size_t>(rk) == wanted) ++hits;
  }
  if (valid == 0) return {0, false};
  auto modal = std::max_element(histogram.begin(), histogram.end(),
                                [](const auto& a, const auto& b) { return a.second < b.second; });
  return {static_cast<std::size_t>(modal->first), hits >= (9 * valid + 9) / 10};
}

// Velocity Hessian of L must be invertible at every sample point.
bool lagrangian_regular(const LagrangianControlProblem& p, Sampler& sampler) {
  const std::size_t n = p.velocities.size();
  std::vector<Expr> entries;
  for (const auto& vi : p.velocities)
    for (const auto& vj : p.velocities) entries.push_back(diff(diff(p.lagrangian, vi), vj));
  Program prog = compile_for(entries, p.table);
  std::vector<double> out(entries.size());
  int valid = 0;
  for (int k = 0; k < kValidationPoints; ++k) {
    auto x = random_point(p.table, sampler);
    try {
      prog.run(x, out);
    } catch (const DomainError&) {
      continue;
    }
    ++valid;
    Eigen::MatrixXd w(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w(i, j) = out[i * n + j];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
    const auto& s = svd.singularValues();
    if (s(n - 1) <= 1e-8 * std::max(1.0, s(0))) return false;
  }
  return valid > 0;
}

}  // namespace

ExplicitProblem make_explicit(const std::vector<std::string>& states, const std::vector<std::string>& controls,
                              const std::vector<std::string>& dynamics, const std::string& cost,
                              const std::vector<Parameter>& params, std::optional<Boundary> boundary) {
  ExplicitProblem p;
  p.states = states;
  p.controls = controls;
  p.table.add({"t", VarKind::time});
  for (const auto& q : states) add_or_record(p.table, {q, VarKind::state}, p.collisions);
  for (const auto& u : controls) add_or_record(p.table, {u, VarKind::control}, p.collisions);
  add_params(p.table, params, p.collisions);
  p.dynamics = parse_all(dynamics, p.table);
  p.cost = parse(cost, p.table);
  p.boundary = std::move(boundary);
  return p;
}

ImplicitProblem make_implicit(const std::vector<std::string>& states, const std::vector<std::string>& controls,
                              const std::vector<std::string>& constraints, const std::string& cost,
                              const std::vector<Parameter>& params, std::optional<Boundary> boundary) {
  ImplicitProblem p;
  p.states = states;
  p.velocities = prefixed(states, "v_");
  p.controls = controls;
  p.table.add({"t", VarKind::time});
  for (const auto& q : states) add_or_record(p.table, {q, VarKind::state}, p.collisions);
  for (const auto& v : p.velocities) add_or_record(p.table, {v, VarKind::velocity}, p.collisions);
  for (const auto& u : controls) add_or_record(p.table, {u, VarKind::control}, p.collisions);
  add_params(p.table, params, p.collisions);
  for (std::size_t i = 0; i < states.size(); ++i)
    if (p.table.at(states[i]).kind == VarKind::state && p.table.at(p.velocities[i]).kind == VarKind::velocity)
      p.table.set_prolongation(states[i], p.velocities[i]);
  p.constraints = parse_all(constraints, p.table);
  p.cost = parse(cost, p.table);
  p.boundary = std::move(boundary);
  return p;
}

LagrangianControlProblem make_lagrangian(const std::vector<std::string>& states,
                                         const std::vector<std::string>& controls, const std::string& lagrangian,
                                         const std::vector<std::string>& forces, const std::string& cost,
                                         const std::vector<Parameter>& params, std::optional<Boundary> boundary) {
  LagrangianControlProblem p;
  p.states = states;
  p.velocities = prefixed(states, "v_");
  p.accelerations = prefixed(states, "w_");
  p.controls = controls;
  p.table.add({"t", VarKind::time});
  for (const auto& q : states) add_or_record(p.table, {q, VarKind::state}, p.collisions);
  for (const auto& v : p.velocities) add_or_record(p.table, {v, VarKind::velocity}, p.collisions);
  for (const auto& w : p.accelerations) add_or_record(p.table, {w, VarKind::auxiliary}, p.collisions);
  for (const auto& u : controls) add_or_record(p.table, {u, VarKind::control}, p.collisions);
  add_params(p.table, params, p.collisions);
  if (p.collisions.empty()) {
    for (std::size_t i = 0; i < states.size(); ++i) {
      p.table.set_prolongation(states[i], p.velocities[i]);
      p.table.set_prolongation(p.velocities[i], p.accelerations[i]);
    }
  }
  p.lagrangian = parse(lagrangian, p.table);
  p.forces = parse_all(forces, p.table);
  p.cost = parse(cost, p.table);
  p.boundary = std::move(boundary);
  return p;
}

const VarTable& table_of(const ProblemSpec& p) {
  return std::visit([](const auto& q) -> const VarTable& { return q.table; }, p);
}

const Expr& cost_of(const ProblemSpec& p) {
  return std::visit([](const auto& q) -> const Expr& { return q.cost; }, p);
}

const std::optional<Boundary>& boundary_of(const ProblemSpec& p) {
  return std::visit([](const auto& q) -> const std::optional<Boundary>& { return q.boundary; }, p);
}

ValidationReport validate(const ProblemSpec& spec, std::uint64_t seed) {
  ValidationReport report;
  Sampler sampler(seed);
  auto& bad = report.violations;

  if (const auto* p = std::get_if<ExplicitProblem>(&spec)) {
    std::vector<std::string> user = p->states;
    user.insert(user.end(), p->controls.begin(), p->controls.end());
    for (const auto& n : param_names(p->table)) user.push_back(n);
    check_user_names(p->collisions, user, bad);
    if (p->states.empty()) bad.push_back("at least one state is required");
    if (p->controls.empty()) bad.push_back("at least one control is required");
    if (p->dynamics.size() != p->states.size())
      bad.push_back("dynamics count " + std::to_string(p->dynamics.size()) + " differs from state count " +
                    std::to_string(p->states.size()));
    auto allowed = names_of_kinds(p->table, {VarKind::time, VarKind::state, VarKind::control, VarKind::parameter});
    for (std::size_t i = 0; i < p->dynamics.size(); ++i)
      check_vars(p->dynamics[i], allowed, "dynamics of '" + (i < p->states.size() ? p->states[i] : "?") + "'", bad);
    check_vars(p->cost, allowed, "cost", bad);
  } else if (const auto* p = std::get_if<ImplicitProblem>(&spec)) {
    std::vector<std::string> user = p->states;
    user.insert(user.end(), p->controls.begin(), p->controls.end());
    for (const auto& n : param_names(p->table)) user.push_back(n);
    check_user_names(p->collisions, user, bad);
    if (p->states.empty()) bad.push_back("at least one state is required");
    if (p->controls.empty()) bad.push_back("at least one control is required");
    if (p->constraints.empty()) bad.push_back("at least one constraint is required");
    auto allowed = names_of_kinds(
        p->table, {VarKind::time, VarKind::state, VarKind::velocity, VarKind::control, VarKind::parameter});
    for (std::size_t i = 0; i < p->constraints.size(); ++i)
      check_vars(p->constraints[i], allowed, "constraint " + std::to_string(i + 1), bad);
    check_vars(p->cost, allowed, "cost", bad);
    report.constraint_count = p->constraints.size();
    if (bad.empty()) {
      std::vector<std::string> cols = p->states;
      cols.insert(cols.end(), p->velocities.begin(), p->velocities.end());
      cols.insert(cols.end(), p->controls.begin(), p->controls.end());
      auto [rank, ok] = typical_rank(p->constraints, cols, p->table, sampler, p->constraints.size());
      report.rank = rank;
      if (!ok)
        bad.push_back("constraint differentials are dependent: rank " + std::to_string(rank) + " < " +
                      std::to_string(p->constraints.size()));
    }
  } else if (const auto* p = std::get_if<LagrangianControlProblem>(&spec)) {
    std::vector<std::string> user = p->states;
    user.insert(user.end(), p->controls.begin(), p->controls.end());
    for (const auto& n : param_names(p->table)) user.push_back(n);
    check_user_names(p->collisions, user, bad);
    for (const auto& n : user)
      if (n.rfind("vbar_", 0) == 0 || n.rfind("w_", 0) == 0)
        bad.push_back("name collision: '" + n + "' is reserved");
    if (p->states.empty()) bad.push_back("at least one state is required");
    if (p->controls.empty()) bad.push_back("at least one control is required");
    if (p->forces.size() != p->states.size())
      bad.push_back("force count " + std::to_string(p->forces.size()) + " differs from state count " +
                    std::to_string(p->states.size()));
    auto mech = names_of_kinds(p->table, {VarKind::time, VarKind::state, VarKind::velocity, VarKind::parameter});
    check_vars(p->lagrangian, mech, "lagrangian", bad);
    auto allowed = names_of_kinds(
        p->table, {VarKind::time, VarKind::state, VarKind::velocity, VarKind::control, VarKind::parameter});
    for (std::size_t i = 0; i < p->forces.size(); ++i)
      check_vars(p->forces[i], allowed, "force " + std::to_string(i + 1), bad);
    check_vars(p->cost, allowed, "cost", bad);
    if (bad.empty() && !lagrangian_regular(*p, sampler))
      bad.push_back("lagrangian is not regular: velocity Hessian singular at sample points");
  }
  return report;
}

ImplicitProblem lower_explicit(const ExplicitProblem& p) {
  ImplicitProblem out;
  out.states = p.states;
  out.velocities = prefixed(p.states, "v_");
  out.controls = p.controls;
  out.cost = p.cost;
  out.boundary = p.boundary;
  out.collisions = p.collisions;
  out.table.add({"t", VarKind::time});
  for (const auto& q : p.states) out.table.add(p.table.at(q));
  for (const auto& v : out.velocities) out.table.add({v, VarKind::velocity});
  for (const auto& u : p.controls) out.table.add(p.table.at(u));
  for (const auto& v : p.table.vars())
    if (v.kind == VarKind::parameter) out.table.add(v);
  for (std::size_t i = 0; i < p.states.size(); ++i) {
    out.table.set_prolongation(p.states[i], out.velocities[i]);
    out.constraints.push_back(Expr::variable(out.velocities[i]) - p.dynamics[i]);
  }
  return out;
}

ImplicitProblem lower_lagrangian(const LagrangianControlProblem& p, std::uint64_t seed) {
  Sampler sampler(seed);
  if (!lagrangian_regular(p, sampler))
    throw ProblemError("lagrangian is not regular: velocity Hessian singular at sample points");
  ImplicitProblem out;
  out.states = p.states;
  out.states.insert(out.states.end(), p.velocities.begin(), p.velocities.end());
  for (const auto& q : p.states) out.velocities.push_back("vbar_" + q);
  out.velocities.insert(out.velocities.end(), p.accelerations.begin(), p.accelerations.end());
  out.controls = p.controls;
  out.cost = p.cost;
  out.boundary = p.boundary;
  out.collisions = p.collisions;

  out.table.add({"t", VarKind::time});
  for (const auto& q : out.states) out.table.add({q, VarKind::state});
  for (const auto& v : out.velocities) out.table.add({v, VarKind::velocity});
  for (const auto& u : p.controls) out.table.add(p.table.at(u));
  for (const auto& v : p.table.vars())
    if (v.kind == VarKind::parameter) out.table.add(v);
  for (std::size_t i = 0; i < out.states.size(); ++i) out.table.set_prolongation(out.states[i], out.velocities[i]);

  const std::size_t n = p.states.size();
  for (std::size_t i = 0; i < n; ++i) {
    Expr momentum = diff(p.lagrangian, p.velocities[i]);
    Expr el = total_derivative(momentum, p.table) - diff(p.lagrangian, p.states[i]) - p.forces[i];
    out.constraints.push_back(el);
  }
  for (std::size_t i = 0; i < n; ++i)
    out.constraints.push_back(Expr::variable(p.velocities[i]) - Expr::variable(out.velocities[i]));
  return out;
}

double evaluate_cost(const ProblemSpec& spec, const Extremal& traj) {
  const VarTable& table = table_of(spec);
  const Expr& cost = cost_of(spec);
  const std::size_t n = traj.times.size();
  if (n == 0) throw Error("empty trajectory");
  // Slot 0 is time, then the trajectory columns, then parameter values.
  std::vector<double> slots(1 + traj.names.size());
  std::map<std::string, std::size_t, std::less<>> slot;
  for (std::size_t j = 0; j < traj.names.size(); ++j) slot[traj.names[j]] = 1 + j;
  for (const auto& v : table.vars()) {
    if (v.kind != VarKind::parameter || slot.count(v.name)) continue;
    if (!v.value) throw ProblemError("parameter '" + v.name + "' has no value");
    slot[v.name] = slots.size();
    slots.push_back(*v.value);
  }
  Program prog(std::span<const Expr>(&cost, 1), [&](std::string_view name) -> std::optional<std::size_t> {
    if (name == "t") return 0;
    auto it = slot.find(name);
    if (it == slot.end()) return std::nullopt;
    return it->second;
  });
  std::vector<double> f(n);
  for (std::size_t k = 0; k < n; ++k) {
    slots[0] = traj.times[k];
    std::copy(traj.points[k].begin(), traj.points[k].end(), slots.begin() + 1);
    f[k] = prog.run_one(slots);
  }
  if (n == 1) return 0.0;
  const std::size_t intervals = n - 1;
  const double h = (traj.times.back() - traj.times.front()) / static_cast<double>(intervals);
  const std::size_t simpson_end = intervals % 2 == 0 ? intervals : intervals - 1;
  double total = 0.0;
  for (std::size_t k = 0; k + 2 <= simpson_end; k += 2) total += h / 3.0 * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
  if (simpson_end != intervals) total += 0.5 * h * (f[intervals - 1] + f[intervals]);
  return total;
}

}  // namespace ocsr
