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

#include "ocsr/pontryagin.hpp"

#include <algorithm>

#include <Eigen/Dense>

#include "linalg.hpp"
#include "ocsr/errors.hpp"
#include "ocsr/linear_solve.hpp"
#include "ocsr/program.hpp"

namespace ocsr {

std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::primary:
      return "primary";
    case Origin::momentum_definition:
      return "momentum-definition";
    case Origin::stationarity:
      return "stationarity";
    case Origin::tangency:
      return "tangency";
  }
  return "?";
}

void VectorFieldAnsatz::add_slot(const std::string& coordinate, const std::string& unknown) {
  if (coefficient_.count(coordinate)) throw Error("coordinate '" + coordinate + "' already has a slot");
  coordinates_.push_back(coordinate);
  unknowns_.push_back(unknown);
  coefficient_[coordinate] = Expr::variable(unknown);
  unknown_of_[coordinate] = unknown;
}

const Expr& VectorFieldAnsatz::coefficient(std::string_view coordinate) const {
  auto it = coefficient_.find(coordinate);
  if (it == coefficient_.end()) throw UnknownIdentifierError(std::string(coordinate));
  return it->second;
}

std::string_view VectorFieldAnsatz::unknown_of(std::string_view coordinate) const {
  auto it = unknown_of_.find(coordinate);
  if (it == unknown_of_.end()) throw UnknownIdentifierError(std::string(coordinate));
  return it->second;
}

bool VectorFieldAnsatz::resolved(std::string_view unknown) const { return resolved_.count(unknown) > 0; }

void VectorFieldAnsatz::assign(const Substitution& values) {
  for (auto& [x, coef] : coefficient_) coef = substitute(coef, values);
  for (const auto& u : unknowns_)
    if (values.count(u)) resolved_.insert(u);
}

Expr VectorFieldAnsatz::apply(const Expr& c) const {
  Expr acc = diff(c, "t");
  for (const auto& x : coordinates_) {
    Expr d = diff(c, x);
    if (d.is_constant(0.0)) continue;
    const Expr& coef = coefficient_.at(x);
    acc = acc + (d.is_constant(1.0) ? coef : d * coef);
  }
  return acc;
}

std::vector<std::string> PontryaginSystem::coordinates() const {
  std::vector<std::string> out = states;
  out.insert(out.end(), velocities.begin(), velocities.end());
  out.insert(out.end(), controls.begin(), controls.end());
  out.push_back("p");
  out.insert(out.end(), momenta.begin(), momenta.end());
  return out;
}

bool PontryaginSystem::is_unknown(std::string_view name) const {
  const auto& u = ansatz.unknowns();
  return std::find(u.begin(), u.end(), name) != u.end() ||
         std::find(multipliers.begin(), multipliers.end(), name) != multipliers.end();
}

namespace {

void copy_parameters(const VarTable& from, VarTable& to) {
  for (const auto& v : from.vars())
    if (v.kind == VarKind::parameter) to.add(v);
}

void require_clean(const std::vector<std::string>& collisions) {
  if (!collisions.empty()) throw ProblemError("name collision: '" + collisions.front() + "'");
}

// base - sum_k coefficient_k * symbol_k, skipping vanishing coefficients.
Expr minus_weighted(Expr base, const std::vector<Expr>& coefficients, const std::vector<std::string>& symbols) {
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    const Expr& d = coefficients[k];
    if (d.is_constant(0.0)) continue;
    Expr s = Expr::variable(symbols[k]);
    base = base - (d.is_constant(1.0) ? s : d * s);
  }
  return base;
}

// base + sum_k coefficient_k * symbol_k.
Expr plus_weighted(Expr base, const std::vector<Expr>& coefficients, const std::vector<std::string>& symbols) {
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    const Expr& d = coefficients[k];
    if (d.is_constant(0.0)) continue;
    Expr s = Expr::variable(symbols[k]);
    base = base + (d.is_constant(1.0) ? s : d * s);
  }
  return base;
}

std::vector<Expr> partials(const std::vector<Expr>& fs, std::string_view x) {
  std::vector<Expr> out;
  out.reserve(fs.size());
  for (const auto& f : fs) out.push_back(diff(f, x));
  return out;
}

}  // namespace

PontryaginSystem build_explicit(const ExplicitProblem& prob) {
  require_clean(prob.collisions);
  PontryaginSystem sys;
  sys.kind = SystemKind::explicit_form;
  sys.states = prob.states;
  sys.controls = prob.controls;
  sys.dynamics = prob.dynamics;
  sys.cost = prob.cost;
  sys.boundary = prob.boundary;
  for (const auto& q : prob.states) sys.momenta.push_back(momentum_name(q));

  auto& t = sys.table;
  t.add({"t", VarKind::time});
  for (const auto& q : sys.states) t.add({q, VarKind::state});
  for (const auto& u : sys.controls) t.add({u, VarKind::control});
  copy_parameters(prob.table, t);
  t.add({"p", VarKind::momentum_p});
  for (const auto& pq : sys.momenta) t.add({pq, VarKind::momentum_pi});

  for (std::size_t i = 0; i < sys.states.size(); ++i) sys.ansatz.add_slot(sys.states[i], "A_" + sys.states[i]);
  for (const auto& u : sys.controls) sys.ansatz.add_slot(u, "B_" + u);
  sys.ansatz.add_slot("p", "E");
  for (std::size_t i = 0; i < sys.states.size(); ++i) sys.ansatz.add_slot(sys.momenta[i], "C_" + sys.states[i]);
  for (const auto& u : sys.ansatz.unknowns()) t.add({u, VarKind::auxiliary});

  sys.hamiltonian = Expr::variable("p");
  for (std::size_t i = 0; i < sys.states.size(); ++i)
    sys.hamiltonian = sys.hamiltonian + Expr::variable(sys.momenta[i]) * sys.dynamics[i];
  sys.hamiltonian = sys.hamiltonian - sys.cost;
  sys.primary.push_back({"H", sys.hamiltonian, Origin::primary});
  sys.stationarity = stationarity(sys);
  return sys;
}

PontryaginSystem build_implicit(const ImplicitProblem& prob) {
  require_clean(prob.collisions);
  PontryaginSystem sys;
  sys.kind = SystemKind::implicit_form;
  sys.states = prob.states;
  sys.velocities = prob.velocities;
  sys.controls = prob.controls;
  sys.constraints = prob.constraints;
  sys.cost = prob.cost;
  sys.boundary = prob.boundary;
  for (const auto& q : prob.states) sys.momenta.push_back(momentum_name(q));
  for (std::size_t k = 0; k < prob.constraints.size(); ++k) sys.multipliers.push_back("lambda_" + std::to_string(k + 1));

  auto& t = sys.table;
  t.add({"t", VarKind::time});
  for (const auto& q : sys.states) t.add({q, VarKind::state});
  for (const auto& v : sys.velocities) t.add({v, VarKind::velocity});
  for (const auto& u : sys.controls) t.add({u, VarKind::control});
  copy_parameters(prob.table, t);
  t.add({"p", VarKind::momentum_p});
  for (const auto& pq : sys.momenta) t.add({pq, VarKind::momentum_pi});
  for (const auto& l : sys.multipliers) t.add({l, VarKind::multiplier});

  for (const auto& q : sys.states) sys.ansatz.add_slot(q, "A_" + q);
  for (std::size_t i = 0; i < sys.states.size(); ++i) sys.ansatz.add_slot(sys.velocities[i], "C_" + sys.states[i]);
  for (const auto& u : sys.controls) sys.ansatz.add_slot(u, "B_" + u);
  sys.ansatz.add_slot("p", "E");
  for (std::size_t i = 0; i < sys.states.size(); ++i) sys.ansatz.add_slot(sys.momenta[i], "D_" + sys.states[i]);
  for (const auto& u : sys.ansatz.unknowns()) t.add({u, VarKind::auxiliary});

  sys.hamiltonian = Expr::variable("p");
  for (std::size_t i = 0; i < sys.states.size(); ++i)
    sys.hamiltonian = sys.hamiltonian + Expr::variable(sys.momenta[i]) * Expr::variable(sys.velocities[i]);
  sys.hamiltonian = sys.hamiltonian - sys.cost;
  for (std::size_t k = 0; k < sys.constraints.size(); ++k)
    sys.primary.push_back({"Psi_" + std::to_string(k + 1), sys.constraints[k], Origin::primary});
  sys.primary.push_back({"H", sys.hamiltonian, Origin::primary});
  sys.stationarity = stationarity(sys);
  return sys;
}

PontryaginSystem build(const ProblemSpec& spec, std::uint64_t seed) {
  if (const auto* p = std::get_if<ExplicitProblem>(&spec)) return build_explicit(*p);
  if (const auto* p = std::get_if<ImplicitProblem>(&spec)) return build_implicit(*p);
  return build_implicit(lower_lagrangian(std::get<LagrangianControlProblem>(spec), seed));
}

std::vector<Expr> stationarity(const PontryaginSystem& sys) {
  std::vector<Expr> out;
  for (const auto& u : sys.controls) {
    if (sys.kind == SystemKind::explicit_form) {
      out.push_back(diff(sys.hamiltonian, u));
    } else {
      out.push_back(minus_weighted(diff(sys.cost, u), partials(sys.constraints, u), sys.multipliers));
    }
  }
  return out;
}

AdjointEquations adjoint_equations(const PontryaginSystem& sys, Sampler& sampler, ZeroTest opts) {
  AdjointEquations adj;
  const Expr& h = sys.hamiltonian;
  for (std::size_t i = 0; i < sys.states.size(); ++i) {
    const std::string& q = sys.states[i];
    adj.slots["A_" + q] = diff(h, sys.momenta[i]);
    if (sys.kind == SystemKind::explicit_form) {
      adj.slots["C_" + q] = -diff(h, q);
    } else {
      adj.slots["D_" + q] = minus_weighted(diff(sys.cost, q), partials(sys.constraints, q), sys.multipliers);
    }
  }
  if (sys.kind == SystemKind::explicit_form) {
    adj.slots["E"] = -diff(h, "t");
  } else {
    adj.slots["E"] = minus_weighted(diff(sys.cost, "t"), partials(sys.constraints, "t"), sys.multipliers);
    for (std::size_t i = 0; i < sys.states.size(); ++i) {
      const std::string& v = sys.velocities[i];
      Expr md = plus_weighted(Expr::variable(sys.momenta[i]) - diff(sys.cost, v), partials(sys.constraints, v),
                              sys.multipliers);
      adj.momentum_definitions.push_back({"momentum_" + sys.states[i], md, Origin::momentum_definition});
    }
  }

  VectorFieldAnsatz z = sys.ansatz;
  z.assign(adj.slots);
  // Energy row: Z(H) + lambda.Z(Psi) must equal the combination of the
  // momentum-definition and stationarity rows.
  Expr identity = z.apply(h);
  for (std::size_t k = 0; k < sys.constraints.size(); ++k)
    identity = identity + Expr::variable(sys.multipliers[k]) * z.apply(sys.constraints[k]);
  for (std::size_t i = 0; i < adj.momentum_definitions.size(); ++i)
    identity = identity - z.coefficient(sys.velocities[i]) * adj.momentum_definitions[i].expr;
  for (std::size_t a = 0; a < sys.controls.size(); ++a) {
    const Expr rate = z.coefficient(sys.controls[a]);
    if (sys.kind == SystemKind::explicit_form)
      identity = identity - rate * sys.stationarity[a];
    else
      identity = identity + rate * sys.stationarity[a];
  }
  adj.identity = identity;
  if (!is_zero(identity, sys.table, sampler, opts))
    throw InconsistentError("energy-row identity fails: " + to_string(identity));
  return adj;
}

namespace {

// Samples a matrix of expressions at points drawn over the whole table.
std::vector<Eigen::MatrixXd> sample_matrices(const std::vector<Expr>& entries, std::size_t rows, std::size_t cols,
                                             const VarTable& table, Sampler& sampler, int points) {
  Program prog = compile_for(entries, table);
  std::vector<double> x(table.size()), out(entries.size());
  std::vector<Eigen::MatrixXd> mats;
  for (int attempt = 0; attempt < 4 * points && static_cast<int>(mats.size()) < points; ++attempt) {
    for (std::size_t i = 0; i < table.size(); ++i) x[i] = sampler.draw(table.vars()[i]);
    try {
      prog.run(x, out);
    } catch (const DomainError&) {
      continue;
    }
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = out[r * cols + c];
    mats.push_back(std::move(m));
  }
  if (mats.empty()) throw UndecidableError("every regularity sample hit a domain error");
  return mats;
}

}  // namespace

RegularityCertificate regularity(const PontryaginSystem& sys, std::uint64_t seed, double rel_threshold, int points) {
  RegularityCertificate cert;
  cert.controls = sys.controls.size();
  Sampler sampler(seed);
  const auto m = sys.controls.size();

  cert.degenerate = std::all_of(sys.stationarity.begin(), sys.stationarity.end(),
                                [&](const Expr& e) { return is_zero(e, sys.table, sampler); });

  if (sys.kind == SystemKind::explicit_form) {
    std::vector<Expr> entries;
    for (const auto& phi : sys.stationarity)
      for (const auto& u : sys.controls) entries.push_back(diff(phi, u));
    for (const auto& mat : sample_matrices(entries, m, m, sys.table, sampler, points))
      cert.rank_profile.push_back(detail::numeric_rank(mat, rel_threshold));
    cert.note = "rank of the control Hessian of H";
  } else {
    AdjointEquations adj = adjoint_equations(sys, sampler);
    std::vector<Expr> eqs;
    for (const auto& md : adj.momentum_definitions) eqs.push_back(md.expr);
    eqs.insert(eqs.end(), sys.stationarity.begin(), sys.stationarity.end());
    LinearSolution lam = solve_linear(eqs, sys.multipliers, sys.table, sampler);

    VectorFieldAnsatz z = sys.ansatz;
    z.assign(adj.slots);
    z.assign(lam.solved);
    std::vector<Expr> rows;
    for (const auto& c : sys.constraints) rows.push_back(z.apply(c));
    for (const auto& r : lam.residuals) rows.push_back(z.apply(r));
    for (auto& r : rows) r = substitute(r, lam.solved);

    std::vector<std::string> rates;
    for (const auto& u : sys.controls) rates.push_back("B_" + u);
    for (const auto& q : sys.states) rates.push_back("C_" + q);
    std::vector<Expr> entries;
    for (const auto& r : rows)
      for (const auto& x : rates) entries.push_back(diff(r, x));
    for (const auto& mat : sample_matrices(entries, rows.size(), rates.size(), sys.table, sampler, points)) {
      const int full = detail::numeric_rank(mat, rel_threshold);
      const Eigen::MatrixXd without = mat.rightCols(static_cast<Eigen::Index>(sys.states.size()));
      cert.rank_profile.push_back(full - detail::numeric_rank(without, rel_threshold));
    }
    cert.note = "rank gained by the control rates in the tangency rows after eliminating multipliers";
  }
  cert.min_rank = *std::min_element(cert.rank_profile.begin(), cert.rank_profile.end());
  cert.max_rank = *std::max_element(cert.rank_profile.begin(), cert.rank_profile.end());
  cert.regular = cert.min_rank == static_cast<int>(m) && cert.max_rank == static_cast<int>(m);
  return cert;
}

}  // namespace ocsr
