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

#include "ocsr/constraint_engine.hpp"

#include <algorithm>
#include <sstream>

#include "ocsr/errors.hpp"

namespace ocsr {

std::string_view to_string(ChainStatus s) {
  switch (s) {
    case ChainStatus::determined:
      return "determined";
    case ChainStatus::underdetermined:
      return "underdetermined";
    case ChainStatus::inconsistent:
      return "inconsistent";
    case ChainStatus::exhausted:
      return "exhausted";
  }
  return "?";
}

const Expr& DeterminedField::rate(std::string_view coordinate) const {
  for (std::size_t i = 0; i < coordinates.size(); ++i)
    if (coordinates[i] == coordinate) return rates[i];
  throw UnknownIdentifierError(std::string(coordinate));
}

Expr tangency(const VectorFieldAnsatz& field, const Expr& c) { return field.apply(c); }

namespace {

bool mentions_any(const Expr& e, const std::vector<std::string>& names) {
  return std::any_of(names.begin(), names.end(), [&](const std::string& n) { return depends_on(e, n); });
}

bool has_coordinate(const Expr& e, const VarTable& table) {
  for (const auto& v : free_variables(e)) {
    const VarKind k = table.at(v).kind;
    if (k != VarKind::parameter) return true;
  }
  return false;
}

class Engine {
 public:
  Engine(const PontryaginSystem& sys, ChainOptions opts)
      : sys_(sys), opts_(opts), sampler_(opts.seed), field_(sys.ansatz) {}

  ChainResult run();

 private:
  void fail(ChainStatus status, std::string message) {
    chain_.status = status;
    chain_.message = std::move(message);
  }
  // Reduces a residual and records it if it is new. Throws on a contradiction.
  std::optional<Expr> admit(const Expr& residual);
  void merge(const LinearSolution& sol);
  Expr resolve(const Expr& e) const { return reduction_.apply(substitute(e, chain_.solved)); }
  std::vector<NamedConstraint> final_constraints() const;
  void certify(const std::vector<NamedConstraint>& finals);
  DeterminedField make_field(const std::vector<NamedConstraint>& finals) const;

  const PontryaginSystem& sys_;
  ChainOptions opts_;
  Sampler sampler_;
  VectorFieldAnsatz field_;
  Reduction reduction_;
  ConstraintChain chain_;
  std::vector<std::string> open_;
};

std::optional<Expr> Engine::admit(const Expr& residual) {
  Expr r = reduction_.apply(residual);
  if (r.is_constant()) {
    if (r.constant_value() == 0.0) return std::nullopt;
    throw InconsistentError("constraint reduces to the nonzero constant " + to_string(r));
  }
  if (is_zero(r, sys_.table, sampler_, opts_.zero)) return std::nullopt;
  if (!has_coordinate(r, sys_.table))
    throw InconsistentError("constraint " + to_string(r) + " involves parameters only and is nonzero");
  if (!reduction_.is_new(r, sys_.table, sampler_, opts_.zero)) return std::nullopt;
  reduction_.try_add(r, sys_.table, sampler_, opts_.zero);
  return r;
}

void Engine::merge(const LinearSolution& sol) {
  for (auto& [name, rhs] : chain_.solved) rhs = reduction_.apply(substitute(rhs, sol.solved));
  for (const auto& name : sol.order) {
    chain_.solved[name] = reduction_.apply(sol.solved.at(name));
    chain_.solve_order.push_back(name);
    open_.erase(std::remove(open_.begin(), open_.end(), name), open_.end());
  }
}

ChainResult Engine::run() {
  const bool implicit = sys_.kind == SystemKind::implicit_form;
  const int max_gen = opts_.max_gen > 0 ? opts_.max_gen : static_cast<int>(2 * sys_.coordinates().size());

  AdjointEquations adj;
  try {
    adj = adjoint_equations(sys_, sampler_, opts_.zero);
  } catch (const InconsistentError& e) {
    fail(ChainStatus::inconsistent, e.what());
    return {chain_, std::nullopt};
  }
  chain_.fixed_slots = adj.slots;
  field_.assign(adj.slots);

  open_ = sys_.multipliers;
  for (const auto& u : sys_.controls) open_.push_back("B_" + u);
  if (implicit)
    for (const auto& q : sys_.states) open_.push_back("C_" + q);

  // Generation 0.
  std::vector<NamedConstraint> gen0 = sys_.primary;
  gen0.insert(gen0.end(), adj.momentum_definitions.begin(), adj.momentum_definitions.end());
  for (std::size_t a = 0; a < sys_.controls.size(); ++a)
    gen0.push_back({"phi_" + sys_.controls[a], sys_.stationarity[a], Origin::stationarity});
  chain_.generations.push_back(gen0);

  std::vector<Expr> pending;
  std::vector<Expr> newest;
  try {
    for (const auto& c : gen0) {
      if (c.origin == Origin::momentum_definition || mentions_any(c.expr, sys_.multipliers)) {
        pending.push_back(c.expr);
        continue;
      }
      Expr r = reduction_.apply(c.expr);
      if (is_zero(r, sys_.table, sampler_, opts_.zero)) continue;
      reduction_.try_add(r, sys_.table, sampler_, opts_.zero);
      if (c.name != "H") newest.push_back(c.expr);
    }

    for (int round = 1;; ++round) {
      std::vector<Expr> eqs;
      for (const auto& e : pending) eqs.push_back(substitute(e, chain_.solved));
      for (const auto& c : newest) eqs.push_back(substitute(tangency(field_, c), chain_.solved));
      ChainRound info;
      info.index = round;
      info.equations = eqs.size();
      LinearSolution sol = solve_linear(eqs, open_, sys_.table, sampler_, &reduction_, opts_.zero);
      merge(sol);
      info.solved = sol.order;
      pending = sol.pending;

      std::vector<NamedConstraint> gen;
      for (const auto& r : sol.residuals) {
        if (auto c = admit(r)) {
          const std::size_t k = chain_.generations.size();
          gen.push_back({"c" + std::to_string(k) + "_" + std::to_string(gen.size() + 1), *c, Origin::tangency});
        }
      }
      info.new_constraints = gen.size();
      chain_.rounds.push_back(info);
      // Solved values found before later constraints joined the reduction.
      for (auto& [name, rhs] : chain_.solved) rhs = reduction_.apply(rhs);

      if (gen.empty()) {
        chain_.status = open_.empty() ? ChainStatus::determined : ChainStatus::underdetermined;
        break;
      }
      chain_.generations.push_back(gen);
      if (static_cast<int>(chain_.generations.size()) - 1 >= max_gen) {
        fail(ChainStatus::exhausted, "reached the generation limit " + std::to_string(max_gen));
        return {chain_, std::nullopt};
      }
      newest.clear();
      for (const auto& c : gen) newest.push_back(c.expr);
    }
  } catch (const InconsistentError& e) {
    fail(ChainStatus::inconsistent, e.what());
    return {chain_, std::nullopt};
  }

  chain_.free_unknowns = open_;
  field_.assign(chain_.solved);
  auto finals = final_constraints();
  certify(finals);
  return {chain_, make_field(finals)};
}

std::vector<NamedConstraint> Engine::final_constraints() const {
  std::vector<NamedConstraint> out;
  for (std::size_t g = 0; g < chain_.generations.size(); ++g) {
    for (const auto& c : chain_.generations[g]) {
      if (g == 0 && (c.origin == Origin::momentum_definition || mentions_any(c.expr, sys_.multipliers))) continue;
      if (c.expr.is_constant(0.0)) continue;
      out.push_back(c);
    }
  }
  return out;
}

void Engine::certify(const std::vector<NamedConstraint>& finals) {
  chain_.uncertified.clear();
  for (const auto& c : finals) {
    Expr zc = resolve(tangency(field_, c.expr));
    if (!is_zero(zc, sys_.table, sampler_, opts_.zero)) chain_.uncertified.push_back(c.name);
  }
  chain_.tangency_certified = chain_.uncertified.empty();
}

DeterminedField Engine::make_field(const std::vector<NamedConstraint>& finals) const {
  DeterminedField f;
  f.table = sys_.table;
  f.coordinates = sys_.coordinates();
  for (const auto& x : f.coordinates) f.rates.push_back(resolve(field_.coefficient(x)));
  f.constraints = finals;
  f.hamiltonian = sys_.hamiltonian;
  for (const auto& phi : sys_.stationarity) f.stationarity.push_back(substitute(phi, chain_.solved));
  f.states = sys_.states;
  f.velocities = sys_.velocities;
  f.controls = sys_.controls;
  f.momenta = sys_.momenta;
  f.free_unknowns = chain_.free_unknowns;
  f.reduction = reduction_;
  return f;
}

}  // namespace

ChainResult run_chain(const PontryaginSystem& sys, ChainOptions opts) {
  Engine engine(sys, opts);
  return engine.run();
}

std::string final_field_report(const ConstraintChain& chain, const DeterminedField& field) {
  std::ostringstream os;
  auto rate_line = [&](const std::string& x) { os << "  d/dt " << x << " = " << field.rate(x) << "\n"; };
  os << "STATUS: " << to_string(chain.status) << "\n";
  os << "STATE EQUATIONS:\n";
  for (const auto& q : field.states) rate_line(q);
  for (const auto& v : field.velocities) rate_line(v);
  os << "CONTROL RATES:\n";
  for (const auto& u : field.controls) rate_line(u);
  os << "MOMENTUM RATES:\n";
  rate_line("p");
  for (const auto& pq : field.momenta) rate_line(pq);
  os << "STATIONARITY:\n";
  for (std::size_t a = 0; a < field.controls.size(); ++a)
    os << "  0 = " << field.stationarity[a] << "  [" << field.controls[a] << "]\n";
  os << "CONSTRAINTS:\n";
  for (const auto& c : field.constraints) os << "  0 = " << c.expr << "  [" << c.name << "]\n";
  os << "MULTIPLIERS:\n";
  os << "  lambda = 1\n";
  for (const auto& name : chain.solve_order)
    if (name.rfind("lambda_", 0) == 0) os << "  " << name << " = " << chain.solved.at(name) << "\n";
  if (!field.free_unknowns.empty()) {
    os << "FREE:\n";
    for (const auto& u : field.free_unknowns) os << "  " << u << "\n";
  }
  return os.str();
}

}  // namespace ocsr
