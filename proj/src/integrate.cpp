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

#include "ocsr/integrate.hpp"

#include <algorithm>
#include <cmath>

#include "linalg.hpp"
#include "ocsr/errors.hpp"

namespace ocsr {

std::optional<std::size_t> Extremal::column(std::string_view name) const {
  for (std::size_t j = 0; j < names.size(); ++j)
    if (names[j] == name) return j;
  return std::nullopt;
}

std::vector<double> Extremal::series(std::string_view name) const {
  if (name == "t") return times;
  auto j = column(name);
  if (!j) throw UnknownIdentifierError(std::string(name));
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& row : points) out.push_back(row[*j]);
  return out;
}

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

FieldEvaluator::FieldEvaluator(const DeterminedField& field, bool zero_free_rates)
    : coordinates_(field.coordinates), constraint_count_(field.constraints.size()) {
  std::map<std::string, std::size_t, std::less<>> slot;
  slot["t"] = 0;
  for (std::size_t i = 0; i < coordinates_.size(); ++i) slot[coordinates_[i]] = 1 + i;
  const std::size_t base = 1 + coordinates_.size();
  for (const auto& v : field.table.vars()) {
    if (v.kind != VarKind::parameter) continue;
    if (!v.value) throw ProblemError("parameter '" + v.name + "' needs a value for numerics");
    slot[v.name] = base + fixed_.size();
    fixed_.push_back(*v.value);
  }
  if (!field.free_unknowns.empty() && !zero_free_rates)
    throw DerivationError("field leaves " + field.free_unknowns.front() + " undetermined");
  for (const auto& u : field.free_unknowns) {
    slot[u] = base + fixed_.size();
    fixed_.push_back(0.0);
  }
  auto slot_of = [&](std::string_view name) -> std::optional<std::size_t> {
    auto it = slot.find(name);
    if (it == slot.end()) return std::nullopt;
    return it->second;
  };

  std::vector<Expr> cons, jac;
  for (const auto& c : field.constraints) cons.push_back(c.expr);
  for (const auto& c : cons)
    for (const auto& x : coordinates_) jac.push_back(diff(c, x));
  rates_ = Program(field.rates, slot_of);
  constraints_ = Program(cons, slot_of);
  jacobian_ = Program(jac, slot_of);
  hamiltonian_ = Program(std::span<const Expr>(&field.hamiltonian, 1), slot_of);
  stationarity_ = Program(field.stationarity, slot_of);
}

std::optional<std::size_t> FieldEvaluator::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < coordinates_.size(); ++i)
    if (coordinates_[i] == name) return i;
  return std::nullopt;
}

std::vector<double> FieldEvaluator::slots(double t, std::span<const double> x) const {
  std::vector<double> s;
  s.reserve(1 + x.size() + fixed_.size());
  s.push_back(t);
  s.insert(s.end(), x.begin(), x.end());
  s.insert(s.end(), fixed_.begin(), fixed_.end());
  return s;
}

void FieldEvaluator::rates(double t, std::span<const double> x, std::span<double> out) const {
  rates_.run(slots(t, x), out);
}

void FieldEvaluator::constraints(double t, std::span<const double> x, std::span<double> out) const {
  constraints_.run(slots(t, x), out);
}

Eigen::MatrixXd FieldEvaluator::constraint_jacobian(double t, std::span<const double> x) const {
  const auto n = static_cast<Eigen::Index>(dim());
  const auto m = static_cast<Eigen::Index>(constraint_count_);
  std::vector<double> flat(static_cast<std::size_t>(n * m));
  jacobian_.run(slots(t, x), flat);
  Eigen::MatrixXd j(m, n);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < n; ++c) j(r, c) = flat[static_cast<std::size_t>(r * n + c)];
  return j;
}

double FieldEvaluator::hamiltonian(double t, std::span<const double> x) const {
  return hamiltonian_.run_one(slots(t, x));
}

double FieldEvaluator::stationarity(double t, std::span<const double> x) const {
  std::vector<double> out(stationarity_.output_count());
  stationarity_.run(slots(t, x), out);
  return max_abs(out);
}

Integrator::Integrator(const DeterminedField& field, IntegrateOptions opts)
    : eval_(field, opts.zero_free_rates), opts_(opts), states_(field.states) {
  order_ = field.controls;
  order_.push_back("p");
  order_.insert(order_.end(), field.momenta.begin(), field.momenta.end());
  order_.insert(order_.end(), field.velocities.begin(), field.velocities.end());
}

std::vector<double> Integrator::point(const std::map<std::string, double>& values) const {
  std::vector<double> x(eval_.dim(), 0.0);
  for (const auto& [name, value] : values) {
    auto i = eval_.index_of(name);
    if (!i) throw ProblemError("'" + name + "' is not a coordinate of the field");
    x[*i] = value;
  }
  return x;
}

double Integrator::max_abs_constraint(double t, std::span<const double> x) const {
  std::vector<double> c(eval_.constraint_count());
  eval_.constraints(t, x, c);
  return max_abs(c);
}

std::vector<std::size_t> Integrator::dependent(double t, std::span<const double> x) const {
  const Eigen::MatrixXd j = eval_.constraint_jacobian(t, x);
  const int target = detail::numeric_rank(j);
  std::vector<std::size_t> chosen;
  int rank = 0;
  for (const auto& name : order_) {
    if (rank == target) break;
    const std::size_t col = *eval_.index_of(name);
    Eigen::MatrixXd sub(j.rows(), static_cast<Eigen::Index>(chosen.size() + 1));
    for (std::size_t k = 0; k < chosen.size(); ++k)
      sub.col(static_cast<Eigen::Index>(k)) = j.col(static_cast<Eigen::Index>(chosen[k]));
    sub.col(static_cast<Eigen::Index>(chosen.size())) = j.col(static_cast<Eigen::Index>(col));
    const int r = detail::numeric_rank(sub);
    if (r > rank) {
      chosen.push_back(col);
      rank = r;
    }
  }
  if (rank < target || target < static_cast<int>(eval_.constraint_count()))
    throw NumericalError("constraint Jacobian is rank deficient in the dependent coordinates (rank " +
                         std::to_string(rank) + " of " + std::to_string(eval_.constraint_count()) + ")");
  return chosen;
}

std::vector<double> Integrator::project(double t, std::vector<double> guess) const {
  if (eval_.constraint_count() == 0) return guess;
  const auto dep = dependent(t, guess);
  return project(t, std::move(guess), dep);
}

std::vector<double> Integrator::project(double t, std::vector<double> x,
                                        const std::vector<std::size_t>& dependent) const {
  const std::size_t m = eval_.constraint_count();
  if (m == 0) return x;
  std::vector<double> c(m);
  eval_.constraints(t, x, c);
  double norm = max_abs(c);
  for (int it = 0; it < opts_.newton_max_iter; ++it) {
    if (norm < opts_.newton_tol) return x;
    const Eigen::MatrixXd j = eval_.constraint_jacobian(t, x);
    Eigen::MatrixXd jd(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(dependent.size()));
    for (std::size_t k = 0; k < dependent.size(); ++k)
      jd.col(static_cast<Eigen::Index>(k)) = j.col(static_cast<Eigen::Index>(dependent[k]));
    Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(m));
    const Eigen::VectorXd step = jd.completeOrthogonalDecomposition().solve(rhs);
    double alpha = 1.0;
    std::vector<double> trial(x.size());
    std::vector<double> ct(m);
    double trial_norm = norm;
    for (int halving = 0; halving < 12; ++halving, alpha *= 0.5) {
      trial = x;
      for (std::size_t k = 0; k < dependent.size(); ++k) trial[dependent[k]] += alpha * step(static_cast<Eigen::Index>(k));
      try {
        eval_.constraints(t, trial, ct);
      } catch (const DomainError&) {
        continue;
      }
      trial_norm = max_abs(ct);
      if (trial_norm < norm) break;
    }
    if (!(trial_norm < norm)) {
      // Round-off floor: large coordinates cannot reach the absolute tolerance.
      if (norm < opts_.drift_tol) return x;
      throw NumericalError("projection stalled at residual " + std::to_string(norm));
    }
    x = trial;
    c = ct;
    norm = trial_norm;
  }
  if (norm < opts_.newton_tol) return x;
  throw NumericalError("projection did not converge in " + std::to_string(opts_.newton_max_iter) +
                       " iterations (residual " + std::to_string(norm) + ")");
}

Extremal Integrator::flow(double t0, std::vector<double> start, double T, double h) const {
  if (!(h > 0.0) || !(T > 0.0)) throw ProblemError("flow needs positive T and h");
  const double ratio = T / h;
  const auto steps = static_cast<std::size_t>(std::llround(ratio));
  if (steps == 0 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio)
    throw ProblemError("T must be a whole number of steps h");
  const double dt = T / static_cast<double>(steps);
  const std::size_t n = eval_.dim();
  const auto dep = eval_.constraint_count() ? dependent(t0, start) : std::vector<std::size_t>{};
  std::vector<double> x = project(t0, std::move(start), dep);

  Extremal traj;
  traj.names = eval_.coordinates();
  traj.step = dt;
  auto record = [&](double t, double drift) {
    StepDiagnostics d;
    d.hamiltonian = std::abs(eval_.hamiltonian(t, x));
    d.constraint = max_abs_constraint(t, x);
    d.stationarity = eval_.stationarity(t, x);
    d.drift = drift;
    for (double v : x)
      if (!std::isfinite(v)) throw NumericalError("trajectory left the finite range at t = " + std::to_string(t));
    traj.times.push_back(t);
    traj.points.push_back(x);
    traj.diagnostics.push_back(d);
  };
  record(t0, 0.0);

  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = t0 + static_cast<double>(s) * dt;
    eval_.rates(t, x, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    eval_.rates(t + 0.5 * dt, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    eval_.rates(t + 0.5 * dt, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
    eval_.rates(t + dt, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    const double t1 = t0 + static_cast<double>(s + 1) * dt;
    const double drift = max_abs_constraint(t1, x);
    x = project(t1, std::move(x), dep);
    const double after = max_abs_constraint(t1, x);
    if (after > opts_.drift_tol)
      throw NumericalError("constraint drift " + std::to_string(after) + " after projection at t = " +
                           std::to_string(t1));
    record(t1, drift);
  }
  return traj;
}

void Integrator::shoot_setup(const Boundary& boundary, std::vector<double>& base,
                             std::vector<std::size_t>& free) const {
  std::map<std::string, double> seed = boundary.seed;
  for (const auto& [q, value] : boundary.q0) {
    if (std::find(states_.begin(), states_.end(), q) == states_.end())
      throw ProblemError("boundary names '" + q + "', which is not a state");
    seed[q] = value;
  }
  base = point(seed);
  const auto dep = eval_.constraint_count() ? dependent(boundary.t0, base) : std::vector<std::size_t>{};
  free.clear();
  for (std::size_t i = 0; i < eval_.dim(); ++i) {
    const std::string& name = eval_.coordinates()[i];
    const bool is_state = std::find(states_.begin(), states_.end(), name) != states_.end();
    if (is_state || std::find(dep.begin(), dep.end(), i) != dep.end()) continue;
    free.push_back(i);
  }
}

std::vector<std::string> Integrator::shooting_unknowns(const Boundary& boundary) const {
  std::vector<double> base;
  std::vector<std::size_t> free;
  shoot_setup(boundary, base, free);
  std::vector<std::string> names;
  for (auto i : free) names.push_back(eval_.coordinates()[i]);
  return names;
}

ShootResult Integrator::shoot(const Boundary& boundary, double h) const {
  if (!boundary.T) throw ProblemError("shooting needs the final time T");
  if (boundary.qT.empty()) throw ProblemError("shooting needs terminal state values");
  const double t0 = boundary.t0;
  const double T = *boundary.T;

  ShootResult result;
  std::vector<double> base;
  std::vector<std::size_t> free;
  shoot_setup(boundary, base, free);
  for (auto i : free) result.unknowns.push_back(eval_.coordinates()[i]);
  std::vector<std::size_t> targets;
  std::vector<double> goal;
  for (const auto& [q, value] : boundary.qT) {
    auto i = eval_.index_of(q);
    if (!i || std::find(states_.begin(), states_.end(), q) == states_.end())
      throw ProblemError("boundary names '" + q + "', which is not a state");
    targets.push_back(*i);
    goal.push_back(value);
  }

  auto run = [&](const Eigen::VectorXd& z, Extremal* keep) {
    std::vector<double> x = base;
    for (std::size_t k = 0; k < free.size(); ++k) x[free[k]] = z(static_cast<Eigen::Index>(k));
    Extremal traj = flow(t0, std::move(x), T, h);
    Eigen::VectorXd r(static_cast<Eigen::Index>(targets.size()));
    for (std::size_t k = 0; k < targets.size(); ++k) r(static_cast<Eigen::Index>(k)) = traj.points.back()[targets[k]] - goal[k];
    if (keep) *keep = std::move(traj);
    return r;
  };

  Eigen::VectorXd z(static_cast<Eigen::Index>(free.size()));
  for (std::size_t k = 0; k < free.size(); ++k) z(static_cast<Eigen::Index>(k)) = base[free[k]];
  Extremal current;
  Eigen::VectorXd r = run(z, &current);
  double norm = r.lpNorm<Eigen::Infinity>();
  for (int it = 0;; ++it) {
    if (norm < opts_.shoot_tol) {
      result.extremal = std::move(current);
      result.iterations = it;
      result.residual = norm;
      return result;
    }
    if (it >= opts_.shoot_max_iter)
      throw NumericalError("shooting did not converge in " + std::to_string(opts_.shoot_max_iter) +
                           " iterations (residual " + std::to_string(norm) + ")");
    if (free.empty()) throw NumericalError("shooting has no free initial values to adjust");
    Eigen::MatrixXd jac(r.size(), z.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) {
      Eigen::VectorXd zp = z;
      zp(k) += opts_.fd_step;
      jac.col(k) = (run(zp, nullptr) - r) / opts_.fd_step;
    }
    if (detail::numeric_rank(jac) == 0) throw NumericalError("shooting Jacobian is singular");
    const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-r);
    double alpha = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 12; ++halving, alpha *= 0.5) {
      Extremal trial;
      Eigen::VectorXd rt;
      try {
        rt = run(z + alpha * step, &trial);
      } catch (const NumericalError&) {
        continue;
      } catch (const DomainError&) {
        continue;
      }
      const double tn = rt.lpNorm<Eigen::Infinity>();
      if (tn < norm) {
        z += alpha * step;
        r = rt;
        norm = tn;
        current = std::move(trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) throw NumericalError("shooting Newton step failed to reduce the residual " + std::to_string(norm));
  }
}

DiagnosticsSummary diagnostics(const Extremal& traj) {
  DiagnosticsSummary s;
  s.steps = traj.times.empty() ? 0 : traj.times.size() - 1;
  for (const auto& d : traj.diagnostics) {
    s.max_hamiltonian = std::max(s.max_hamiltonian, d.hamiltonian);
    s.max_constraint = std::max(s.max_constraint, d.constraint);
    s.max_stationarity = std::max(s.max_stationarity, d.stationarity);
    s.max_drift = std::max(s.max_drift, d.drift);
  }
  return s;
}

}  // namespace ocsr
