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

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ocsr/constraint_engine.hpp"
#include "ocsr/problem.hpp"
#include "ocsr/program.hpp"
#include "ocsr/trajectory.hpp"

namespace ocsr {

struct IntegrateOptions {
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  double drift_tol = 1e-6;
  double shoot_tol = 1e-8;
  int shoot_max_iter = 50;
  double fd_step = 1e-6;
  // Undetermined rate unknowns are set to zero instead of rejected.
  bool zero_free_rates = false;
};

/// Compiled rates, constraints and monitors of a determined field. Points
/// are vectors over `coordinates()`; parameters take their declared values.
class FieldEvaluator {
 public:
  FieldEvaluator(const DeterminedField& field, bool zero_free_rates = false);

  const std::vector<std::string>& coordinates() const { return coordinates_; }
  std::size_t dim() const { return coordinates_.size(); }
  std::size_t constraint_count() const { return constraint_count_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  void rates(double t, std::span<const double> x, std::span<double> out) const;
  void constraints(double t, std::span<const double> x, std::span<double> out) const;
  Eigen::MatrixXd constraint_jacobian(double t, std::span<const double> x) const;
  double hamiltonian(double t, std::span<const double> x) const;
  double stationarity(double t, std::span<const double> x) const;  // max |phi_a|

 private:
  std::vector<double> slots(double t, std::span<const double> x) const;

  std::vector<std::string> coordinates_;
  std::vector<double> fixed_;  // parameter and free-unknown values after the coordinates
  std::size_t constraint_count_ = 0;
  Program rates_, constraints_, jacobian_, hamiltonian_, stationarity_;
};

struct ShootResult {
  Extremal extremal;
  std::vector<std::string> unknowns;  // free initial values solved for
  int iterations = 0;
  double residual = 0.0;
};

class Integrator {
 public:
  explicit Integrator(const DeterminedField& field, IntegrateOptions opts = {});

  const FieldEvaluator& evaluator() const { return eval_; }
  const IntegrateOptions& options() const { return opts_; }

  /// Point with the given coordinate values and zero elsewhere.
  std::vector<double> point(const std::map<std::string, double>& values) const;

  /// Coordinates moved by projection: controls, p, momenta, then velocities,
  /// taken greedily while they raise the constraint Jacobian rank.
  std::vector<std::size_t> dependent(double t, std::span<const double> x) const;

  std::vector<double> project(double t, std::vector<double> guess) const;
  std::vector<double> project(double t, std::vector<double> guess, const std::vector<std::size_t>& dependent) const;

  Extremal flow(double t0, std::vector<double> start, double T, double h) const;

  /// Initial values the shooting Newton iteration adjusts: coordinates that
  /// are neither states nor moved by projection.
  std::vector<std::string> shooting_unknowns(const Boundary& boundary) const;

  ShootResult shoot(const Boundary& boundary, double h) const;

 private:
  double max_abs_constraint(double t, std::span<const double> x) const;
  void shoot_setup(const Boundary& boundary, std::vector<double>& base, std::vector<std::size_t>& free) const;

  FieldEvaluator eval_;
  IntegrateOptions opts_;
  std::vector<std::string> states_;
  std::vector<std::string> order_;  // dependent-coordinate preference
};

struct DiagnosticsSummary {
  std::size_t steps = 0;
  double max_hamiltonian = 0.0;
  double max_constraint = 0.0;
  double max_stationarity = 0.0;
  double max_drift = 0.0;
};

DiagnosticsSummary diagnostics(const Extremal& traj);

}  // namespace ocsr
