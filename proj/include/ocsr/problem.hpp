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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ocsr/expr.hpp"
#include "ocsr/sampling.hpp"
#include "ocsr/trajectory.hpp"

namespace ocsr {

struct Parameter {
  std::string name;
  std::optional<double> value;
  double lo = -1.0;
  double hi = 1.0;
  bool nonzero = false;
};

/// Endpoint data. Only fixed final time is supported.
struct Boundary {
  double t0 = 0.0;
  std::optional<double> T;
  std::map<std::string, double> q0;
  std::map<std::string, double> qT;
  // Initial guesses for non-state coordinates (controls, costates, velocities).
  std::map<std::string, double> seed;
};

/// q' = F(t, q, u), cost L(t, q, u).
struct ExplicitProblem {
  VarTable table;  // t, states, controls, parameters
  std::vector<std::string> states;
  std::vector<std::string> controls;
  std::vector<Expr> dynamics;
  Expr cost;
  std::optional<Boundary> boundary;
  std::vector<std::string> collisions;  // duplicate names met while building the table
};

/// Psi(t, q, v, u) = 0 with v the velocity of q; cost L(t, q, u), optionally v.
struct ImplicitProblem {
  VarTable table;  // t, states, velocities, controls, parameters; prolongation q -> v
  std::vector<std::string> states;
  std::vector<std::string> velocities;
  std::vector<std::string> controls;
  std::vector<Expr> constraints;
  Expr cost;
  std::optional<Boundary> boundary;
  std::vector<std::string> collisions;
};

/// Forced mechanical system with Lagrangian L(t, q, v) and forces F_i(t, q, v, u).
struct LagrangianControlProblem {
  VarTable table;  // t, states, v_<q>, w_<q>, controls, parameters; prolongation q -> v -> w
  std::vector<std::string> states;
  std::vector<std::string> velocities;
  std::vector<std::string> accelerations;
  std::vector<std::string> controls;
  Expr lagrangian;
  std::vector<Expr> forces;
  Expr cost;
  std::optional<Boundary> boundary;
  std::vector<std::string> collisions;
};

using ProblemSpec = std::variant<ExplicitProblem, ImplicitProblem, LagrangianControlProblem>;

std::string velocity_name(std::string_view state);
std::string momentum_name(std::string_view coordinate);

// Construction from expression strings; identifiers resolve against the
// problem's own table.
ExplicitProblem make_explicit(const std::vector<std::string>& states, const std::vector<std::string>& controls,
                              const std::vector<std::string>& dynamics, const std::string& cost,
                              const std::vector<Parameter>& params = {}, std::optional<Boundary> boundary = {});
ImplicitProblem make_implicit(const std::vector<std::string>& states, const std::vector<std::string>& controls,
                              const std::vector<std::string>& constraints, const std::string& cost,
                              const std::vector<Parameter>& params = {}, std::optional<Boundary> boundary = {});
LagrangianControlProblem make_lagrangian(const std::vector<std::string>& states,
                                         const std::vector<std::string>& controls, const std::string& lagrangian,
                                         const std::vector<std::string>& forces, const std::string& cost,
                                         const std::vector<Parameter>& params = {},
                                         std::optional<Boundary> boundary = {});

const VarTable& table_of(const ProblemSpec& p);
const Expr& cost_of(const ProblemSpec& p);
const std::optional<Boundary>& boundary_of(const ProblemSpec& p);

struct ValidationReport {
  std::vector<std::string> violations;
  std::size_t constraint_count = 0;  // s for implicit problems
  std::size_t rank = 0;              // typical Jacobian rank of the constraints
  bool ok() const { return violations.empty(); }
};

/// Checks naming and variable-kind discipline, the constraint rank of
/// implicit problems and Lagrangian regularity. Pure: uses its own sampler.
ValidationReport validate(const ProblemSpec& p, std::uint64_t seed = kDefaultSeed);

/// Psi^i = v^i - F^i.
ImplicitProblem lower_explicit(const ExplicitProblem& p);

/// States (q, v) with velocities (vbar, w); constraints are the forced
/// Euler-Lagrange equations d/dt(dL/dv) - dL/dq - F = 0 followed by v - vbar = 0.
/// Throws ProblemError if the velocity Hessian of L is singular.
ImplicitProblem lower_lagrangian(const LagrangianControlProblem& p, std::uint64_t seed = kDefaultSeed);

/// Composite Simpson quadrature of the running cost along a uniform grid,
/// with a trapezoid on the last interval when the interval count is odd.
double evaluate_cost(const ProblemSpec& p, const Extremal& traj);

}  // namespace ocsr
