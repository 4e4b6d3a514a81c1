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
#include <string>
#include <vector>

#include "ocsr/expr.hpp"
#include "ocsr/problem.hpp"
#include "ocsr/sampling.hpp"

namespace ocsr {

enum class Origin { primary, momentum_definition, stationarity, tangency };
std::string_view to_string(Origin o);

struct NamedConstraint {
  std::string name;
  Expr expr;
  Origin origin = Origin::primary;
};

/// Z = d/dt + sum coefficient(x) d/dx over the non-time coordinates.
/// Coefficients start as unknown symbols and are filled in as they resolve.
class VectorFieldAnsatz {
 public:
  void add_slot(const std::string& coordinate, const std::string& unknown);

  const std::vector<std::string>& coordinates() const { return coordinates_; }
  const std::vector<std::string>& unknowns() const { return unknowns_; }
  const Expr& coefficient(std::string_view coordinate) const;
  std::string_view unknown_of(std::string_view coordinate) const;
  bool resolved(std::string_view unknown) const;

  /// Substitutes values for unknown symbols in every slot and marks those
  /// unknowns resolved.
  void assign(const Substitution& values);

  /// Z(c) = dc/dt + sum coefficient(x) dc/dx.
  Expr apply(const Expr& c) const;

 private:
  std::vector<std::string> coordinates_;
  std::vector<std::string> unknowns_;
  std::map<std::string, Expr, std::less<>> coefficient_;
  std::map<std::string, std::string, std::less<>> unknown_of_;
  std::set<std::string, std::less<>> resolved_;
};

enum class SystemKind { explicit_form, implicit_form };

struct PontryaginSystem {
  SystemKind kind = SystemKind::implicit_form;
  VarTable table;  // t, q, v, u, parameters, p, p_i, multipliers, ansatz unknowns
  std::vector<std::string> states;
  std::vector<std::string> velocities;  // empty for explicit systems
  std::vector<std::string> controls;
  std::vector<std::string> momenta;     // p_<q>, aligned with states
  std::vector<std::string> multipliers; // lambda_<k>, aligned with constraints
  std::vector<Expr> dynamics;           // explicit systems only
  std::vector<Expr> constraints;        // implicit systems only
  Expr cost;
  Expr hamiltonian;
  std::vector<NamedConstraint> primary;  // constraints, then H
  std::vector<Expr> stationarity;
  VectorFieldAnsatz ansatz;
  std::optional<Boundary> boundary;

  /// Every non-time coordinate in trajectory order: states, velocities,
  /// controls, p, momenta.
  std::vector<std::string> coordinates() const;
  bool is_unknown(std::string_view name) const;
};

PontryaginSystem build_explicit(const ExplicitProblem& p);
PontryaginSystem build_implicit(const ImplicitProblem& p);
/// Lowers Lagrangian problems first; explicit problems stay explicit.
PontryaginSystem build(const ProblemSpec& spec, std::uint64_t seed = kDefaultSeed);

std::vector<Expr> stationarity(const PontryaginSystem& sys);

struct AdjointEquations {
  Substitution slots;                          // ansatz unknown -> value fixed directly
  std::vector<NamedConstraint> momentum_definitions;
  Expr identity;                               // the energy-row combination, zero when consistent
};

/// Throws InconsistentError when the energy-row identity fails.
AdjointEquations adjoint_equations(const PontryaginSystem& sys, Sampler& sampler, ZeroTest opts = {});

struct RegularityCertificate {
  bool regular = false;
  std::size_t controls = 0;
  std::vector<int> rank_profile;  // one entry per admissible sample point
  int min_rank = 0;
  int max_rank = 0;
  bool degenerate = false;  // stationarity vanishes identically
  std::string note;
};

RegularityCertificate regularity(const PontryaginSystem& sys, std::uint64_t seed = kDefaultSeed,
                                 double rel_threshold = 1e-8, int points = 32);

}  // namespace ocsr
