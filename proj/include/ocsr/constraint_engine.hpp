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

#include "ocsr/linear_solve.hpp"
#include "ocsr/pontryagin.hpp"

namespace ocsr {

enum class ChainStatus { determined, underdetermined, inconsistent, exhausted };
std::string_view to_string(ChainStatus s);

struct ChainRound {
  int index = 0;
  std::vector<std::string> solved;  // unknowns fixed in this round
  std::size_t equations = 0;
  std::size_t new_constraints = 0;
};

struct ConstraintChain {
  std::vector<std::vector<NamedConstraint>> generations;
  std::vector<std::string> solve_order;
  Substitution solved;  // unknown or multiplier -> reduced value
  std::vector<ChainRound> rounds;
  std::vector<std::string> free_unknowns;
  ChainStatus status = ChainStatus::exhausted;
  std::string message;
  Substitution fixed_slots;  // ansatz slots the presymplectic equation fixes directly
  bool tangency_certified = false;
  std::vector<std::string> uncertified;  // constraints whose Z(c) failed to vanish
};

struct DeterminedField {
  VarTable table;
  std::vector<std::string> coordinates;  // trajectory order, time excluded
  std::vector<Expr> rates;               // dx/dt for each coordinate
  std::vector<NamedConstraint> constraints;  // the terminal submanifold
  Expr hamiltonian;
  std::vector<Expr> stationarity;  // multipliers eliminated
  std::vector<std::string> states, velocities, controls, momenta;
  std::vector<std::string> free_unknowns;  // rate unknowns left undetermined
  Reduction reduction;

  const Expr& rate(std::string_view coordinate) const;
};

struct ChainOptions {
  int max_gen = 0;  // 0 means twice the coordinate count
  std::uint64_t seed = kDefaultSeed;
  ZeroTest zero{};
};

struct ChainResult {
  ConstraintChain chain;
  std::optional<DeterminedField> field;  // present for determined and underdetermined chains
};

/// Z(c) for the ansatz as it stands.
Expr tangency(const VectorFieldAnsatz& field, const Expr& c);

ChainResult run_chain(const PontryaginSystem& sys, ChainOptions opts = {});

/// Equations of motion on the final constraint manifold.
std::string final_field_report(const ConstraintChain& chain, const DeterminedField& field);

}  // namespace ocsr
