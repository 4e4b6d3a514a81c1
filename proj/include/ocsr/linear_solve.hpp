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

#include <string>
#include <vector>

#include "ocsr/expr.hpp"
#include "ocsr/sampling.hpp"

namespace ocsr {

/// Substitution of coordinates solved from constraints. Right-hand sides
/// never mention a solved coordinate, so one pass of substitution reduces.
class Reduction {
 public:
  struct Entry {
    std::string coordinate;
    Expr value;
  };

  Reduction() = default;

  Expr apply(const Expr& e) const;

  /// Solves `c` (already reduced) for one coordinate it is affine in.
  /// Unsolvable constraints go to the unsolved list.
  bool try_add(const Expr& c, const VarTable& table, Sampler& sampler, ZeroTest opts = {});

  /// True unless `c` matches a constant-coefficient combination of the
  /// unsolved constraints on 16 samples.
  bool is_new(const Expr& c, const VarTable& table, Sampler& sampler, ZeroTest opts = {}) const;

  const std::vector<Entry>& entries() const { return entries_; }
  const std::vector<Expr>& unsolved() const { return unsolved_; }
  bool solves(std::string_view coordinate) const;

 private:
  std::vector<Entry> entries_;
  Substitution map_;
  std::vector<Expr> unsolved_;
};

struct LinearSolution {
  std::vector<std::string> order;  // unknowns in the order they were solved
  Substitution solved;             // may mention unknowns left free
  std::vector<Expr> residuals;     // unknown-free, nonzero, reduced
  std::vector<Expr> pending;       // still carry unknowns but offered no pivot
};

/// Gaussian elimination over `unknowns` with pivots checked nonvanishing by
/// sampling. Throws DerivationError for a non-affine equation,
/// InconsistentError when an equation reduces to a nonzero constant and
/// SingularError when unknowns remain but no pivot is certainly nonzero.
LinearSolution solve_linear(std::vector<Expr> equations, const std::vector<std::string>& unknowns,
                            const VarTable& table, Sampler& sampler, const Reduction* reduction = nullptr,
                            ZeroTest opts = {});

}  // namespace ocsr
