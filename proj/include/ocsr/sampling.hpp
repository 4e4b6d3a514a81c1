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
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ocsr/expr.hpp"

namespace ocsr {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

/// Seeded source of sample points. Passed explicitly so every probabilistic
/// decision is reproducible from one seed.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed = kDefaultSeed) : rng_(seed) {}

  double uniform(double lo, double hi);
  /// Parameters with a value are pinned to it; other parameters draw from
  /// their declared range (away from 0 if declared nonzero); everything
  /// else draws from [-1, 1].
  double draw(const Var& var);
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

struct ZeroTest {
  int trials = 16;
  double tol = 1e-9;
};

/// Probabilistic identity test: |e(x_k)| <= tol * (1 + scale_k) at `trials`
/// random points, where scale_k is the largest intermediate magnitude seen
/// while evaluating e. Points hitting domain errors are skipped. A nonzero
/// polynomial of bounded degree passes only with negligible probability.
struct Samples {
  std::vector<std::vector<double>> values;  // values[k][i]: output k at point i
  std::vector<std::vector<double>> scales;  // largest intermediate magnitude
};

/// Evaluates all outputs at the same `trials` admissible points, skipping
/// points that raise domain errors.
Samples sample(std::span<const Expr> exprs, const VarTable& table, Sampler& sampler, int trials);

bool is_zero(const Expr& e, const VarTable& table, Sampler& sampler, ZeroTest opts = {});

/// The constant c with e1 = c * e2 at every sample point, if there is one.
std::optional<double> proportional(const Expr& e1, const Expr& e2, const VarTable& table, Sampler& sampler,
                                   ZeroTest opts = {});

/// True when e is bounded away from zero with a fixed sign over all sample
/// points, i.e. safe to use as a pivot.
bool is_nonvanishing(const Expr& e, const VarTable& table, Sampler& sampler, ZeroTest opts = {});

}  // namespace ocsr
