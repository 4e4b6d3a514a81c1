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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ocsr/expr.hpp"

namespace ocsr {

/// Straight-line evaluator for a batch of expressions over a fixed slot
/// layout. Shared subtrees are evaluated once. Immutable after construction;
/// `run` uses a thread-local register file.
class Program {
 public:
  using SlotOf = std::function<std::optional<std::size_t>(std::string_view)>;

  Program() = default;
  Program(std::span<const Expr> outputs, const SlotOf& slot_of);

  std::size_t output_count() const { return outputs_.size(); }

  /// Throws DomainError when an operation leaves its domain.
  void run(std::span<const double> slots, std::span<double> out) const;
  double run_one(std::span<const double> slots, double* scale = nullptr) const;

  struct Instr {
    Op op;
    Func fn;
    std::uint32_t a;
    std::uint32_t b;
    double c;
  };
 private:
  void execute(std::span<const double> slots, std::vector<double>& regs, double* scale) const;

  std::vector<Instr> code_;
  std::vector<std::uint32_t> outputs_;
};

/// Program whose slots follow the table's registration order.
Program compile_for(std::span<const Expr> outputs, const VarTable& table);

}  // namespace ocsr
