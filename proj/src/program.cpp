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

#include "ocsr/program.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "checked_math.hpp"
#include "ocsr/errors.hpp"

namespace ocsr {

namespace {

class Compiler {
 public:
  Compiler(std::vector<Program::Instr>& code, const Program::SlotOf& slot_of)
      : code_(code), slot_of_(slot_of) {}

  std::uint32_t emit(const Expr& e) {
    if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
    Program::Instr ins{e.op(), Func::sin, 0, 0, 0.0};
    switch (e.op()) {
      case Op::constant: ins.c = e.constant_value(); break;
      case Op::variable: {
        auto slot = slot_of_(e.name());
        if (!slot) throw UnassignedVariableError(e.name());
        ins.a = static_cast<std::uint32_t>(*slot);
        break;
      }
      case Op::neg: ins.a = emit(e.left()); break;
      case Op::func:
        ins.fn = e.func();
        ins.a = emit(e.left());
        break;
      default:
        ins.a = emit(e.left());
        ins.b = emit(e.right());
        break;
    }
    code_.push_back(ins);
    auto reg = static_cast<std::uint32_t>(code_.size() - 1);
    memo_.emplace(e.id(), reg);
    return reg;
  }

 private:
  std::vector<Program::Instr>& code_;
  const Program::SlotOf& slot_of_;
  std::unordered_map<const void*, std::uint32_t> memo_;
};

}  // namespace

Program::Program(std::span<const Expr> outputs, const SlotOf& slot_of) {
  Compiler compiler(code_, slot_of);
  outputs_.reserve(outputs.size());
  for (const Expr& e : outputs) outputs_.push_back(compiler.emit(e));
}

void Program::execute(std::span<const double> slots, std::vector<double>& regs, double* scale) const {
  regs.resize(code_.size());
  double biggest = 0.0;
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& ins = code_[i];
    double v = 0.0;
    switch (ins.op) {
      case Op::constant: v = ins.c; break;
      case Op::variable: v = slots[ins.a]; break;
      case Op::add: v = detail::finite_or_throw(regs[ins.a] + regs[ins.b]); break;
      case Op::sub: v = detail::finite_or_throw(regs[ins.a] - regs[ins.b]); break;
      case Op::mul: v = detail::finite_or_throw(regs[ins.a] * regs[ins.b]); break;
      case Op::div: v = detail::checked_div(regs[ins.a], regs[ins.b]); break;
      case Op::pow: v = detail::checked_pow(regs[ins.a], regs[ins.b]); break;
      case Op::neg: v = -regs[ins.a]; break;
      case Op::func: v = detail::checked_func(ins.fn, regs[ins.a]); break;
    }
    regs[i] = v;
    biggest = std::max(biggest, std::abs(v));
  }
  if (scale) *scale = biggest;
}

void Program::run(std::span<const double> slots, std::span<double> out) const {
  thread_local std::vector<double> regs;
  execute(slots, regs, nullptr);
  for (std::size_t k = 0; k < outputs_.size(); ++k) out[k] = regs[outputs_[k]];
}

double Program::run_one(std::span<const double> slots, double* scale) const {
  thread_local std::vector<double> regs;
  execute(slots, regs, scale);
  return regs[outputs_.front()];
}

Program compile_for(std::span<const Expr> outputs, const VarTable& table) {
  return Program(outputs, [&](std::string_view name) { return table.index_of(name); });
}

double eval(const Expr& e, const Assignment& point) {
  std::vector<std::string> names;
  for (const auto& n : free_variables(e)) {
    if (!point.count(n)) throw UnassignedVariableError(n);
    names.push_back(n);
  }
  std::vector<double> slots;
  slots.reserve(names.size());
  for (const auto& n : names) slots.push_back(point.find(n)->second);
  Program prog(std::span<const Expr>(&e, 1), [&](std::string_view name) -> std::optional<std::size_t> {
    auto it = std::lower_bound(names.begin(), names.end(), name);
    if (it == names.end() || *it != name) return std::nullopt;
    return static_cast<std::size_t>(it - names.begin());
  });
  return prog.run_one(slots);
}

}  // namespace ocsr
