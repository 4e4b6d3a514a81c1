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

#include <array>
#include <charconv>
#include <string>

#include "ocsr/expr.hpp"

namespace ocsr {

namespace {

// Binding strength of the printed form of a node.
int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::add:
    case Op::sub: return 1;
    case Op::mul:
    case Op::div: return 2;
    case Op::neg: return 3;
    case Op::pow: return 4;
    case Op::constant: return e.constant_value() < 0.0 ? 3 : 5;
    default: return 5;
  }
}

void format_number(double v, std::string& out) {
  std::array<char, 32> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), res.ptr);
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(e, out);
  if (wrap) out += ')';
}

bool is_negative_form(const Expr& e) { return precedence(e) == 3; }

void print(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Op::constant: format_number(e.constant_value(), out); return;
    case Op::variable: out += e.name(); return;
    case Op::func:
      out += to_string(e.func());
      out += '(';
      print(e.left(), out);
      out += ')';
      return;
    case Op::neg:
      out += '-';
      print_wrapped(e.left(), precedence(e.left()) < 3 || is_negative_form(e.left()) || e.left().is_constant(), out);
      return;
    case Op::pow:
      print_wrapped(e.left(), precedence(e.left()) <= 4, out);
      out += '^';
      print_wrapped(e.right(), precedence(e.right()) < 4, out);
      return;
    default: break;
  }
  const int p = precedence(e);
  const char* sym = e.op() == Op::add ? " + " : e.op() == Op::sub ? " - " : e.op() == Op::mul ? "*" : "/";
  // Left operands of the same level need no parentheses (left associativity);
  // right operands do, so the printed tree reparses to the same structure.
  print_wrapped(e.left(), precedence(e.left()) < p, out);
  out += sym;
  print_wrapped(e.right(), precedence(e.right()) <= p || is_negative_form(e.right()), out);
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

}  // namespace ocsr
