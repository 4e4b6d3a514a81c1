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

#include <cctype>
#include <charconv>
#include <string>

#include "ocsr/errors.hpp"
#include "ocsr/expr.hpp"

namespace ocsr {

namespace {

// expr  := term (('+' | '-') term)*
// term  := unary (('*' | '/') unary)*
// unary := '-' unary | power
// power := primary ('^' unary)?
// primary := number | ident | ident '(' expr ')' | '(' expr ')'
class Parser {
 public:
  Parser(std::string_view text, const VarTable& table) : text_(text), table_(table) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(what, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                   text_[pos_] == '\r' || text_[pos_] == '\f' || text_[pos_] == '\v'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::raw(Op::add, lhs, term());
      } else if (accept('-')) {
        lhs = Expr::raw(Op::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::raw(Op::mul, lhs, unary());
      } else if (accept('/')) {
        lhs = Expr::raw(Op::div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) {
      skip_ws();
      // A bare literal after the sign is a negative literal, unless it is a power base.
      if (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
        Expr literal = number();
        if (accept('^')) return Expr::raw(Op::neg, Expr::raw(Op::pow, literal, unary()));
        return Expr::constant(0.0 - literal.constant_value());
      }
      return Expr::raw(Op::neg, unary());
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) return Expr::raw(Op::pow, base, unary());
    return base;
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Expr number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) {
        pos_ = save;
        fail("malformed exponent");
      }
    }
    double value = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return Expr::constant(value);
  }

  Expr identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (auto f = func_from_name(name)) {
      if (!accept('(')) fail("expected '(' after function name '" + name + "'");
      Expr arg = expr();
      if (!accept(')')) fail("expected ')'");
      return Expr::raw_func(*f, arg);
    }
    if (!table_.contains(name)) throw UnknownIdentifierError(name);
    return Expr::variable(std::move(name));
  }

  std::string_view text_;
  const VarTable& table_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, const VarTable& table) { return Parser(text, table).run(); }

}  // namespace ocsr
