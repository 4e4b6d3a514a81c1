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

// Checked scalar kernels shared by constant folding and the evaluators.

#include <cmath>

#include "ocsr/errors.hpp"
#include "ocsr/expr.hpp"

namespace ocsr::detail {

inline double finite_or_throw(double v) {
  if (!std::isfinite(v)) throw DomainError("non-finite result");
  return v;
}

inline double checked_div(double a, double b) {
  if (b == 0.0) throw DomainError("division by zero");
  return finite_or_throw(a / b);
}

inline double checked_pow(double base, double exponent) {
  if (base == 0.0 && exponent < 0.0) throw DomainError("zero raised to a negative power");
  if (base < 0.0 && exponent != std::floor(exponent))
    throw DomainError("negative base raised to a non-integer power");
  return finite_or_throw(std::pow(base, exponent));
}

inline double checked_func(Func f, double x) {
  switch (f) {
    case Func::sin: return std::sin(x);
    case Func::cos: return std::cos(x);
    case Func::tan: return finite_or_throw(std::tan(x));
    case Func::exp: return finite_or_throw(std::exp(x));
    case Func::log:
      if (x <= 0.0) throw DomainError("log of non-positive argument");
      return std::log(x);
    case Func::sqrt:
      if (x < 0.0) throw DomainError("sqrt of negative argument");
      return std::sqrt(x);
  }
  return 0.0;
}

}  // namespace ocsr::detail
