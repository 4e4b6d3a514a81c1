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
#include <stdexcept>
#include <string>

namespace ocsr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text; `offset` is the byte position where parsing failed.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifierError : public Error {
 public:
  explicit UnknownIdentifierError(const std::string& name)
      : Error("unknown identifier '" + name + "'"), name_(name) {}
  const std::string& identifier() const { return name_; }

 private:
  std::string name_;
};

class UnassignedVariableError : public Error {
 public:
  explicit UnassignedVariableError(const std::string& name)
      : Error("unassigned variable '" + name + "'") {}
};

/// Evaluation left the domain of an operation (log of non-positive, x/0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A probabilistic test could not find a single admissible sample point.
class UndecidableError : public Error {
 public:
  using Error::Error;
};

class ProblemError : public Error {
 public:
  using Error::Error;
};

/// Symbolic derivation failed: non-affine system, inconsistency, singular pivots.
class DerivationError : public Error {
 public:
  using Error::Error;
};

class InconsistentError : public DerivationError {
 public:
  using DerivationError::DerivationError;
};

class SingularError : public DerivationError {
 public:
  using DerivationError::DerivationError;
};

/// Newton divergence, rank loss or constraint drift during numerical work.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace ocsr
