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

#include "ocsr/constraint_engine.hpp"
#include "ocsr/integrate.hpp"
#include "ocsr/pontryagin.hpp"

namespace ocsr {

std::string hamiltonian_report(const PontryaginSystem& sys);
std::string stationarity_report(const PontryaginSystem& sys);
std::string adjoint_report(const PontryaginSystem& sys, const AdjointEquations& adj);
std::string regularity_report(const RegularityCertificate& cert);

std::string chain_text(const ConstraintChain& chain);
std::string chain_json(const ConstraintChain& chain);

/// One row per grid point; 17 significant digits.
std::string trajectory_csv(const Extremal& traj);

std::string diagnostics_report(const DiagnosticsSummary& s, std::optional<double> cost,
                               const ShootResult* shoot = nullptr);

}  // namespace ocsr
