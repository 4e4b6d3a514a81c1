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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ocsr {

struct StepDiagnostics {
  double hamiltonian = 0.0;   // |H| after projection
  double constraint = 0.0;    // max |c| over the final constraints after projection
  double stationarity = 0.0;  // max |phi_a|
  double drift = 0.0;         // max |c| before projection
};

/// Sampled integral curve of a determined field on a uniform grid.
struct Extremal {
  std::vector<std::string> names;            // coordinate columns, time excluded
  std::vector<double> times;
  std::vector<std::vector<double>> points;   // points[k][j] is column j at times[k]
  std::vector<StepDiagnostics> diagnostics;  // one per grid point
  double step = 0.0;

  std::optional<std::size_t> column(std::string_view name) const;
  std::vector<double> series(std::string_view name) const;
};

}  // namespace ocsr
