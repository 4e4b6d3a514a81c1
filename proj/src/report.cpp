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

#include "ocsr/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace ocsr {

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string hamiltonian_report(const PontryaginSystem& sys) {
  std::ostringstream os;
  os << "H = " << sys.hamiltonian << "\n";
  os << "p0 = -1\n";
  os << "PRIMARY CONSTRAINTS:\n";
  for (const auto& c : sys.primary) os << "  " << c.name << ": 0 = " << c.expr << "\n";
  return os.str();
}

std::string stationarity_report(const PontryaginSystem& sys) {
  std::ostringstream os;
  for (std::size_t a = 0; a < sys.controls.size(); ++a)
    os << "phi_" << sys.controls[a] << " = " << sys.stationarity[a] << "\n";
  return os.str();
}

std::string adjoint_report(const PontryaginSystem& sys, const AdjointEquations& adj) {
  std::ostringstream os;
  os << "lambda = 1\n";
  for (const auto& u : sys.ansatz.unknowns()) {
    auto it = adj.slots.find(u);
    if (it != adj.slots.end()) os << u << " = " << it->second << "\n";
  }
  if (!adj.momentum_definitions.empty()) {
    os << "MOMENTUM DEFINITIONS:\n";
    for (const auto& md : adj.momentum_definitions) os << "  " << md.name << ": 0 = " << md.expr << "\n";
  }
  os << "ENERGY ROW: identity verified\n";
  return os.str();
}

std::string regularity_report(const RegularityCertificate& cert) {
  std::ostringstream os;
  os << (cert.regular ? "regular" : "singular") << "\n";
  os << "controls: " << cert.controls << "\n";
  os << "rank: min " << cert.min_rank << ", max " << cert.max_rank << " over " << cert.rank_profile.size()
     << " points\n";
  if (cert.degenerate) os << "stationarity vanishes identically\n";
  os << "measure: " << cert.note << "\n";
  return os.str();
}

std::string chain_text(const ConstraintChain& chain) {
  std::ostringstream os;
  for (std::size_t g = 0; g < chain.generations.size(); ++g) {
    os << "GENERATION " << g << ":\n";
    for (const auto& c : chain.generations[g])
      os << "  " << c.name << " [" << to_string(c.origin) << "]: 0 = " << c.expr << "\n";
    if (g < chain.rounds.size()) {
      const auto& r = chain.rounds[g];
      os << "ROUND " << r.index << ": " << r.equations << " equations, solved";
      if (r.solved.empty()) os << " nothing";
      for (const auto& s : r.solved) os << " " << s;
      os << ", " << r.new_constraints << " new constraints\n";
    }
  }
  os << "SOLVED:\n";
  os << "  lambda = 1\n";
  for (const auto& [name, value] : chain.fixed_slots) os << "  " << name << " = " << value << "  [direct]\n";
  for (const auto& name : chain.solve_order) os << "  " << name << " = " << chain.solved.at(name) << "\n";
  if (!chain.free_unknowns.empty()) {
    os << "FREE:";
    for (const auto& u : chain.free_unknowns) os << " " << u;
    os << "\n";
  }
  os << "STATUS: " << to_string(chain.status) << "\n";
  if (!chain.message.empty()) os << "MESSAGE: " << chain.message << "\n";
  if (chain.status == ChainStatus::determined || chain.status == ChainStatus::underdetermined) {
    os << "TANGENCY: " << (chain.tangency_certified ? "certified" : "failed");
    for (const auto& u : chain.uncertified) os << " " << u;
    os << "\n";
  }
  return os.str();
}

std::string chain_json(const ConstraintChain& chain) {
  nlohmann::ordered_json doc;
  doc["generations"] = nlohmann::ordered_json::array();
  for (const auto& gen : chain.generations) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : gen)
      arr.push_back({{"name", c.name}, {"origin", std::string(to_string(c.origin))}, {"expr", to_string(c.expr)}});
    doc["generations"].push_back(arr);
  }
  doc["rounds"] = nlohmann::ordered_json::array();
  for (const auto& r : chain.rounds)
    doc["rounds"].push_back(
        {{"index", r.index}, {"equations", r.equations}, {"solved", r.solved}, {"new_constraints", r.new_constraints}});
  nlohmann::ordered_json solved = nlohmann::ordered_json::object();
  solved["lambda"] = "1";
  for (const auto& [name, value] : chain.fixed_slots) solved[name] = to_string(value);
  for (const auto& name : chain.solve_order) solved[name] = to_string(chain.solved.at(name));
  doc["solved"] = solved;
  doc["free"] = chain.free_unknowns;
  doc["status"] = std::string(to_string(chain.status));
  if (!chain.message.empty()) doc["message"] = chain.message;
  doc["tangency_certified"] = chain.tangency_certified;
  return doc.dump(2) + "\n";
}

std::string trajectory_csv(const Extremal& traj) {
  std::ostringstream os;
  os << "t";
  for (const auto& n : traj.names) os << "," << n;
  os << ",H_residual,constraint_residual\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << num(traj.times[k]);
    for (double v : traj.points[k]) os << "," << num(v);
    os << "," << num(traj.diagnostics[k].hamiltonian) << "," << num(traj.diagnostics[k].constraint) << "\n";
  }
  return os.str();
}

std::string diagnostics_report(const DiagnosticsSummary& s, std::optional<double> cost, const ShootResult* shoot) {
  std::ostringstream os;
  os << "steps: " << s.steps << "\n";
  os << "max_H_residual: " << num(s.max_hamiltonian) << "\n";
  os << "max_constraint_residual: " << num(s.max_constraint) << "\n";
  os << "max_stationarity_residual: " << num(s.max_stationarity) << "\n";
  os << "max_drift_before_projection: " << num(s.max_drift) << "\n";
  if (cost) os << "cost: " << num(*cost) << "\n";
  if (shoot) {
    os << "shooting_unknowns:";
    for (const auto& u : shoot->unknowns) os << " " << u;
    os << "\n";
    os << "shooting_iterations: " << shoot->iterations << "\n";
    os << "shooting_residual: " << num(shoot->residual) << "\n";
  }
  return os.str();
}

}  // namespace ocsr
