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

// ocsr: derive, analyse and integrate weak-Pontryagin extremals.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ocsr/constraint_engine.hpp"
#include "ocsr/errors.hpp"
#include "ocsr/integrate.hpp"
#include "ocsr/pontryagin.hpp"
#include "ocsr/problem.hpp"
#include "ocsr/problem_io.hpp"
#include "ocsr/report.hpp"

namespace {

enum Exit { kOk = 0, kInput = 2, kDerivation = 3, kNumerical = 4 };

struct RunConfig {
  std::string command;
  std::string input;
  std::string out;
  std::uint64_t seed = ocsr::kDefaultSeed;
  double h = 1e-3;
  std::optional<double> T;
  int max_gen = 0;
  int trials = 16;
  double tol = 1e-9;
  bool zero_free_rates = false;
};

// Input errors that surface after loading.
struct InputError : ocsr::Error {
  using Error::Error;
};

void write(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw InputError("cannot write " + (dir / name).string());
  f << text;
}

ocsr::ProblemSpec load_valid(const RunConfig& cfg) {
  ocsr::ProblemSpec spec = ocsr::load_problem(cfg.input);
  auto report = ocsr::validate(spec, cfg.seed);
  if (!report.ok()) {
    std::string msg = "invalid problem:";
    for (const auto& v : report.violations) msg += "\n  " + v;
    throw ocsr::ProblemError(msg);
  }
  return spec;
}

ocsr::ZeroTest zero_test(const RunConfig& cfg) { return {cfg.trials, cfg.tol}; }

int cmd_derive(const RunConfig& cfg, const std::filesystem::path& dir) {
  auto spec = load_valid(cfg);
  auto sys = ocsr::build(spec, cfg.seed);
  ocsr::Sampler sampler(cfg.seed);
  auto adj = ocsr::adjoint_equations(sys, sampler, zero_test(cfg));
  auto cert = ocsr::regularity(sys, cfg.seed);
  write(dir, "hamiltonian.txt", ocsr::hamiltonian_report(sys));
  write(dir, "stationarity.txt", ocsr::stationarity_report(sys));
  write(dir, "adjoint.txt", ocsr::adjoint_report(sys, adj));
  write(dir, "regularity.txt", ocsr::regularity_report(cert));
  return kOk;
}

ocsr::ChainResult chain_of(const RunConfig& cfg, const ocsr::ProblemSpec& spec) {
  auto sys = ocsr::build(spec, cfg.seed);
  ocsr::ChainOptions opts;
  opts.max_gen = cfg.max_gen;
  opts.seed = cfg.seed;
  opts.zero = zero_test(cfg);
  return ocsr::run_chain(sys, opts);
}

int cmd_chain(const RunConfig& cfg, const std::filesystem::path& dir) {
  auto spec = load_valid(cfg);
  auto result = chain_of(cfg, spec);
  std::string text = ocsr::chain_text(result.chain);
  if (result.field) text += "\n" + ocsr::final_field_report(result.chain, *result.field);
  write(dir, "chain.txt", text);
  write(dir, "chain.json", ocsr::chain_json(result.chain));
  if (result.chain.status != ocsr::ChainStatus::determined)
    std::cerr << "warning: chain status " << ocsr::to_string(result.chain.status)
              << (result.chain.message.empty() ? "" : ": " + result.chain.message) << "\n";
  return kOk;
}

ocsr::DeterminedField field_of(const RunConfig& cfg, const ocsr::ProblemSpec& spec) {
  auto result = chain_of(cfg, spec);
  const auto status = result.chain.status;
  const bool usable = status == ocsr::ChainStatus::determined ||
                      (status == ocsr::ChainStatus::underdetermined && cfg.zero_free_rates);
  if (!usable || !result.field)
    throw ocsr::DerivationError("chain status is " + std::string(ocsr::to_string(status)) +
                                "; integration needs a determined field");
  return *result.field;
}

ocsr::IntegrateOptions integrate_options(const RunConfig& cfg) {
  ocsr::IntegrateOptions o;
  o.zero_free_rates = cfg.zero_free_rates;
  return o;
}

int cmd_integrate(const RunConfig& cfg, const std::filesystem::path& dir) {
  auto spec = load_valid(cfg);
  const auto& boundary = ocsr::boundary_of(spec);
  if (!boundary) throw InputError("integrate needs a boundary block with q0");
  const std::optional<double> T = cfg.T ? cfg.T : boundary->T;
  if (!T) throw InputError("integrate needs T (boundary.T or --T)");
  auto field = field_of(cfg, spec);
  ocsr::Integrator integ(field, integrate_options(cfg));
  std::map<std::string, double> start = boundary->seed;
  for (const auto& [q, v] : boundary->q0) start[q] = v;
  auto traj = integ.flow(boundary->t0, integ.point(start), *T, cfg.h);
  write(dir, "trajectory.csv", ocsr::trajectory_csv(traj));
  write(dir, "diagnostics.txt", ocsr::diagnostics_report(ocsr::diagnostics(traj), ocsr::evaluate_cost(spec, traj)));
  return kOk;
}

int cmd_shoot(const RunConfig& cfg, const std::filesystem::path& dir) {
  auto spec = load_valid(cfg);
  const auto& boundary = ocsr::boundary_of(spec);
  if (!boundary || boundary->qT.empty()) throw InputError("shoot needs a boundary block with q0, qT and T");
  ocsr::Boundary b = *boundary;
  if (cfg.T) b.T = cfg.T;
  if (!b.T) throw InputError("shoot needs T (boundary.T or --T)");
  auto field = field_of(cfg, spec);
  ocsr::Integrator integ(field, integrate_options(cfg));
  std::cerr << "shooting unknowns:";
  for (const auto& name : integ.shooting_unknowns(b)) std::cerr << ' ' << name;
  std::cerr << '\n';
  auto res = integ.shoot(b, cfg.h);
  write(dir, "trajectory.csv", ocsr::trajectory_csv(res.extremal));
  write(dir, "diagnostics.txt",
        ocsr::diagnostics_report(ocsr::diagnostics(res.extremal), ocsr::evaluate_cost(spec, res.extremal), &res));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ocsr: weak-Pontryagin extremal derivation and integration"};
  app.set_help_flag("--help", "print this help and exit");
  RunConfig cfg;
  double T = 0.0;
  app.add_option("command", cfg.command, "derive | chain | integrate | shoot")
      ->required()
      ->check(CLI::IsMember({"derive", "chain", "integrate", "shoot"}));
  app.add_option("--input", cfg.input, "problem file (JSON)")->required();
  app.add_option("--out", cfg.out, "output directory")->required();
  app.add_option("--seed", cfg.seed, "sampling seed");
  app.add_option("--h", cfg.h, "integration step")->check(CLI::PositiveNumber);
  auto* t_opt = app.add_option("--T", T, "final time")->check(CLI::PositiveNumber);
  app.add_option("--max-gen", cfg.max_gen, "generation limit (default twice the dimension)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--trials", cfg.trials, "zero-test sample count")->check(CLI::PositiveNumber);
  app.add_option("--tol", cfg.tol, "zero-test tolerance")->check(CLI::PositiveNumber);
  app.add_flag("--zero-free-rates", cfg.zero_free_rates, "integrate undetermined rates as zero");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }
  if (*t_opt) cfg.T = T;

  try {
    std::filesystem::path dir(cfg.out);
    std::filesystem::create_directories(dir);
    if (cfg.command == "derive") return cmd_derive(cfg, dir);
    if (cfg.command == "chain") return cmd_chain(cfg, dir);
    if (cfg.command == "integrate") return cmd_integrate(cfg, dir);
    return cmd_shoot(cfg, dir);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const ocsr::ProblemError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const ocsr::SyntaxError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const ocsr::UnknownIdentifierError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const ocsr::DerivationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDerivation;
  } catch (const ocsr::UndecidableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDerivation;
  } catch (const ocsr::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const ocsr::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDerivation;
  }
}
