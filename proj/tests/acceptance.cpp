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

// Acceptance checks, one pass/fail line per criterion. Exit status is the
// number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ocsr/constraint_engine.hpp"
#include "ocsr/errors.hpp"
#include "ocsr/integrate.hpp"
#include "ocsr/problem.hpp"
#include "ocsr/problem_io.hpp"
#include "ocsr/report.hpp"
#include "support.hpp"

using namespace ocsr;
using ocsr::testing::Coefficients;
using ocsr::testing::descriptor_problem;

namespace {

// Tolerances.
constexpr double kChainRuntime = 5.0;         // seconds, all five draws together
constexpr double kFormulaTol = 1e-9;          // relative, solved vs displayed formulas
constexpr double kFeedbackTol = 1e-4;         // max-norm feedback-law residual
constexpr double kOracleTol = 1e-6;           // trajectory and cost vs closed forms
constexpr double kTranscriptionTol = 1e-3;    // shooting vs direct transcription
constexpr double kConstraintTol = 1e-6;       // max constraint residual along trajectories
constexpr double kHamiltonianRate = 1e-7;     // |H| <= rate * (1 + T)
constexpr double kDiffTol = 1e-6;             // relative, derivative vs central difference
constexpr double kOrderLo = 12.0, kOrderHi = 20.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome guarded(const std::function<Outcome()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

DeterminedField field_of(const ProblemSpec& spec) {
  ChainResult res = run_chain(build(spec));
  if (!res.field || res.chain.status != ChainStatus::determined)
    throw DerivationError("chain status " + std::string(to_string(res.chain.status)));
  return *res.field;
}

double max_abs_diff(const std::vector<double>& a, const std::function<double(std::size_t)>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b(k)));
  return m;
}

// ---------------------------------------------------------------- criterion 1

/// A point on the final descriptor manifold built from the free values
/// (q1, q2, v_q1, u) and the closed-form constraint solutions.
Assignment descriptor_point(const Coefficients& c, double q1, double q2, double v1, double u) {
  Assignment x(c.begin(), c.end());
  const double q3 = -c.at("b3") * u;
  const double v2 = q1 + c.at("b1") * u;
  const double v3 = q2 + c.at("b2") * u;
  const double p1 = 0.0, p2 = c.at("a1") * q1, p3 = c.at("a2") * q2 - c.at("a1") * v1;
  const double cost = 0.5 * (c.at("a1") * q1 * q1 + c.at("a2") * q2 * q2 + c.at("a3") * q3 * q3 + c.at("r") * u * u);
  x.insert({{"t", 0.0},   {"q1", q1},  {"q2", q2},  {"q3", q3},  {"v_q1", v1}, {"v_q2", v2}, {"v_q3", v3},
            {"u", u},     {"p_q1", p1}, {"p_q2", p2}, {"p_q3", p3}, {"p", cost - (p1 * v1 + p2 * v2 + p3 * v3)}});
  return x;
}

Outcome criterion1() {
  std::mt19937_64 rng(51);
  std::vector<Coefficients> draws{ocsr::testing::unit_coefficients()};
  for (int k = 0; k < 4; ++k) draws.push_back(ocsr::testing::random_coefficients(rng));
  const std::vector<std::string> ladder{"p_q1", "a1*q1 - p_q2", "a1*v_q1 - a2*q2 + p_q3"};

  const auto start = std::chrono::steady_clock::now();
  std::vector<ChainResult> results;
  for (const auto& c : draws) results.push_back(run_chain(build_implicit(descriptor_problem(c))));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  double worst = 0.0;
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (std::size_t d = 0; d < draws.size(); ++d) {
    const ConstraintChain& ch = results[d].chain;
    if (ch.status != ChainStatus::determined) return {false, "draw " + std::to_string(d) + " not determined"};
    if (ch.generations.size() != 4) return {false, "draw " + std::to_string(d) + " has " +
                                                       std::to_string(ch.generations.size() - 1) +
                                                       " tangency generations"};
    const VarTable& table = results[d].field->table;
    Sampler s(d + 1);
    for (std::size_t k = 1; k <= 3; ++k) {
      const auto& gen = ch.generations[k];
      if (gen.size() != 1 || gen[0].origin != Origin::tangency)
        return {false, "generation " + std::to_string(k) + " is not a single tangency constraint"};
      auto factor = proportional(gen[0].expr, parse(ladder[k - 1], table), table, s);
      if (!factor || *factor == 0.0)
        return {false, "generation " + std::to_string(k) + " not proportional: " + to_string(gen[0].expr)};
    }
    const Coefficients& c = draws[d];
    const double a1 = c.at("a1"), a2 = c.at("a2"), a3 = c.at("a3"), b1 = c.at("b1"), b2 = c.at("b2"),
                 b3 = c.at("b3"), r = c.at("r");
    for (int i = 0; i < 10; ++i) {
      const double q1 = U(rng), q2 = U(rng), v1 = U(rng), u = U(rng);
      Assignment x = descriptor_point(c, q1, q2, v1, u);
      const double lambda3 = (r * u - b1 * x["p_q2"] - b2 * x["p_q3"]) / b3;
      const double rate_u = -(q2 + b2 * u) / b3;
      const double rate_v1 =
          ((a2 * b3 - a1 * b1) * q1 - b2 * a2 * q2 + (a2 * b1 * b3 + a3 * b3 * b3 + r) * u + b2 * a1 * v1) / (a1 * b3);
      for (auto [name, want] : {std::pair{"lambda_3", lambda3}, {"B_u", rate_u}, {"C_q1", rate_v1}}) {
        const double got = eval(ch.solved.at(name), x);
        worst = std::max(worst, std::abs(got - want) / (1.0 + std::abs(want)));
      }
    }
  }
  const bool pass = worst < kFormulaTol && seconds < kChainRuntime;
  return {pass, "5 draws, 3 tangency generations each, formula error " + fmt("%.2e", worst) + ", runtime " +
                    fmt("%.3f", seconds) + " s"};
}

// ---------------------------------------------------------------- criterion 2

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<double> column(const std::string& name) const {
    std::size_t j = std::find(header.begin(), header.end(), name) - header.begin();
    if (j == header.size()) throw Error("csv has no column " + name);
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r[j]);
    return out;
  }
};

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::istringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) csv.header.push_back(cell);
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    for (std::string cell; std::getline(ls, cell, ',');) row.push_back(std::stod(cell));
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

/// Real part of an eigenvector of the linearized descriptor flow with a
/// decaying eigenvalue, in the coordinates (q1, q2, q3, v_q1).
std::map<std::string, double> stable_start(const Integrator& in) {
  const std::vector<std::string> names{"q1", "q2", "q3", "v_q1"};
  auto reduced_rate = [&](const Eigen::Vector4d& z) {
    std::map<std::string, double> v;
    for (int i = 0; i < 4; ++i) v[names[i]] = z(i);
    auto x = in.project(0.0, in.point(v));
    std::vector<double> rates(x.size());
    in.evaluator().rates(0.0, x, rates);
    Eigen::Vector4d out;
    for (int i = 0; i < 4; ++i) out(i) = rates[*in.evaluator().index_of(names[i])];
    return out;
  };
  Eigen::Matrix4d jac;
  const double h = 1e-6;
  for (int j = 0; j < 4; ++j) {
    Eigen::Vector4d e = Eigen::Vector4d::Zero();
    e(j) = h;
    jac.col(j) = (reduced_rate(e) - reduced_rate(-e)) / (2 * h);
  }
  Eigen::EigenSolver<Eigen::Matrix4d> es(jac);
  for (int k = 0; k < 4; ++k) {
    if (es.eigenvalues()(k).real() >= -1e-6) continue;
    Eigen::Vector4d v = es.eigenvectors().col(k).real();
    if (v.norm() < 1e-8) v = es.eigenvectors().col(k).imag();
    v /= v.cwiseAbs().maxCoeff();
    std::map<std::string, double> start;
    for (int i = 0; i < 4; ++i) start[names[i]] = v(i);
    return start;
  }
  throw NumericalError("linearized flow has no decaying direction");
}

Outcome feedback_check(const Coefficients& c, Extremal* keep) {
  Integrator in(field_of(descriptor_problem(c)));
  const double T = 10.0, h = 1e-3;
  Extremal traj = in.flow(0.0, in.point(stable_start(in)), T, h);
  Csv csv = parse_csv(trajectory_csv(traj));
  auto q1 = csv.column("q1"), q2 = csv.column("q2"), u = csv.column("u"), t = csv.column("t");
  const double a1 = c.at("a1"), a2 = c.at("a2"), a3 = c.at("a3"), b1 = c.at("b1"), b2 = c.at("b2"),
               b3 = c.at("b3"), r = c.at("r");
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < q1.size(); ++k) {
    const double dt = t[k + 1] - t[k];
    const double dq1 = (q1[k + 1] - q1[k - 1]) / (2 * dt);
    const double ddq1 = (q1[k + 1] - 2 * q1[k] + q1[k - 1]) / (dt * dt);
    const double residual = u[k] * (a2 * b1 * b3 + a3 * b3 * b3 + r) -
                            ((a1 * b1 - a2 * b3) * q1[k] + a2 * b2 * q2[k] - a1 * b2 * dq1 + a1 * b3 * ddq1);
    worst = std::max(worst, std::abs(residual));
  }
  if (keep) *keep = std::move(traj);
  return {worst < kFeedbackTol, fmt("%.2e", worst)};
}

Outcome criterion2(Extremal& traj) {
  std::mt19937_64 rng(77);
  Outcome unit = feedback_check(ocsr::testing::unit_coefficients(), &traj);
  Outcome drawn = feedback_check(ocsr::testing::random_coefficients(rng), nullptr);
  return {unit.pass && drawn.pass,
          "10 s at h = 1e-3, feedback residual " + unit.detail + " (unit), " + drawn.detail + " (random draw)"};
}

// ---------------------------------------------------------------- criterion 3

/// Midpoint-rule transcription of min sum h/2 (q_mid^2 + u^2), q' = u,
/// q(0) = 1, q(1) = 0, solved by conjugate gradients on the interior nodes.
std::pair<std::vector<double>, double> transcription(int N) {
  const double h = 1.0 / N;
  auto cost_grad = [&](const Eigen::VectorXd& inner, Eigen::VectorXd* grad) {
    Eigen::VectorXd q(N + 1);
    q(0) = 1.0;
    q(N) = 0.0;
    q.segment(1, N - 1) = inner;
    double J = 0.0;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(N + 1);
    for (int k = 0; k < N; ++k) {
      const double mid = 0.5 * (q(k) + q(k + 1));
      const double u = (q(k + 1) - q(k)) / h;
      J += 0.5 * h * (mid * mid + u * u);
      g(k) += 0.5 * h * mid - u;
      g(k + 1) += 0.5 * h * mid + u;
    }
    if (grad) *grad = g.segment(1, N - 1);
    return J;
  };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(N - 1), g0, r, gx;
  cost_grad(Eigen::VectorXd::Zero(N - 1), &g0);
  auto apply_hessian = [&](const Eigen::VectorXd& d) {
    Eigen::VectorXd gd;
    cost_grad(d, &gd);
    return Eigen::VectorXd(gd - g0);
  };
  cost_grad(x, &gx);
  r = -gx;
  Eigen::VectorXd d = r;
  for (int it = 0; it < 10 * N && r.norm() > 1e-14; ++it) {
    Eigen::VectorXd Ad = apply_hessian(d);
    const double alpha = r.squaredNorm() / d.dot(Ad);
    x += alpha * d;
    Eigen::VectorXd rn = r - alpha * Ad;
    d = rn + (rn.squaredNorm() / r.squaredNorm()) * d;
    r = rn;
  }
  std::vector<double> q(N + 1);
  q[0] = 1.0;
  q[N] = 0.0;
  for (int k = 1; k < N; ++k) q[k] = x(k - 1);
  return {q, cost_grad(x, nullptr)};
}

Outcome criterion3(Extremal& traj) {
  ProblemSpec spec = load_problem(OCSR_PROBLEMS_DIR "/lq.json");
  Integrator in(field_of(spec));
  ShootResult res = in.shoot(*boundary_of(spec), 1e-3);
  traj = res.extremal;
  auto q = traj.series("q1");
  const double err = max_abs_diff(q, [&](std::size_t k) { return std::sinh(1.0 - traj.times[k]) / std::sinh(1.0); });
  const double cost = evaluate_cost(spec, traj);
  const double cost_err = std::abs(cost - 0.5 / std::tanh(1.0));
  auto [qd, Jd] = transcription(200);
  double direct_err = 0.0;
  for (std::size_t k = 0; k < qd.size(); ++k) direct_err = std::max(direct_err, std::abs(qd[k] - q[5 * k]));
  direct_err = std::max(direct_err, std::abs(Jd - cost));
  const bool pass = err < kOracleTol && cost_err < kOracleTol && direct_err < kTranscriptionTol;
  return {pass, "trajectory error " + fmt("%.2e", err) + ", cost error " + fmt("%.2e", cost_err) +
                    ", direct transcription gap " + fmt("%.2e", direct_err)};
}

// ---------------------------------------------------------------- criterion 4

Outcome criterion4(Extremal& traj) {
  ProblemSpec spec = load_problem(OCSR_PROBLEMS_DIR "/min_accel.json");
  Integrator in(field_of(spec));
  traj = in.shoot(*boundary_of(spec), 1e-3).extremal;
  const double err = max_abs_diff(traj.series("q"), [&](std::size_t k) {
    const double t = traj.times[k];
    return 3 * t * t - 2 * t * t * t;
  });
  return {err < kOracleTol, "cubic error " + fmt("%.2e", err)};
}

// ---------------------------------------------------------------- criterion 5

Outcome criterion5() {
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> R(0.5, 2.0);
  int agreed = 0, compared = 0;
  std::string first_failure;
  for (int k = 0; k < 10; ++k) {
    ocsr::testing::ExprGen gen({"q1", "q2"}, 1000 + k);
    const std::string f1 = to_string(gen(2)), f2 = to_string(gen(2));
    const std::string g1 = to_string(gen(2)), g2 = to_string(gen(2));
    const std::string running = to_string(gen(2));
    const std::string weight = fmt("%.6g", R(rng));
    ExplicitProblem p =
        make_explicit({"q1", "q2"}, {"u"}, {"(" + f1 + ") + (" + g1 + ")*u", "(" + f2 + ") + (" + g2 + ")*u"},
                      "0.5*" + weight + "*u^2 + (" + running + ")^2");
    ChainResult ex = run_chain(build_explicit(p));
    ChainResult im = run_chain(build_implicit(lower_explicit(p)));
    if (!ex.field || !im.field) {
      if (first_failure.empty()) first_failure = "problem " + std::to_string(k) + " not determined";
      continue;
    }
    for (const char* x : {"q1", "q2", "u", "p_q1", "p_q2"}) {
      ++compared;
      Expr gap = im.field->reduction.apply(ex.field->rate(x)) - im.field->rate(x);
      Sampler s(k);
      if (is_zero(im.field->reduction.apply(gap), im.field->table, s)) {
        ++agreed;
      } else if (first_failure.empty()) {
        first_failure = "problem " + std::to_string(k) + " coordinate " + x;
      }
    }
  }
  const bool pass = compared == 50 && agreed == 50;
  return {pass, std::to_string(agreed) + "/50 rates agree" + (first_failure.empty() ? "" : "; " + first_failure)};
}

// ---------------------------------------------------------------- criterion 6

Outcome criterion6(const std::vector<std::pair<std::string, const Extremal*>>& runs) {
  std::string detail;
  bool pass = true;
  for (const auto& [label, traj] : runs) {
    if (traj->times.empty()) {
      pass = false;
      detail += label + ": no trajectory; ";
      continue;
    }
    DiagnosticsSummary d = diagnostics(*traj);
    const double T = traj->times.back() - traj->times.front();
    const bool ok = d.max_hamiltonian <= kHamiltonianRate * (1.0 + T) && d.max_constraint < kConstraintTol;
    pass = pass && ok;
    detail += label + " |H| " + fmt("%.1e", d.max_hamiltonian) + " c " + fmt("%.1e", d.max_constraint) + "; ";
  }
  return {pass, detail.substr(0, detail.size() - 2)};
}

// ---------------------------------------------------------------- criterion 7

Outcome criterion7() {
  const std::vector<std::string> vars{"x", "y", "z"};
  ocsr::testing::ExprGen gen(vars, 707);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  int fd_pairs = 0, fd_bad = 0;
  double worst = 0.0;
  while (fd_pairs < 500) {
    Expr e = gen(4);
    const std::string& x = vars[static_cast<std::size_t>(fd_pairs / 20) % vars.size()];
    Expr d = diff(e, x);
    for (int i = 0; i < 20; ++i) {
      Assignment pt{{"x", U(gen.rng())}, {"y", U(gen.rng())}, {"z", U(gen.rng())}};
      const double exact = eval(d, pt);
      const double fd = ocsr::testing::central_difference(e, x, pt);
      const double rel = std::abs(exact - fd) / (1.0 + std::abs(exact));
      worst = std::max(worst, rel);
      if (rel >= kDiffTol) ++fd_bad;
      ++fd_pairs;
    }
  }
  VarTable t;
  t.add({"t", VarKind::time});
  for (const char* n : {"x", "y", "vx", "vy", "wx", "wy"}) t.add({n, VarKind::state});
  t.set_prolongation("x", "vx");
  t.set_prolongation("y", "vy");
  t.set_prolongation("vx", "wx");
  t.set_prolongation("vy", "wy");
  ocsr::testing::ExprGen jet({"t", "x", "y", "vx", "vy"}, 808);
  Sampler s(8);
  int leibniz_bad = 0;
  for (int k = 0; k < 100; ++k) {
    Expr a = jet(3), b = jet(3);
    Expr gap = total_derivative(a * b, t) - (total_derivative(a, t) * b + a * total_derivative(b, t));
    if (!is_zero(gap, t, s)) ++leibniz_bad;
  }
  return {fd_bad == 0 && leibniz_bad == 0, "500 derivative pairs (worst relative error " + fmt("%.1e", worst) +
                                               ", " + std::to_string(fd_bad) + " failures), 100 Leibniz pairs (" +
                                               std::to_string(leibniz_bad) + " failures)"};
}

// ---------------------------------------------------------------- criterion 8

Outcome criterion8() {
  Integrator in(field_of(load_problem(OCSR_PROBLEMS_DIR "/lq.json")));
  auto endpoint_error = [&](double h) {
    Extremal traj = in.flow(0.0, in.point({{"q1", 1.0}, {"p_q1", -1.0 / std::tanh(1.0)}}), 1.0, h);
    return std::abs(traj.series("q1").back());
  };
  const double coarse = endpoint_error(0.1), fine = endpoint_error(0.05);
  const double ratio = coarse / fine;
  return {ratio >= kOrderLo && ratio <= kOrderHi, "endpoint errors " + fmt("%.3e", coarse) + " / " +
                                                      fmt("%.3e", fine) + ", ratio " + fmt("%.2f", ratio)};
}

}  // namespace

int main() {
  Extremal descriptor, lq, accel;
  std::vector<std::pair<std::string, Outcome>> lines;
  lines.emplace_back("descriptor golden chain", guarded(criterion1));
  lines.emplace_back("descriptor feedback law", guarded([&] { return criterion2(descriptor); }));
  lines.emplace_back("LQ shooting oracle", guarded([&] { return criterion3(lq); }));
  lines.emplace_back("minimal acceleration cubic", guarded([&] { return criterion4(accel); }));
  lines.emplace_back("explicit and lowered fields agree", guarded(criterion5));
  lines.emplace_back("Hamiltonian and constraint residuals", guarded([&] {
                       return criterion6({{"descriptor", &descriptor}, {"LQ", &lq}, {"accel", &accel}});
                     }));
  lines.emplace_back("derivative and Leibniz properties", guarded(criterion7));
  lines.emplace_back("RK4 order", guarded(criterion8));
  int failed = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& [label, out] = lines[i];
    if (!out.pass) ++failed;
    std::printf("criterion %zu %s: %s: %s\n", i + 1, out.pass ? "PASS" : "FAIL", label.c_str(), out.detail.c_str());
  }
  return failed;
}
