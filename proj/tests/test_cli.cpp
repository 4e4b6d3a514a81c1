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

#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kCli = OCSR_CLI_PATH;
const std::string kProblems = OCSR_PROBLEMS_DIR;

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("ocsr_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = "'" + kCli + "' " + args + " >'" + (log / "stdout").string() + "' 2>'" +
                          (log / "stderr").string() + "'";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string cmd(const std::string& command, const std::string& input, const fs::path& out,
                const std::string& extra = "") {
  return command + " --input '" + input + "' --out '" + out.string() + "' " + extra;
}

}  // namespace

TEST_CASE("cli derive writes the four reports") {
  fs::path out = scratch("derive_lq");
  CHECK(run(cmd("derive", kProblems + "/lq.json", out), out) == 0);
  CHECK(slurp(out / "hamiltonian.txt").find("p + p_q1*u - 0.5*(q1^2 + u^2)") != std::string::npos);
  CHECK(slurp(out / "stationarity.txt").find("p_q1 - u") != std::string::npos);
  CHECK(fs::exists(out / "adjoint.txt"));
  CHECK(slurp(out / "regularity.txt").rfind("regular", 0) == 0);

  fs::path m = scratch("derive_descriptor");
  CHECK(run(cmd("derive", kProblems + "/descriptor.json", m), m) == 0);
  CHECK(slurp(m / "regularity.txt").rfind("regular\n", 0) == 0);
}

TEST_CASE("cli chain on the descriptor benchmark") {
  fs::path out = scratch("chain_descriptor");
  CHECK(run(cmd("chain", kProblems + "/descriptor.json", out), out) == 0);
  const std::string text = slurp(out / "chain.txt");
  CHECK(text.find("GENERATION 3:") != std::string::npos);
  CHECK(text.find("GENERATION 4:") == std::string::npos);
  CHECK(text.find("C_q1 = ") != std::string::npos);
  CHECK(text.find("STATUS: determined") != std::string::npos);
  auto doc = nlohmann::json::parse(slurp(out / "chain.json"));
  CHECK(doc.at("status") == "determined");
  CHECK(doc.at("generations").size() == 4);
}

TEST_CASE("cli chain on LQ has no tangency generation") {
  fs::path out = scratch("chain_lq");
  CHECK(run(cmd("chain", kProblems + "/lq.json", out), out) == 0);
  const std::string text = slurp(out / "chain.txt");
  CHECK(text.find("GENERATION 1:") == std::string::npos);
  CHECK(text.find("B_u = q1") != std::string::npos);
}

TEST_CASE("cli exhausted chain is a warning") {
  fs::path out = scratch("chain_exhausted");
  CHECK(run(cmd("chain", kProblems + "/descriptor.json", out, "--max-gen 1"), out) == 0);
  CHECK(slurp(out / "chain.txt").find("STATUS: exhausted") != std::string::npos);
  CHECK(slurp(out / "stderr").find("warning") != std::string::npos);
  CHECK(run(cmd("integrate", kProblems + "/descriptor.json", out, "--max-gen 1"), out) == 3);
}

TEST_CASE("cli input errors exit with 2") {
  fs::path out = scratch("input_errors");
  put(out / "broken.json", "{\"kind\": \"explicit\", ");
  CHECK(run(cmd("derive", (out / "broken.json").string(), out), out) == 2);
  CHECK(!slurp(out / "stderr").empty());
  CHECK(run(cmd("derive", (out / "missing.json").string(), out), out) == 2);
  CHECK(run(cmd("bogus", kProblems + "/lq.json", out), out) == 2);
  CHECK(run("derive --out '" + out.string() + "'", out) == 2);
  put(out / "nobnd.json",
      R"J({"kind":"explicit","states":["q1"],"controls":["u"],"dynamics":{"q1":"u"},"cost":"0.5*(q1^2 + u^2)"})J");
  CHECK(run(cmd("shoot", (out / "nobnd.json").string(), out), out) == 2);
  put(out / "dup.json",
      R"J({"kind":"explicit","states":["q","q"],"controls":["u"],"dynamics":["u","u"],"cost":"u^2"})J");
  CHECK(run(cmd("derive", (out / "dup.json").string(), out), out) == 2);
  CHECK(slurp(out / "stderr").find("name collision") != std::string::npos);
}

TEST_CASE("cli derivation errors exit with 3") {
  fs::path out = scratch("derivation_errors");
  put(out / "inc.json", R"J({"kind":"explicit","states":["q"],"controls":["u"],"dynamics":{"q":"u"},"cost":"q",
                             "boundary":{"T":1,"q0":{"q":0}}})J");
  CHECK(run(cmd("chain", (out / "inc.json").string(), out), out) == 0);
  CHECK(slurp(out / "chain.txt").find("STATUS: inconsistent") != std::string::npos);
  CHECK(run(cmd("integrate", (out / "inc.json").string(), out), out) == 3);
}

TEST_CASE("cli numerical failures exit with 4") {
  fs::path out = scratch("numerical_errors");
  put(out / "blowup.json",
      R"J({"kind":"explicit","states":["q"],"controls":["u"],"dynamics":{"q":"q^2 + u"},"cost":"0.5*u^2",
          "boundary":{"T":2,"q0":{"q":1}}})J");
  CHECK(run(cmd("integrate", (out / "blowup.json").string(), out, "--h 0.01"), out) == 4);
}

TEST_CASE("cli shoot reports the optimal LQ cost") {
  fs::path out = scratch("shoot_lq");
  CHECK(run(cmd("shoot", kProblems + "/lq.json", out), out) == 0);
  const std::string diag = slurp(out / "diagnostics.txt");
  auto at = diag.find("cost: ");
  REQUIRE(at != std::string::npos);
  const double cost = std::stod(diag.substr(at + 6));
  CHECK(std::abs(cost - 0.5 / std::tanh(1.0)) < 1e-6);
  const std::string csv = slurp(out / "trajectory.csv");
  CHECK(csv.rfind("t,q1,u,p,p_q1,H_residual,constraint_residual\n", 0) == 0);
  CHECK(slurp(out / "stderr").find("shooting unknowns: p_q1") != std::string::npos);
}

TEST_CASE("cli integrate on the descriptor benchmark") {
  fs::path out = scratch("integrate_descriptor");
  CHECK(run(cmd("integrate", kProblems + "/descriptor.json", out, "--T 1 --h 0.01"), out) == 0);
  const std::string csv = slurp(out / "trajectory.csv");
  CHECK(csv.rfind("t,q1,q2,q3,v_q1,v_q2,v_q3,u,p,p_q1,p_q2,p_q3,H_residual,constraint_residual\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 102);
}

TEST_CASE("cli outputs are byte-identical across runs") {
  for (const char* command : {"derive", "chain", "shoot"}) {
    fs::path a = scratch(std::string("det_a_") + command);
    fs::path b = scratch(std::string("det_b_") + command);
    const std::string input = kProblems + (std::string(command) == "shoot" ? "/lq.json" : "/descriptor.json");
    REQUIRE(run(cmd(command, input, a, "--seed 42"), a) == 0);
    REQUIRE(run(cmd(command, input, b, "--seed 42"), b) == 0);
    for (const auto& entry : fs::directory_iterator(a)) {
      const auto name = entry.path().filename();
      if (name == "stdout" || name == "stderr") continue;
      CHECK_MESSAGE(slurp(entry.path()) == slurp(b / name), name.string());
    }
  }
}
