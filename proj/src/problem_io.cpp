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

#include "ocsr/problem_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ocsr/errors.hpp"

namespace ocsr {

namespace {

using Json = nlohmann::ordered_json;

const Json& field(const Json& doc, const char* key) {
  if (!doc.contains(key)) throw ProblemError(std::string("missing field '") + key + "'");
  return doc.at(key);
}

std::string string_of(const Json& j, const std::string& what) {
  if (!j.is_string()) throw ProblemError(what + " must be a string");
  return j.get<std::string>();
}

double number_of(const Json& j, const std::string& what) {
  if (!j.is_number()) throw ProblemError(what + " must be a number");
  return j.get<double>();
}

std::vector<std::string> names_of(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ProblemError(what + " must be an array of names");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(string_of(e, what + " entry"));
  return out;
}

// Expressions keyed by state, or listed in state order.
std::vector<std::string> per_state(const Json& j, const std::vector<std::string>& states, const std::string& what) {
  std::vector<std::string> out;
  if (j.is_array()) {
    for (const auto& e : j) out.push_back(string_of(e, what + " entry"));
    return out;
  }
  if (!j.is_object()) throw ProblemError(what + " must map states to expressions");
  for (const auto& [key, value] : j.items())
    if (std::find(states.begin(), states.end(), key) == states.end())
      throw ProblemError(what + " names '" + key + "', which is not a state");
  for (const auto& q : states) {
    if (!j.contains(q)) throw ProblemError(what + " has no entry for state '" + q + "'");
    out.push_back(string_of(j.at(q), what + " of '" + q + "'"));
  }
  return out;
}

std::vector<Parameter> params_of(const Json& doc) {
  std::vector<Parameter> out;
  if (!doc.contains("params")) return out;
  const Json& ps = doc.at("params");
  if (!ps.is_object()) throw ProblemError("params must be an object");
  for (const auto& [name, spec] : ps.items()) {
    Parameter p;
    p.name = name;
    if (spec.is_number()) {
      p.value = spec.get<double>();
      out.push_back(p);
      continue;
    }
    if (!spec.is_object()) throw ProblemError("parameter '" + name + "' must be an object");
    if (spec.contains("value") && !spec.at("value").is_null()) p.value = number_of(spec.at("value"), "value of " + name);
    if (spec.contains("range")) {
      const Json& r = spec.at("range");
      if (!r.is_array() || r.size() != 2) throw ProblemError("range of '" + name + "' must be [lo, hi]");
      p.lo = number_of(r[0], "range of " + name);
      p.hi = number_of(r[1], "range of " + name);
      if (!(p.lo <= p.hi)) throw ProblemError("range of '" + name + "' is empty");
    }
    if (spec.contains("nonzero")) {
      if (!spec.at("nonzero").is_boolean()) throw ProblemError("nonzero of '" + name + "' must be a boolean");
      p.nonzero = spec.at("nonzero").get<bool>();
    }
    out.push_back(p);
  }
  return out;
}

std::map<std::string, double> values_of(const Json& j, const std::string& what) {
  if (!j.is_object()) throw ProblemError(what + " must be an object");
  std::map<std::string, double> out;
  for (const auto& [k, v] : j.items()) out[k] = number_of(v, what + "." + k);
  return out;
}

std::optional<Boundary> boundary_of_json(const Json& doc) {
  if (!doc.contains("boundary") || doc.at("boundary").is_null()) return std::nullopt;
  const Json& b = doc.at("boundary");
  if (!b.is_object()) throw ProblemError("boundary must be an object");
  Boundary out;
  if (b.contains("t0")) out.t0 = number_of(b.at("t0"), "boundary.t0");
  if (b.contains("T")) {
    out.T = number_of(b.at("T"), "boundary.T");
    if (!(*out.T > 0.0)) throw ProblemError("boundary.T must be positive");
  }
  if (b.contains("q0")) out.q0 = values_of(b.at("q0"), "boundary.q0");
  if (b.contains("qT")) out.qT = values_of(b.at("qT"), "boundary.qT");
  if (b.contains("seed")) out.seed = values_of(b.at("seed"), "boundary.seed");
  return out;
}

}  // namespace

ProblemSpec parse_problem(std::string_view json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw ProblemError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ProblemError("problem document must be a JSON object");
  const std::string kind = string_of(field(doc, "kind"), "kind");
  const auto states = names_of(field(doc, "states"), "states");
  const auto controls = names_of(field(doc, "controls"), "controls");
  const std::string cost = string_of(field(doc, "cost"), "cost");
  const auto params = params_of(doc);
  auto boundary = boundary_of_json(doc);

  if (kind == "explicit") {
    return make_explicit(states, controls, per_state(field(doc, "dynamics"), states, "dynamics"), cost, params,
                         boundary);
  }
  if (kind == "implicit") {
    return make_implicit(states, controls, names_of(field(doc, "constraints"), "constraints"), cost, params,
                         boundary);
  }
  if (kind == "controlled_lagrangian") {
    return make_lagrangian(states, controls, string_of(field(doc, "lagrangian"), "lagrangian"),
                           per_state(field(doc, "forces"), states, "forces"), cost, params, boundary);
  }
  throw ProblemError("unknown kind '" + kind + "'");
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProblemError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

}  // namespace ocsr
