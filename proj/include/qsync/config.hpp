// Copyright 2026 The qsync Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Experiment configuration: a JSON document describing either a quantum
// network run (qubits, edges, Hamiltonian, initial state) or a standalone
// classical consensus system, plus integration settings, outputs and
// pass/fail thresholds. The grammar is documented in docs/config.md.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qsync/consensus.hpp"
#include "qsync/errors.hpp"
#include "qsync/hilbert.hpp"
#include "qsync/integrator.hpp"
#include "qsync/lindblad.hpp"

namespace qsync {

enum class RunMode { Full, Orbit, Classical, Compare };

inline std::string to_string(RunMode m) {
  switch (m) {
  case RunMode::Full:
    return "full";
  case RunMode::Orbit:
    return "orbit";
  case RunMode::Classical:
    return "classical";
  case RunMode::Compare:
    return "compare";
  }
  return "full";
}

struct ClassicalSpec {
  int nodes = 1;
  std::vector<VertexPair> edges; // 0-based
  std::vector<double> thetas;
  std::vector<Complex> x0;

  friend bool operator==(const ClassicalSpec &, const ClassicalSpec &) = default;
};

struct ExperimentConfig {
  std::string name;

  // Quantum network; unused in classical mode.
  int n = 0;
  std::vector<Edge> edges; // 0-based
  std::string hamiltonian_preset; // empty when lambdas were explicit
  std::vector<double> lambdas;
  double hbar = 1.0;
  std::string rho0_preset; // empty when the matrix was explicit
  CMatrix rho0;            // as given, before normalization
  bool normalize = false;
  bool all_orbits = false;

  std::optional<ClassicalSpec> classical;

  IntegrationOptions integration;
  RunMode mode = RunMode::Full;
  std::vector<std::string> outputs;
  std::map<std::string, double> thresholds;
  double fit_start = 2.0;
  double fit_end = 10.0;
  double tail_fraction = 0.25;

  bool quantum() const { return mode != RunMode::Classical; }

  InteractionGraph graph() const { return InteractionGraph::create(n, edges); }
  DiagonalHamiltonian hamiltonian() const {
    return DiagonalHamiltonian::create(n, lambdas, hbar);
  }
  /// Initial state, divided by its trace when `normalize` is set.
  DensityMatrix initial_state() const {
    DensityMatrix rho(n, rho0);
    return normalize ? normalized(rho) : rho;
  }
  ClassicalSystem classical_system() const {
    return ClassicalSystem::create(classical->nodes, classical->edges,
                                   classical->thetas);
  }
  CVector classical_initial() const {
    CVector x(static_cast<Eigen::Index>(classical->x0.size()));
    for (std::size_t i = 0; i < classical->x0.size(); ++i) {
      x(static_cast<Eigen::Index>(i)) = classical->x0[i];
    }
    return x;
  }
};

inline bool operator==(const ExperimentConfig &a, const ExperimentConfig &b) {
  return a.name == b.name && a.n == b.n && a.edges == b.edges &&
         a.hamiltonian_preset == b.hamiltonian_preset && a.lambdas == b.lambdas &&
         a.hbar == b.hbar && a.rho0_preset == b.rho0_preset &&
         a.rho0.rows() == b.rho0.rows() && a.rho0.cols() == b.rho0.cols() &&
         a.rho0 == b.rho0 && a.normalize == b.normalize &&
         a.all_orbits == b.all_orbits && a.classical == b.classical &&
         a.integration.step == b.integration.step &&
         a.integration.horizon == b.integration.horizon &&
         a.integration.stride == b.integration.stride && a.mode == b.mode &&
         a.outputs == b.outputs && a.thresholds == b.thresholds &&
         a.fit_start == b.fit_start && a.fit_end == b.fit_end &&
         a.tail_fraction == b.tail_fraction;
}

// ---------------------------------------------------------------------------
// Presets

/// Three qubits on the complete graph, H = sum_x 2^x |x><x|, and
///   rho_0 = (sum_x |x>)(sum_x <x|) / 128 + sum_x (x + 1) |x><x| / 72.
/// As written this matrix has trace 9/16, so the preset normalizes it.
inline CMatrix paper_example_rho0() {
  CMatrix m = CMatrix::Constant(8, 8, Complex(1.0 / 128.0, 0.0));
  for (int x = 0; x < 8; ++x) {
    m(x, x) += (x + 1) / 72.0;
  }
  return m;
}

inline const std::vector<std::string> &known_outputs() {
  static const std::vector<std::string> names = {
      "diagonals", "eo", "corner", "reduced_gap", "entries", "states", "max_sq_norm"};
  return names;
}

inline const std::vector<std::string> &known_thresholds() {
  static const std::vector<std::string> names = {
      "corner_deviation", "corner_modulus_drift", "noncorner_coherence",
      "diagonal_limit",   "diagonal_clusters",    "eo_slope",
      "eo_fit_residual",  "trace_drift",          "hermiticity",
      "min_eigenvalue",   "reduced_gap",          "compare_deviation",
      "monotonicity",     "limit_spread",         "decay",
      "rotating_average"};
  return names;
}

namespace detail {

using nlohmann::json;

inline std::vector<double> hamiltonian_preset(const std::string &name, int n,
                                              const std::string &field) {
  if (name == "powers_of_two") {
    return DiagonalHamiltonian::powers_of_two(n).lambdas();
  }
  if (name == "zero") {
    return std::vector<double>(dimension(n), 0.0);
  }
  const std::string prefix = "constant:";
  if (name.rfind(prefix, 0) == 0) {
    const std::string value = name.substr(prefix.size());
    std::size_t used = 0;
    double c = 0.0;
    try {
      c = std::stod(value, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != value.size() || !std::isfinite(c)) {
      throw ConfigError(field, "cannot parse constant value '" + value + "'");
    }
    return std::vector<double>(dimension(n), c);
  }
  throw ConfigError(field, "unknown hamiltonian preset '" + name +
                               "' (expected powers_of_two, zero or "
                               "constant:<value>)");
}

inline CMatrix rho0_preset(const std::string &name, int n,
                           const std::string &field) {
  const auto dim = static_cast<Eigen::Index>(dimension(n));
  if (name == "paper_example") {
    if (n != 3) {
      throw ConfigError(field, "preset paper_example is defined for n = 3 only");
    }
    return paper_example_rho0();
  }
  if (name == "maximally_mixed") {
    return CMatrix::Identity(dim, dim) / static_cast<double>(dim);
  }
  if (name == "uniform_coherent") {
    return CMatrix::Constant(dim, dim, Complex(1.0 / static_cast<double>(dim), 0.0));
  }
  throw ConfigError(field, "unknown rho0 preset '" + name +
                               "' (expected paper_example, maximally_mixed or "
                               "uniform_coherent)");
}

inline double number(const json &j, const std::string &field) {
  if (!j.is_number()) {
    throw ConfigError(field, "expected a number");
  }
  return j.get<double>();
}

inline double positive(const json &j, const std::string &field) {
  const double v = number(j, field);
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(field, "must be positive and finite, got " + j.dump());
  }
  return v;
}

inline int integer(const json &j, const std::string &field) {
  if (!j.is_number_integer()) {
    throw ConfigError(field, "expected an integer");
  }
  return j.get<int>();
}

/// A complex number written as [re, im] or as a plain real number.
inline Complex complex_value(const json &j, const std::string &field) {
  if (j.is_number()) {
    return {j.get<double>(), 0.0};
  }
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ConfigError(field, "expected [re, im] or a number");
}

inline json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

/// 1-based [[j, k], ...] pairs into 0-based vertex pairs.
inline std::vector<VertexPair> edge_list(const json &j, const std::string &field,
                                         int vertices) {
  if (!j.is_array()) {
    throw ConfigError(field, "expected an array of [j, k] pairs");
  }
  std::vector<VertexPair> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    const auto &e = j[i];
    if (!e.is_array() || e.size() != 2) {
      throw ConfigError(f, "expected a [j, k] pair");
    }
    const int a = integer(e[0], f + "[0]");
    const int b = integer(e[1], f + "[1]");
    if (a < 1 || a > vertices || b < 1 || b > vertices) {
      throw ConfigError(f, "endpoint outside 1.." + std::to_string(vertices));
    }
    if (a == b) {
      throw ConfigError(f, "self-loop");
    }
    out.emplace_back(a - 1, b - 1);
  }
  return out;
}

inline json paper_example_document() {
  return json{
      {"name", "paper_example"},
      {"n", 3},
      {"edges", json::array({json::array({1, 2}), json::array({2, 3}),
                             json::array({1, 3})})},
      {"hamiltonian", "powers_of_two"},
      {"hbar", 1.0},
      {"rho0", "paper_example"},
      {"normalize", true},
      {"step", 1e-4},
      {"horizon", 20.0},
      {"stride", 0.05},
      {"mode", "full"},
      {"outputs", json::array({"diagonals", "eo", "corner"})},
      {"fit_window", json::array({2.0, 10.0})},
      {"thresholds",
       {{"corner_deviation", 1e-7},
        {"corner_modulus_drift", 1e-8},
        {"noncorner_coherence", 1e-6},
        {"diagonal_limit", 1e-6},
        {"diagonal_clusters", 4},
        {"eo_slope", 0.0},
        {"eo_fit_residual", 0.1},
        {"trace_drift", 1e-9},
        {"hermiticity", 1e-9},
        {"min_eigenvalue", -1e-8}}}};
}

inline json preset_document(const std::string &name) {
  if (name == "paper_example") {
    return paper_example_document();
  }
  throw ConfigError("preset", "unknown config preset '" + name +
                                  "' (expected paper_example)");
}

inline void parse_classical(const json &c, ExperimentConfig &cfg) {
  if (!c.is_object()) {
    throw ConfigError("classical", "expected an object");
  }
  ClassicalSpec spec;
  if (!c.contains("nodes")) {
    throw ConfigError("classical.nodes", "missing");
  }
  spec.nodes = integer(c["nodes"], "classical.nodes");
  if (spec.nodes < 1) {
    throw ConfigError("classical.nodes", "must be at least 1");
  }
  spec.edges = c.contains("edges")
                   ? edge_list(c["edges"], "classical.edges", spec.nodes)
                   : std::vector<VertexPair>{};
  if (!is_connected(spec.nodes, spec.edges)) {
    throw ConfigError("classical.edges", "graph is not connected");
  }
  if (!c.contains("thetas") || !c["thetas"].is_array()) {
    throw ConfigError("classical.thetas", "expected an array of rates");
  }
  for (std::size_t i = 0; i < c["thetas"].size(); ++i) {
    spec.thetas.push_back(
        number(c["thetas"][i], "classical.thetas[" + std::to_string(i) + "]"));
  }
  if (spec.thetas.size() != static_cast<std::size_t>(spec.nodes)) {
    throw ConfigError("classical.thetas", "expected " +
                                              std::to_string(spec.nodes) +
                                              " rates, got " +
                                              std::to_string(spec.thetas.size()));
  }
  if (!c.contains("x0") || !c["x0"].is_array()) {
    throw ConfigError("classical.x0", "expected an array of complex values");
  }
  for (std::size_t i = 0; i < c["x0"].size(); ++i) {
    spec.x0.push_back(
        complex_value(c["x0"][i], "classical.x0[" + std::to_string(i) + "]"));
  }
  if (spec.x0.size() != static_cast<std::size_t>(spec.nodes)) {
    throw ConfigError("classical.x0", "expected " + std::to_string(spec.nodes) +
                                          " values, got " +
                                          std::to_string(spec.x0.size()));
  }
  cfg.classical = std::move(spec);
}

inline void parse_quantum(const json &doc, ExperimentConfig &cfg) {
  if (!doc.contains("n")) {
    throw ConfigError("n", "missing");
  }
  cfg.n = integer(doc["n"], "n");
  if (cfg.n < 1 || cfg.n > kMaxQubits) {
    throw ConfigError("n", "qubit count " + std::to_string(cfg.n) +
                               " outside [1, " + std::to_string(kMaxQubits) + "]");
  }
  const auto pairs = doc.contains("edges")
                         ? edge_list(doc["edges"], "edges", cfg.n)
                         : std::vector<VertexPair>{};
  cfg.edges.clear();
  for (auto [a, b] : pairs) {
    cfg.edges.push_back({std::min(a, b), std::max(a, b)});
  }
  for (std::size_t i = 0; i < cfg.edges.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (cfg.edges[i] == cfg.edges[k]) {
        throw ConfigError("edges[" + std::to_string(i) + "]", "duplicate edge");
      }
    }
  }
  if (!is_connected(cfg.n, pairs)) {
    throw ConfigError("edges", "interaction graph on " + std::to_string(cfg.n) +
                                   " qubits is not connected");
  }

  if (doc.contains("hbar")) {
    cfg.hbar = positive(doc["hbar"], "hbar");
  }
  if (!doc.contains("hamiltonian")) {
    throw ConfigError("hamiltonian", "missing");
  }
  const auto &h = doc["hamiltonian"];
  const auto dim = dimension(cfg.n);
  if (h.is_string()) {
    cfg.hamiltonian_preset = h.get<std::string>();
    cfg.lambdas = hamiltonian_preset(cfg.hamiltonian_preset, cfg.n, "hamiltonian");
  } else if (h.is_array()) {
    cfg.hamiltonian_preset.clear();
    cfg.lambdas.clear();
    for (std::size_t i = 0; i < h.size(); ++i) {
      const double v = number(h[i], "hamiltonian[" + std::to_string(i) + "]");
      if (!std::isfinite(v)) {
        throw ConfigError("hamiltonian[" + std::to_string(i) + "]", "not finite");
      }
      cfg.lambdas.push_back(v);
    }
    if (cfg.lambdas.size() != dim) {
      throw ConfigError("hamiltonian", "expected " + std::to_string(dim) +
                                           " eigenvalues for n = " +
                                           std::to_string(cfg.n) + ", got " +
                                           std::to_string(cfg.lambdas.size()));
    }
  } else {
    throw ConfigError("hamiltonian", "expected a preset name or an array");
  }

  if (!doc.contains("rho0")) {
    throw ConfigError("rho0", "missing");
  }
  const auto &r = doc["rho0"];
  if (r.is_string()) {
    cfg.rho0_preset = r.get<std::string>();
    cfg.rho0 = rho0_preset(cfg.rho0_preset, cfg.n, "rho0");
  } else if (r.is_array()) {
    cfg.rho0_preset.clear();
    if (r.size() != dim) {
      throw ConfigError("rho0", "expected " + std::to_string(dim) +
                                    " rows for n = " + std::to_string(cfg.n) +
                                    ", got " + std::to_string(r.size()));
    }
    const auto d = static_cast<Eigen::Index>(dim);
    cfg.rho0 = CMatrix(d, d);
    for (std::size_t i = 0; i < dim; ++i) {
      const std::string row = "rho0[" + std::to_string(i) + "]";
      if (!r[i].is_array() || r[i].size() != dim) {
        throw ConfigError(row, "expected " + std::to_string(dim) + " entries");
      }
      for (std::size_t k = 0; k < dim; ++k) {
        cfg.rho0(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
            complex_value(r[i][k], row + "[" + std::to_string(k) + "]");
      }
    }
  } else {
    throw ConfigError("rho0", "expected a preset name or a nested matrix");
  }
  if (doc.contains("normalize")) {
    if (!doc["normalize"].is_boolean()) {
      throw ConfigError("normalize", "expected true or false");
    }
    cfg.normalize = doc["normalize"].get<bool>();
  }
  if (doc.contains("all_orbits")) {
    if (!doc["all_orbits"].is_boolean()) {
      throw ConfigError("all_orbits", "expected true or false");
    }
    cfg.all_orbits = doc["all_orbits"].get<bool>();
  }
}

} // namespace detail

/// Parse and validate a configuration document. A top-level "preset" key
/// supplies defaults that the remaining keys override.
inline ExperimentConfig parse_config(const nlohmann::json &input) {
  using detail::json;
  if (!input.is_object()) {
    throw ConfigError("(root)", "expected a JSON object");
  }
  json doc = input;
  if (input.contains("preset")) {
    if (!input["preset"].is_string()) {
      throw ConfigError("preset", "expected a preset name");
    }
    doc = detail::preset_document(input["preset"].get<std::string>());
    for (auto it = input.begin(); it != input.end(); ++it) {
      if (it.key() != "preset") {
        doc[it.key()] = it.value();
      }
    }
  }

  ExperimentConfig cfg;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) {
      throw ConfigError("name", "expected a string");
    }
    cfg.name = doc["name"].get<std::string>();
  }
  if (doc.contains("mode")) {
    const auto m = doc["mode"].is_string() ? doc["mode"].get<std::string>() : "";
    if (m == "full") {
      cfg.mode = RunMode::Full;
    } else if (m == "orbit") {
      cfg.mode = RunMode::Orbit;
    } else if (m == "classical") {
      cfg.mode = RunMode::Classical;
    } else if (m == "compare") {
      cfg.mode = RunMode::Compare;
    } else {
      throw ConfigError("mode", "expected full, orbit, classical or compare");
    }
  }

  if (cfg.mode == RunMode::Classical) {
    if (!doc.contains("classical")) {
      throw ConfigError("classical", "missing (required in classical mode)");
    }
    detail::parse_classical(doc["classical"], cfg);
  } else {
    detail::parse_quantum(doc, cfg);
  }

  if (doc.contains("step")) {
    cfg.integration.step = detail::positive(doc["step"], "step");
  }
  if (doc.contains("horizon")) {
    cfg.integration.horizon = detail::positive(doc["horizon"], "horizon");
  }
  if (doc.contains("stride")) {
    cfg.integration.stride = detail::positive(doc["stride"], "stride");
  }
  if (doc.contains("outputs")) {
    const auto &o = doc["outputs"];
    if (!o.is_array()) {
      throw ConfigError("outputs", "expected an array of output names");
    }
    for (std::size_t i = 0; i < o.size(); ++i) {
      const std::string f = "outputs[" + std::to_string(i) + "]";
      if (!o[i].is_string()) {
        throw ConfigError(f, "expected a string");
      }
      const auto name = o[i].get<std::string>();
      const auto &known = known_outputs();
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        throw ConfigError(f, "unknown output '" + name + "'");
      }
      cfg.outputs.push_back(name);
    }
  }
  if (doc.contains("thresholds")) {
    const auto &t = doc["thresholds"];
    if (!t.is_object()) {
      throw ConfigError("thresholds", "expected an object");
    }
    for (auto it = t.begin(); it != t.end(); ++it) {
      const std::string f = "thresholds." + it.key();
      const auto &known = known_thresholds();
      if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
        throw ConfigError(f, "unknown threshold");
      }
      cfg.thresholds[it.key()] = detail::number(it.value(), f);
    }
  }
  if (doc.contains("fit_window")) {
    const auto &w = doc["fit_window"];
    if (!w.is_array() || w.size() != 2) {
      throw ConfigError("fit_window", "expected [start, end]");
    }
    cfg.fit_start = detail::number(w[0], "fit_window[0]");
    cfg.fit_end = detail::number(w[1], "fit_window[1]");
    if (!(cfg.fit_end > cfg.fit_start)) {
      throw ConfigError("fit_window", "end must exceed start");
    }
  }
  if (doc.contains("tail_fraction")) {
    cfg.tail_fraction = detail::positive(doc["tail_fraction"], "tail_fraction");
    if (cfg.tail_fraction > 1.0) {
      throw ConfigError("tail_fraction", "must not exceed 1");
    }
  }
  return cfg;
}

inline ExperimentConfig parse_config(const std::string &text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ConfigError("(document)", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

/// Serialize back to the config grammar; presets are written by name.
inline nlohmann::json to_json(const ExperimentConfig &cfg) {
  using detail::json;
  json doc;
  if (!cfg.name.empty()) {
    doc["name"] = cfg.name;
  }
  doc["mode"] = to_string(cfg.mode);
  if (cfg.quantum()) {
    doc["n"] = cfg.n;
    json edges = json::array();
    for (const auto &e : cfg.edges) {
      edges.push_back(json::array({e.j + 1, e.k + 1}));
    }
    doc["edges"] = edges;
    if (!cfg.hamiltonian_preset.empty()) {
      doc["hamiltonian"] = cfg.hamiltonian_preset;
    } else {
      doc["hamiltonian"] = cfg.lambdas;
    }
    doc["hbar"] = cfg.hbar;
    if (!cfg.rho0_preset.empty()) {
      doc["rho0"] = cfg.rho0_preset;
    } else {
      json rows = json::array();
      for (Eigen::Index i = 0; i < cfg.rho0.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < cfg.rho0.cols(); ++k) {
          row.push_back(detail::complex_json(cfg.rho0(i, k)));
        }
        rows.push_back(row);
      }
      doc["rho0"] = rows;
    }
    doc["normalize"] = cfg.normalize;
    doc["all_orbits"] = cfg.all_orbits;
  } else {
    const auto &c = *cfg.classical;
    json edges = json::array();
    for (auto [a, b] : c.edges) {
      edges.push_back(json::array({a + 1, b + 1}));
    }
    json x0 = json::array();
    for (auto v : c.x0) {
      x0.push_back(detail::complex_json(v));
    }
    doc["classical"] = {
        {"nodes", c.nodes}, {"edges", edges}, {"thetas", c.thetas}, {"x0", x0}};
  }
  if (cfg.integration.step > 0.0) {
    doc["step"] = cfg.integration.step;
  }
  doc["horizon"] = cfg.integration.horizon;
  doc["stride"] = cfg.integration.stride;
  doc["outputs"] = cfg.outputs;
  doc["thresholds"] = cfg.thresholds;
  doc["fit_window"] = json::array({cfg.fit_start, cfg.fit_end});
  doc["tail_fraction"] = cfg.tail_fraction;
  return doc;
}

/// Stable hash of the canonical serialization.
inline std::string fingerprint(const ExperimentConfig &cfg) {
  const std::string text = to_json(cfg).dump();
  return detail::fnv1a_hex(text.data(), text.size());
}

} // namespace qsync
