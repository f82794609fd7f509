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

// Configuration-driven runs: integrate in the requested mode, evaluate the
// metrics, compare against configured thresholds and export CSVs.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qsync/analysis.hpp"
#include "qsync/config.hpp"
#include "qsync/consensus.hpp"
#include "qsync/csv.hpp"
#include "qsync/errors.hpp"
#include "qsync/lindblad.hpp"
#include "qsync/orbits.hpp"

namespace qsync {

enum class Comparison { AtMost, AtLeast, Below, Equal };

inline std::string to_string(Comparison c) {
  switch (c) {
  case Comparison::AtMost:
    return "<=";
  case Comparison::AtLeast:
    return ">=";
  case Comparison::Below:
    return "<";
  case Comparison::Equal:
    return "==";
  }
  return "?";
}

inline Comparison comparison_for(const std::string &metric) {
  if (metric == "min_eigenvalue") {
    return Comparison::AtLeast;
  }
  if (metric == "eo_slope") {
    return Comparison::Below;
  }
  if (metric == "diagonal_clusters") {
    return Comparison::Equal;
  }
  return Comparison::AtMost;
}

struct MetricResult {
  std::string name;
  double value = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> threshold;
  Comparison comparison = Comparison::AtMost;
  bool pass = true;
  std::string note;
};

struct RunReport {
  std::string config_fingerprint;
  std::string name;
  RunMode mode = RunMode::Full;
  nlohmann::json metadata;
  std::vector<MetricResult> metrics;
  std::vector<std::string> files;
  double wall_seconds = 0.0;

  bool passed() const {
    for (const auto &m : metrics) {
      if (!m.pass) {
        return false;
      }
    }
    return true;
  }

  std::vector<std::string> failing() const {
    std::vector<std::string> out;
    for (const auto &m : metrics) {
      if (!m.pass) {
        out.push_back(m.name);
      }
    }
    return out;
  }

  const MetricResult *find(const std::string &metric) const {
    for (const auto &m : metrics) {
      if (m.name == metric) {
        return &m;
      }
    }
    return nullptr;
  }
};

inline nlohmann::json to_json(const RunReport &r) {
  nlohmann::json metrics = nlohmann::json::array();
  for (const auto &m : r.metrics) {
    nlohmann::json j{{"name", m.name}, {"pass", m.pass}};
    j["value"] = std::isfinite(m.value) ? nlohmann::json(m.value) : nlohmann::json();
    if (m.threshold) {
      j["threshold"] = *m.threshold;
      j["comparison"] = to_string(m.comparison);
    }
    if (!m.note.empty()) {
      j["note"] = m.note;
    }
    metrics.push_back(j);
  }
  return {{"config_fingerprint", r.config_fingerprint},
          {"name", r.name},
          {"mode", to_string(r.mode)},
          {"metadata", r.metadata},
          {"metrics", metrics},
          {"files", r.files},
          {"passed", r.passed()},
          {"wall_seconds", r.wall_seconds}};
}

namespace detail {

inline bool compare(double value, double threshold, Comparison c) {
  switch (c) {
  case Comparison::AtMost:
    return value <= threshold;
  case Comparison::AtLeast:
    return value >= threshold;
  case Comparison::Below:
    return value < threshold;
  case Comparison::Equal:
    return value == threshold;
  }
  return false;
}

/// Records computed metrics and applies any configured threshold.
class MetricSink {
public:
  MetricSink(const ExperimentConfig &cfg, RunReport &report)
      : cfg_(cfg), report_(report) {}

  void add(const std::string &name, double value, std::string note = {}) {
    MetricResult m;
    m.name = name;
    m.value = value;
    m.comparison = comparison_for(name);
    m.note = std::move(note);
    if (auto it = cfg_.thresholds.find(name); it != cfg_.thresholds.end()) {
      m.threshold = it->second;
      m.pass = std::isfinite(value) && compare(value, it->second, m.comparison);
    }
    report_.metrics.push_back(std::move(m));
  }

  /// Thresholds that no computed metric picked up fail as not applicable.
  void finish() {
    for (const auto &[name, thr] : cfg_.thresholds) {
      if (report_.find(name) == nullptr) {
        MetricResult m;
        m.name = name;
        m.threshold = thr;
        m.comparison = comparison_for(name);
        m.pass = false;
        m.note = "not applicable in mode " + to_string(cfg_.mode);
        report_.metrics.push_back(std::move(m));
      }
    }
  }

private:
  const ExperimentConfig &cfg_;
  RunReport &report_;
};

inline void check_outputs(const ExperimentConfig &cfg) {
  for (std::size_t i = 0; i < cfg.outputs.size(); ++i) {
    const auto &o = cfg.outputs[i];
    const bool classical_only = o == "states" || o == "max_sq_norm";
    if (classical_only == cfg.quantum()) {
      throw ConfigError("outputs[" + std::to_string(i) + "]",
                        "output '" + o + "' is not available in mode " +
                            to_string(cfg.mode));
    }
  }
}

inline void quantum_metrics(const ExperimentConfig &cfg, const Trajectory &traj,
                            const DiagonalHamiltonian &h, MetricSink &sink,
                            CornerReport &corner) {
  corner = corner_phase_check(traj, h);
  sink.add("corner_deviation", corner.max_deviation);
  sink.add("corner_modulus_drift", corner.max_modulus_drift);

  const auto &last = traj.states.back();
  sink.add("noncorner_coherence", max_noncorner_coherence(last));

  const auto limits = predicted_diagonal_limits(traj.states.front());
  const auto diag = diagonal_of(last);
  double diag_dev = 0.0;
  for (std::size_t x = 0; x < diag.size(); ++x) {
    diag_dev = std::max(diag_dev, std::abs(diag[x] - limits.per_label[x]));
  }
  sink.add("diagonal_limit", diag_dev);
  const auto thr = cfg.thresholds.find("diagonal_limit");
  const double cluster_tol = thr != cfg.thresholds.end() ? thr->second : 1e-6;
  sink.add("diagonal_clusters",
           static_cast<double>(count_clusters(diag, cluster_tol)));

  std::vector<double> ts;
  std::vector<double> eo;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times[k];
    if (t >= cfg.fit_start - 1e-12 && t <= cfg.fit_end + 1e-12) {
      ts.push_back(t);
      eo.push_back(decoherence_measure(traj.states[k]));
    }
  }
  if (ts.size() >= 2) {
    const auto fit = exponential_rate_fit(ts, eo);
    std::string note = fit.clipped ? std::to_string(fit.clipped) +
                                         " values clipped at 1e-300"
                                   : std::string{};
    sink.add("eo_slope", fit.slope, note);
    sink.add("eo_fit_residual", fit.max_residual, note);
  }

  const auto cptp = cptp_diagnostics(traj);
  sink.add("trace_drift", cptp.max_trace_drift);
  sink.add("hermiticity",
           std::max(cptp.max_hermiticity_defect, traj.meta.raw_hermiticity_defect));
  sink.add("min_eigenvalue", cptp.min_eigenvalue);

  if (last.qubits() >= 2) {
    sink.add("reduced_gap", reduced_state_gap(traj, cfg.tail_fraction).tail_max);
  }
}

inline void write_quantum_outputs(const ExperimentConfig &cfg,
                                  const Trajectory &traj,
                                  const CornerReport &corner,
                                  const std::filesystem::path &dir,
                                  RunReport &report) {
  for (const auto &o : cfg.outputs) {
    std::filesystem::path file;
    if (o == "diagonals") {
      file = dir / "diagonals.csv";
      export_diagonals(file, traj);
    } else if (o == "eo") {
      file = dir / "eo.csv";
      export_decoherence(file, traj);
    } else if (o == "corner") {
      file = dir / "corner.csv";
      export_corner(file, corner);
    } else if (o == "reduced_gap") {
      file = dir / "reduced_gap.csv";
      export_series(file, "gap", traj.times,
                    reduced_state_gap(traj, cfg.tail_fraction).gaps);
    } else if (o == "entries") {
      file = dir / "entries.csv";
      export_entries(file, traj);
    }
    report.files.push_back(file.string());
  }
}

inline nlohmann::json grid_metadata(const TrajectoryMetadata &m,
                                    const IntegrationOptions &opt) {
  return {{"integrator", "rk4"},        {"step", m.step},
          {"steps", m.steps},           {"horizon", m.horizon},
          {"stride", opt.stride},       {"sample_every", m.sample_every},
          {"graph", m.graph},           {"hamiltonian", m.hamiltonian}};
}

inline void run_quantum(const ExperimentConfig &cfg,
                        const std::optional<std::filesystem::path> &out_dir,
                        unsigned threads, RunReport &report, MetricSink &sink) {
  const auto g = cfg.graph();
  const auto h = cfg.hamiltonian();
  const auto rho0 = cfg.initial_state();

  Trajectory traj;
  if (cfg.mode == RunMode::Orbit) {
    traj = integrate_by_orbits(rho0, h, g, cfg.integration, cfg.all_orbits, threads);
  } else {
    traj = integrate(rho0, h, g, cfg.integration);
  }
  report.metadata = grid_metadata(traj.meta, cfg.integration);
  report.metadata["distinct_differences"] = check_distinct_differences(h).distinct;

  if (cfg.mode == RunMode::Compare) {
    const auto by_orbits =
        integrate_by_orbits(rho0, h, g, cfg.integration, cfg.all_orbits, threads);
    double dev = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      dev = std::max(dev, max_entry_deviation(traj.states[k].matrix(),
                                              by_orbits.states[k].matrix()));
    }
    sink.add("compare_deviation", dev);
  }

  CornerReport corner;
  quantum_metrics(cfg, traj, h, sink, corner);
  if (out_dir) {
    write_quantum_outputs(cfg, traj, corner, *out_dir, report);
  }
}

inline void run_classical(const ExperimentConfig &cfg,
                          const std::optional<std::filesystem::path> &out_dir,
                          RunReport &report, MetricSink &sink) {
  const auto sys = cfg.classical_system();
  const CVector x0 = cfg.classical_initial();
  const auto traj = integrate_classical(sys, x0, cfg.integration);
  report.metadata = {{"integrator", "rk4"},
                     {"step", traj.grid.step},
                     {"steps", traj.grid.steps},
                     {"horizon", traj.grid.horizon},
                     {"stride", cfg.integration.stride},
                     {"sample_every", traj.grid.sample_every},
                     {"nodes", sys.nodes()}};

  const auto mono = max_sq_norm_diag(traj);
  sink.add("monotonicity", mono.max_increment);
  try {
    const auto lim = limit_modulus(traj, cfg.tail_fraction);
    report.metadata["limit_modulus"] = lim.z;
    sink.add("limit_spread", lim.spread);
  } catch (const ValidationError &e) {
    sink.add("limit_spread", std::numeric_limits<double>::quiet_NaN(), e.what());
  }
  sink.add("decay", traj.states.back().cwiseAbs().maxCoeff());

  const auto &th = sys.thetas();
  const bool common =
      std::all_of(th.begin(), th.end(), [&](double t) { return t == th.front(); });
  if (common) {
    const double t = traj.times.back();
    const Complex target = std::polar(1.0, th.front() * t) * x0.mean();
    sink.add("rotating_average",
             (traj.states.back().array() - target).abs().maxCoeff());
  } else {
    sink.add("rotating_average", std::numeric_limits<double>::quiet_NaN(),
             "rotation rates are not all equal");
  }

  if (out_dir) {
    for (const auto &o : cfg.outputs) {
      std::filesystem::path file;
      if (o == "states") {
        file = *out_dir / "classical.csv";
        export_classical(file, traj);
      } else if (o == "max_sq_norm") {
        file = *out_dir / "max_sq_norm.csv";
        export_series(file, "f", traj.times, mono.f);
      }
      report.files.push_back(file.string());
    }
  }
}

} // namespace detail

/// Execute a configuration. CSVs go to `out_dir` when given (created if
/// missing); the caller writes the report itself.
inline RunReport run(const ExperimentConfig &cfg,
                     const std::optional<std::filesystem::path> &out_dir = {},
                     unsigned threads = 1) {
  const auto start = std::chrono::steady_clock::now();
  detail::check_outputs(cfg);
  if (out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*out_dir, ec);
    if (ec) {
      throw IoError("cannot create output directory '" + out_dir->string() +
                    "': " + ec.message());
    }
  }
  RunReport report;
  report.config_fingerprint = fingerprint(cfg);
  report.name = cfg.name;
  report.mode = cfg.mode;
  detail::MetricSink sink(cfg, report);
  if (cfg.quantum()) {
    detail::run_quantum(cfg, out_dir, threads, report, sink);
  } else {
    detail::run_classical(cfg, out_dir, report, sink);
  }
  sink.finish();
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

/// Full and orbit integration side by side; the config's mode is ignored.
inline RunReport compare(ExperimentConfig cfg, unsigned threads = 1) {
  if (!cfg.quantum()) {
    throw ConfigError("mode", "compare needs a quantum configuration");
  }
  cfg.mode = RunMode::Compare;
  cfg.outputs.clear();
  if (!cfg.thresholds.contains("compare_deviation")) {
    cfg.thresholds["compare_deviation"] = 1e-8;
  }
  return run(cfg, std::nullopt, threads);
}

struct ClassifiedOrbit {
  EntryOrbit orbit;
  OrbitClassification classification;
};

struct ClassifyReport {
  DifferenceCheck differences;
  std::vector<ClassifiedOrbit> orbits;
};

inline ClassifyReport classify(const ExperimentConfig &cfg) {
  if (!cfg.quantum()) {
    throw ConfigError("mode", "classify needs a quantum configuration");
  }
  const auto h = cfg.hamiltonian();
  auto orbits = all_orbits(cfg.graph(), h);
  ClassifyReport r;
  r.differences = check_distinct_differences(h);
  const auto classes = classify_orbits(orbits);
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    r.orbits.push_back({std::move(orbits[i]), classes[i]});
  }
  return r;
}

/// Diagnostics of the configured initial state (normalized if requested).
inline DensityReport validate_initial_state(const ExperimentConfig &cfg,
                                            const Tolerances &tol = {}) {
  if (!cfg.quantum()) {
    throw ConfigError("mode", "validate needs a quantum configuration");
  }
  return validate_density(cfg.initial_state(), tol);
}

} // namespace qsync
