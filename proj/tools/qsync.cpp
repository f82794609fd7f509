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

// qsync: command-line runner for synchronization master-equation experiments.
//
//   qsync run      --config <path> --out-dir <path>
//   qsync compare  --config <path>
//   qsync classify --config <path>
//   qsync validate --config <path>
//
// Any subcommand accepts --preset <name> in place of --config. QSYNC_THREADS
// caps the number of worker threads used by orbit-mode integration.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "qsync/qsync.hpp"

namespace {

unsigned thread_cap() {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char *env = std::getenv("QSYNC_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) {
        cap = static_cast<unsigned>(v);
      }
    } catch (const std::exception &) {
      std::cerr << "warning: ignoring malformed QSYNC_THREADS='" << env << "'\n";
    }
  }
  return cap;
}

qsync::ExperimentConfig load(const std::string &path, const std::string &preset) {
  if (!preset.empty()) {
    return qsync::parse_config(nlohmann::json{{"preset", preset}});
  }
  std::ifstream in(path);
  if (!in) {
    throw qsync::IoError("cannot read config '" + path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return qsync::parse_config(buf.str());
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

int report_and_exit(const qsync::RunReport &report) {
  for (const auto &m : report.metrics) {
    std::cout << (m.threshold ? (m.pass ? "PASS " : "FAIL ") : "     ") << m.name
              << " = " << (std::isfinite(m.value) ? format_value(m.value) : "n/a");
    if (m.threshold) {
      std::cout << " (" << qsync::to_string(m.comparison) << " "
                << format_value(*m.threshold) << ")";
    }
    if (!m.note.empty()) {
      std::cout << " [" << m.note << "]";
    }
    std::cout << '\n';
  }
  std::cout << "wall time " << format_value(report.wall_seconds) << " s\n";
  if (!report.passed()) {
    std::cerr << "failing metrics:";
    for (const auto &name : report.failing()) {
      std::cerr << ' ' << name;
    }
    std::cerr << '\n';
    return 1;
  }
  return 0;
}

int cmd_run(const qsync::ExperimentConfig &cfg, const std::string &out_dir) {
  const std::filesystem::path dir(out_dir);
  const auto report = qsync::run(cfg, dir, thread_cap());
  const auto report_path = dir / "report.json";
  std::ofstream out(report_path);
  if (!out) {
    throw qsync::IoError("cannot write '" + report_path.string() + "'");
  }
  out << qsync::to_json(report).dump(2) << '\n';
  for (const auto &f : report.files) {
    std::cout << "wrote " << f << '\n';
  }
  return report_and_exit(report);
}

int cmd_classify(const qsync::ExperimentConfig &cfg) {
  const auto r = qsync::classify(cfg);
  std::cout << "distinct energy gaps: " << (r.differences.distinct ? "yes" : "no");
  if (!r.differences.distinct) {
    std::cout << " (" << r.differences.collision_count << " collisions)";
  }
  std::cout << '\n';
  std::cout << "orbit  representative        size  kind                      limit\n";
  for (const auto &c : r.orbits) {
    const auto &rep = c.orbit.representative();
    const int n = c.orbit.qubits;
    std::string label =
        "|" + qsync::label_bits(n, rep.x) + "><" + qsync::label_bits(n, rep.y) + "|";
    char line[256];
    std::snprintf(line, sizeof line, "%5zu  %-22s %5zu  %-25s %s",
                  c.classification.orbit, label.c_str(), c.orbit.size(),
                  qsync::to_string(c.classification.kind).c_str(),
                  qsync::to_string(c.classification.limit).c_str());
    std::cout << line;
    if (c.classification.limit == qsync::LimitForm::RotatingPhase ||
        c.classification.limit == qsync::LimitForm::RotatingMean) {
      std::cout << " (rate " << c.classification.rate << ")";
    }
    std::cout << '\n';
  }
  return 0;
}

int cmd_validate(const qsync::ExperimentConfig &cfg) {
  std::cout << "config ok: " << qsync::to_string(cfg.mode) << " mode";
  if (!cfg.quantum()) {
    std::cout << ", " << cfg.classical->nodes << " classical nodes\n";
    return 0;
  }
  std::cout << ", n = " << cfg.n << ", edges " << cfg.graph().to_string()
            << (cfg.normalize ? ", normalized rho0" : "") << '\n';
  const auto r = qsync::validate_initial_state(cfg);
  std::cout << "hermiticity defect " << format_value(r.hermiticity_defect)
            << (r.hermitian ? " ok" : " FAIL") << '\n'
            << "trace " << r.trace.real() << " (defect "
            << format_value(r.trace_defect) << ")" << (r.unit_trace ? " ok" : " FAIL")
            << '\n'
            << "min eigenvalue " << format_value(r.min_eigenvalue)
            << (r.positive ? " ok" : " FAIL") << '\n';
  if (!r.ok()) {
    std::cerr << "initial state is not a valid density matrix\n";
    return 1;
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Synchronization master equation simulator for qubit networks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset;
  std::string out_dir;
  auto add_source = [&](CLI::App *sub) {
    auto *c = sub->add_option("--config", config_path, "experiment config (JSON)");
    auto *p = sub->add_option("--preset", preset, "built-in config preset");
    c->excludes(p);
    p->excludes(c);
  };

  auto *run = app.add_subcommand("run", "integrate and export CSVs and report.json");
  add_source(run);
  run->add_option("--out-dir", out_dir, "output directory")->required();
  auto *cmp = app.add_subcommand("compare", "full vs orbit integration deviation");
  add_source(cmp);
  auto *cls = app.add_subcommand("classify", "print the orbit classification");
  add_source(cls);
  auto *val = app.add_subcommand("validate", "check config and initial state");
  add_source(val);

  CLI11_PARSE(app, argc, argv);

  if (config_path.empty() && preset.empty()) {
    std::cerr << "error: one of --config or --preset is required\n";
    return 2;
  }
  try {
    const auto cfg = load(config_path, preset);
    if (run->parsed()) {
      return cmd_run(cfg, out_dir);
    }
    if (cmp->parsed()) {
      return report_and_exit(qsync::compare(cfg, thread_cap()));
    }
    if (cls->parsed()) {
      return cmd_classify(cfg);
    }
    return cmd_validate(cfg);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
