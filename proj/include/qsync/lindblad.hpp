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

// Synchronization master equation with a diagonal network Hamiltonian:
//
//   d rho/dt = -(i/hbar) [H, rho] + sum_{{j,k} in E} (U_jk rho U_jk^dag - rho)
//
// For diagonal H and permutation U_jk both terms act entrywise, so the
// generator is applied by index permutation rather than dense products.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "qsync/errors.hpp"
#include "qsync/hilbert.hpp"
#include "qsync/integrator.hpp"

namespace qsync {

namespace detail {

inline std::string fnv1a_hex(const void *data, std::size_t bytes,
                             std::uint64_t seed = 1469598103934665603ULL) {
  std::uint64_t h = seed;
  const auto *p = static_cast<const unsigned char *>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace detail

/// H = sum_p lambda_p |p><p| together with the scale constant hbar.
class DiagonalHamiltonian {
public:
  static DiagonalHamiltonian create(int n, std::vector<double> lambdas,
                                    double hbar = 1.0) {
    const auto dim = dimension(n);
    if (lambdas.size() != dim) {
      throw ValidationError("hamiltonian needs " + std::to_string(dim) +
                            " eigenvalues for n = " + std::to_string(n) +
                            ", got " + std::to_string(lambdas.size()));
    }
    for (std::size_t p = 0; p < lambdas.size(); ++p) {
      if (!std::isfinite(lambdas[p])) {
        throw ValidationError("hamiltonian eigenvalue " + std::to_string(p) +
                              " is not finite");
      }
    }
    if (!(hbar > 0.0) || !std::isfinite(hbar)) {
      throw ValidationError("hbar must be positive and finite");
    }
    DiagonalHamiltonian h;
    h.n_ = n;
    h.lambdas_ = std::move(lambdas);
    h.hbar_ = hbar;
    return h;
  }

  /// lambda_x = 2^x with x read as a binary number.
  static DiagonalHamiltonian powers_of_two(int n, double hbar = 1.0) {
    std::vector<double> l(dimension(n));
    for (std::size_t x = 0; x < l.size(); ++x) {
      l[x] = std::ldexp(1.0, static_cast<int>(x));
    }
    return create(n, std::move(l), hbar);
  }

  static DiagonalHamiltonian constant(int n, double value, double hbar = 1.0) {
    return create(n, std::vector<double>(dimension(n), value), hbar);
  }

  static DiagonalHamiltonian zero(int n, double hbar = 1.0) {
    return constant(n, 0.0, hbar);
  }

  int qubits() const { return n_; }
  double hbar() const { return hbar_; }
  const std::vector<double> &lambdas() const { return lambdas_; }
  double lambda(std::uint32_t p) const { return lambdas_[p]; }

  /// Largest |lambda_x - lambda_y| / hbar.
  double max_rate() const {
    const auto [lo, hi] = std::minmax_element(lambdas_.begin(), lambdas_.end());
    return (*hi - *lo) / hbar_;
  }

  CMatrix dense() const {
    CVector d(static_cast<Eigen::Index>(lambdas_.size()));
    for (std::size_t p = 0; p < lambdas_.size(); ++p) {
      d(static_cast<Eigen::Index>(p)) = lambdas_[p];
    }
    return d.asDiagonal();
  }

  std::string fingerprint() const {
    std::vector<double> buf(lambdas_);
    buf.push_back(hbar_);
    return detail::fnv1a_hex(buf.data(), buf.size() * sizeof(double));
  }

private:
  DiagonalHamiltonian() = default;
  int n_ = 1;
  std::vector<double> lambdas_;
  double hbar_ = 1.0;
};

/// lambda_x - lambda_y: the factor [H, .] applies to entry (x, y).
inline double commutator_entry(const DiagonalHamiltonian &h, const BasisLabel &x,
                               const BasisLabel &y) {
  if (x.qubits() != h.qubits() || y.qubits() != h.qubits()) {
    throw ValidationError("label length does not match hamiltonian");
  }
  return h.lambda(x.index()) - h.lambda(y.index());
}

inline void check_compatible(const DiagonalHamiltonian &h,
                             const InteractionGraph &g) {
  if (h.qubits() != g.qubits()) {
    throw ValidationError("hamiltonian is for " + std::to_string(h.qubits()) +
                          " qubits but graph has " +
                          std::to_string(g.qubits()));
  }
}

/// L = max |lambda_x - lambda_y| / hbar + 2|E|, a bound on the spectral
/// radius of the generator.
inline double stability_bound(const DiagonalHamiltonian &h,
                              const InteractionGraph &g) {
  return h.max_rate() + 2.0 * static_cast<double>(g.edges().size());
}

/// Precomputed generator of the master equation.
class MasterEquation {
public:
  MasterEquation(DiagonalHamiltonian h, InteractionGraph g)
      : h_(std::move(h)), g_(std::move(g)) {
    check_compatible(h_, g_);
    const auto dim = g_.dim();
    for (const auto &e : g_.edges()) {
      std::vector<std::uint32_t> perm(dim);
      for (std::uint32_t x = 0; x < dim; ++x) {
        perm[x] = detail::swap_bits(g_.qubits(), e.j, e.k, x);
      }
      perms_.push_back(std::move(perm));
    }
  }

  const DiagonalHamiltonian &hamiltonian() const { return h_; }
  const InteractionGraph &graph() const { return g_; }
  double bound() const { return stability_bound(h_, g_); }

  CMatrix operator()(const CMatrix &rho) const {
    const auto dim = static_cast<Eigen::Index>(g_.dim());
    if (rho.rows() != dim || rho.cols() != dim) {
      throw ValidationError("state dimension does not match generator");
    }
    const Complex minus_i_over_hbar(0.0, -1.0 / h_.hbar());
    const auto &l = h_.lambdas();
    CMatrix out(dim, dim);
    for (Eigen::Index y = 0; y < dim; ++y) {
      for (Eigen::Index x = 0; x < dim; ++x) {
        const Complex v = rho(x, y);
        Complex d = minus_i_over_hbar * (l[x] - l[y]) * v;
        for (const auto &p : perms_) {
          d += rho(p[x], p[y]) - v;
        }
        out(x, y) = d;
      }
    }
    return out;
  }

private:
  DiagonalHamiltonian h_;
  InteractionGraph g_;
  std::vector<std::vector<std::uint32_t>> perms_;
};

inline CMatrix master_rhs(const DensityMatrix &rho, const DiagonalHamiltonian &h,
                          const InteractionGraph &g) {
  if (rho.qubits() != g.qubits()) {
    throw ValidationError("state has " + std::to_string(rho.qubits()) +
                          " qubits but graph has " + std::to_string(g.qubits()));
  }
  return MasterEquation(h, g)(rho.matrix());
}

struct TrajectoryMetadata {
  int qubits = 0;
  double step = 0.0;
  double horizon = 0.0;
  std::size_t steps = 0;
  std::size_t sample_every = 1;
  std::string graph;
  std::string hamiltonian;
  /// Largest Hermiticity defect of the running state before the recorded
  /// copy was re-Hermitized.
  double raw_hermiticity_defect = 0.0;
};

/// Sampled solution of the master equation.
struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  TrajectoryMetadata meta;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
};

inline bool all_finite(const CMatrix &m) { return m.allFinite(); }

/// Fixed-step RK4 integration of the master equation from rho0. Recorded
/// states are re-Hermitized; the running state is not.
inline Trajectory integrate(const DensityMatrix &rho0,
                            const DiagonalHamiltonian &h,
                            const InteractionGraph &g,
                            const IntegrationOptions &opt = {},
                            const Tolerances &tol = {}) {
  if (rho0.qubits() != g.qubits()) {
    throw ValidationError("initial state has " + std::to_string(rho0.qubits()) +
                          " qubits but graph has " + std::to_string(g.qubits()));
  }
  require_valid(rho0, tol);
  const MasterEquation gen(h, g);
  const TimeGrid grid = make_time_grid(opt, gen.bound());

  Trajectory traj;
  traj.meta = {g.qubits(),    grid.step,       grid.horizon,
               grid.steps,    grid.sample_every, g.to_string(),
               h.fingerprint(), 0.0};
  const std::size_t samples = grid.steps / grid.sample_every + 2;
  traj.times.reserve(samples);
  traj.states.reserve(samples);
  march(
      rho0.matrix(), grid, gen,
      [&](std::size_t, double t, const CMatrix &y) {
        traj.meta.raw_hermiticity_defect =
            std::max(traj.meta.raw_hermiticity_defect,
                     (y - y.adjoint()).cwiseAbs().maxCoeff());
        traj.times.push_back(t);
        traj.states.emplace_back(g.qubits(), hermitized(y));
      },
      all_finite);
  return traj;
}

/// Per-sample density diagnostics over a trajectory.
struct CptpReport {
  std::vector<DensityReport> samples;
  double max_hermiticity_defect = 0.0;
  double max_trace_defect = 0.0;
  double max_trace_drift = 0.0; // |tr rho(t) - tr rho(0)|
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> flagged; // sample indices failing a tolerance

  bool ok() const { return flagged.empty(); }
};

inline CptpReport cptp_diagnostics(const std::vector<DensityMatrix> &states,
                                   const Tolerances &tol = {}) {
  if (states.empty()) {
    throw ValidationError("cptp diagnostics need a nonempty trajectory");
  }
  CptpReport rep;
  const Complex tr0 = states.front().trace();
  for (std::size_t i = 0; i < states.size(); ++i) {
    auto r = validate_density(states[i], tol);
    rep.max_hermiticity_defect =
        std::max(rep.max_hermiticity_defect, r.hermiticity_defect);
    rep.max_trace_defect = std::max(rep.max_trace_defect, r.trace_defect);
    rep.max_trace_drift =
        std::max(rep.max_trace_drift, std::abs(states[i].trace() - tr0));
    rep.min_eigenvalue = std::min(rep.min_eigenvalue, r.min_eigenvalue);
    if (!r.ok()) {
      rep.flagged.push_back(i);
    }
    rep.samples.push_back(r);
  }
  return rep;
}

inline CptpReport cptp_diagnostics(const Trajectory &traj,
                                   const Tolerances &tol = {}) {
  return cptp_diagnostics(traj.states, tol);
}

} // namespace qsync
