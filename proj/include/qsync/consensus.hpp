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

// Classical complex-valued consensus with node rotations,
//
//   X_i' = i theta_i X_i + sum_{j : {i,j} in E} (X_j - X_i),
//
// its realification Y_i = (Re X_i, Im X_i), and numerical diagnostics for the
// non-increase of max_i |X_i|^2 and the equalization of the moduli.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qsync/errors.hpp"
#include "qsync/graph.hpp"
#include "qsync/hilbert.hpp"
#include "qsync/integrator.hpp"

namespace qsync {

/// Node count, undirected edges on {0..N-1} (parallel edges allowed and
/// counted with multiplicity) and per-node rotation rates.
class ClassicalSystem {
public:
  static ClassicalSystem create(int nodes, std::vector<VertexPair> edges,
                                std::vector<double> thetas) {
    if (nodes < 1) {
      throw ValidationError("classical system needs at least one node");
    }
    if (thetas.size() != static_cast<std::size_t>(nodes)) {
      throw ValidationError("classical system has " + std::to_string(nodes) +
                            " nodes but " + std::to_string(thetas.size()) +
                            " rotation rates");
    }
    for (double t : thetas) {
      if (!std::isfinite(t)) {
        throw ValidationError("rotation rate is not finite");
      }
    }
    for (auto &[a, b] : edges) {
      if (a < 0 || a >= nodes || b < 0 || b >= nodes) {
        throw ValidationError("classical edge {" + std::to_string(a + 1) + "," +
                              std::to_string(b + 1) + "} out of range");
      }
      if (a == b) {
        throw ValidationError("classical self-loop on node " +
                              std::to_string(a + 1));
      }
      if (a > b) {
        std::swap(a, b);
      }
    }
    if (!is_connected(nodes, edges)) {
      throw ValidationError("classical graph is not connected");
    }
    ClassicalSystem s;
    s.nodes_ = nodes;
    s.edges_ = std::move(edges);
    s.thetas_ = std::move(thetas);
    s.neighbors_.resize(static_cast<std::size_t>(nodes));
    for (auto [a, b] : s.edges_) {
      s.neighbors_[a].push_back(b);
      s.neighbors_[b].push_back(a);
    }
    return s;
  }

  int nodes() const { return nodes_; }
  const std::vector<VertexPair> &edges() const { return edges_; }
  const std::vector<double> &thetas() const { return thetas_; }
  const std::vector<int> &neighbors(int i) const { return neighbors_[i]; }

  /// max |theta_i| + 2 * max degree.
  double stability_bound() const {
    double m = 0.0;
    for (double t : thetas_) {
      m = std::max(m, std::abs(t));
    }
    return m + 2.0 * max_degree(nodes_, edges_);
  }

private:
  ClassicalSystem() = default;
  int nodes_ = 1;
  std::vector<VertexPair> edges_;
  std::vector<double> thetas_;
  std::vector<std::vector<int>> neighbors_;
};

namespace detail {
inline void check_length(const ClassicalSystem &sys, Eigen::Index len) {
  if (len != sys.nodes()) {
    throw ValidationError("state has " + std::to_string(len) +
                          " entries but system has " +
                          std::to_string(sys.nodes()) + " nodes");
  }
}
} // namespace detail

inline CVector classical_rhs(const ClassicalSystem &sys, const CVector &x) {
  detail::check_length(sys, x.size());
  CVector out(x.size());
  for (int i = 0; i < sys.nodes(); ++i) {
    Complex d = Complex(0.0, sys.thetas()[i]) * x(i);
    for (int j : sys.neighbors(i)) {
      d += x(j) - x(i);
    }
    out(i) = d;
  }
  return out;
}

/// Column i holds (R_i, S_i).
using RealifiedState = Eigen::Matrix2Xd;

inline RealifiedState realify(const CVector &x) {
  RealifiedState y(2, x.size());
  y.row(0) = x.real().transpose();
  y.row(1) = x.imag().transpose();
  return y;
}

inline CVector derealify(const RealifiedState &y) {
  CVector x(y.cols());
  for (Eigen::Index i = 0; i < y.cols(); ++i) {
    x(i) = Complex(y(0, i), y(1, i));
  }
  return x;
}

/// A_i = [[0, -theta], [theta, 0]], the real form of multiplication by
/// i * theta.
inline Eigen::Matrix2d rotation_generator(double theta) {
  Eigen::Matrix2d a;
  a << 0.0, -theta, theta, 0.0;
  return a;
}

inline RealifiedState realified_rhs(const ClassicalSystem &sys,
                                    const RealifiedState &y) {
  detail::check_length(sys, y.cols());
  RealifiedState out(2, y.cols());
  for (int i = 0; i < sys.nodes(); ++i) {
    Eigen::Vector2d d = rotation_generator(sys.thetas()[i]) * y.col(i);
    for (int j : sys.neighbors(i)) {
      d += y.col(j) - y.col(i);
    }
    out.col(i) = d;
  }
  return out;
}

struct ClassicalTrajectory {
  std::vector<double> times;
  std::vector<CVector> states;
  TimeGrid grid;
};

inline ClassicalTrajectory integrate_classical(const ClassicalSystem &sys,
                                               const CVector &x0,
                                               const IntegrationOptions &opt = {}) {
  detail::check_length(sys, x0.size());
  ClassicalTrajectory out;
  out.grid = make_time_grid(opt, sys.stability_bound());
  march(
      x0, out.grid, [&](const CVector &x) { return classical_rhs(sys, x); },
      [&](std::size_t, double t, const CVector &x) {
        out.times.push_back(t);
        out.states.push_back(x);
      },
      [](const CVector &x) { return x.allFinite(); });
  return out;
}

/// f(t) = max_i |X_i(t)|^2 per sample and its largest upward step.
struct MonotonicityReport {
  std::vector<double> f;
  double max_increment = 0.0;
  std::size_t worst_sample = 0; // index of the later sample of the worst step
};

inline MonotonicityReport max_sq_norm_diag(const std::vector<CVector> &states) {
  if (states.empty()) {
    throw ValidationError("monotonicity check needs a nonempty trajectory");
  }
  MonotonicityReport r;
  r.f.reserve(states.size());
  for (const auto &x : states) {
    r.f.push_back(x.cwiseAbs2().maxCoeff());
  }
  for (std::size_t k = 1; k < r.f.size(); ++k) {
    const double inc = r.f[k] - r.f[k - 1];
    if (inc > r.max_increment) {
      r.max_increment = inc;
      r.worst_sample = k;
    }
  }
  return r;
}

inline MonotonicityReport max_sq_norm_diag(const ClassicalTrajectory &traj) {
  return max_sq_norm_diag(traj.states);
}

/// Estimated common limit modulus Z over the trailing window and the
/// largest deviation of any node modulus from it.
struct LimitModulus {
  double z = 0.0;
  double spread = 0.0;
  std::size_t tail_samples = 0;
};

inline constexpr double kDefaultTailFraction = 0.25;
inline constexpr std::size_t kMinTailSamples = 10;

inline LimitModulus limit_modulus(const std::vector<double> &times,
                                  const std::vector<CVector> &states,
                                  double tail_fraction = kDefaultTailFraction) {
  if (times.size() != states.size() || times.empty()) {
    throw ValidationError("limit modulus needs a nonempty trajectory");
  }
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw ValidationError("tail fraction must lie in (0, 1]");
  }
  const double t_end = times.back();
  const double t_start = times.front() + (1.0 - tail_fraction) * (t_end - times.front());
  std::vector<std::size_t> tail;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] >= t_start - 1e-12) {
      tail.push_back(k);
    }
  }
  if (tail.size() < kMinTailSamples) {
    throw ValidationError("tail window holds " + std::to_string(tail.size()) +
                          " samples, need at least " +
                          std::to_string(kMinTailSamples));
  }
  LimitModulus r;
  r.tail_samples = tail.size();
  for (auto k : tail) {
    r.z += states[k].cwiseAbs().mean();
  }
  r.z /= static_cast<double>(tail.size());
  for (auto k : tail) {
    const double dev = (states[k].cwiseAbs().array() - r.z).abs().maxCoeff();
    r.spread = std::max(r.spread, dev);
  }
  return r;
}

inline LimitModulus limit_modulus(const ClassicalTrajectory &traj,
                                  double tail_fraction = kDefaultTailFraction) {
  return limit_modulus(traj.times, traj.states, tail_fraction);
}

} // namespace qsync
