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

// Entry orbits: the classes of index pairs (x, y) closed under simultaneous
// edge transpositions (x, y) -> (u_jk(x), u_jk(y)). Each orbit's entries of
// rho evolve autonomously, so the master equation splits into one small
// complex-valued consensus system per orbit.

#include <algorithm>
#include <atomic>
#include <compare>
#include <cstdint>
#include <deque>
#include <exception>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "qsync/consensus.hpp"
#include "qsync/errors.hpp"
#include "qsync/hilbert.hpp"
#include "qsync/integrator.hpp"
#include "qsync/lindblad.hpp"

namespace qsync {

struct IndexPair {
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  bool diagonal() const { return x == y; }
  friend auto operator<=>(const IndexPair &, const IndexPair &) = default;
};

/// One orbit, its per-edge successor map and per-pair rotation rates.
struct EntryOrbit {
  int qubits = 0;
  /// Sorted ascending; pairs.front() is the canonical representative.
  std::vector<IndexPair> pairs;
  /// adjacency[e][i]: position of (u_e(x_i), u_e(y_i)) in `pairs`.
  std::vector<std::vector<std::size_t>> adjacency;
  /// theta_i = -(lambda_{x_i} - lambda_{y_i}) / hbar; empty if no
  /// Hamiltonian was attached.
  std::vector<double> thetas;

  std::size_t size() const { return pairs.size(); }
  const IndexPair &representative() const { return pairs.front(); }
  bool diagonal() const { return pairs.front().diagonal(); }

  /// Position of `p`, or size() if absent.
  std::size_t find(const IndexPair &p) const {
    auto it = std::lower_bound(pairs.begin(), pairs.end(), p);
    return it != pairs.end() && *it == p
               ? static_cast<std::size_t>(it - pairs.begin())
               : pairs.size();
  }
  bool contains(const IndexPair &p) const { return find(p) != size(); }

  /// The two corner orbits (0..0, 1..1) and (1..1, 0..0).
  bool corner() const {
    const std::uint32_t ones = (std::uint32_t{1} << qubits) - 1;
    const auto &p = pairs.front();
    return size() == 1 && ((p.x == 0 && p.y == ones) || (p.x == ones && p.y == 0));
  }
};

/// Attach rotation rates theta_i for Hamiltonian h.
inline void assign_rates(EntryOrbit &orbit, const DiagonalHamiltonian &h) {
  if (h.qubits() != orbit.qubits) {
    throw ValidationError("hamiltonian does not match orbit qubit count");
  }
  orbit.thetas.resize(orbit.size());
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    const auto &p = orbit.pairs[i];
    orbit.thetas[i] = -(h.lambda(p.x) - h.lambda(p.y)) / h.hbar();
  }
}

/// Breadth-first closure of {(x, y)} under the edge transpositions of g.
inline EntryOrbit orbit_of(const BasisLabel &x, const BasisLabel &y,
                           const InteractionGraph &g) {
  const int n = g.qubits();
  if (x.qubits() != n || y.qubits() != n) {
    throw ValidationError("label length does not match graph");
  }
  std::set<IndexPair> seen{{x.index(), y.index()}};
  std::deque<IndexPair> queue{{x.index(), y.index()}};
  while (!queue.empty()) {
    const IndexPair p = queue.front();
    queue.pop_front();
    for (const auto &e : g.edges()) {
      const IndexPair q{detail::swap_bits(n, e.j, e.k, p.x),
                        detail::swap_bits(n, e.j, e.k, p.y)};
      if (seen.insert(q).second) {
        queue.push_back(q);
      }
    }
  }
  EntryOrbit orbit;
  orbit.qubits = n;
  orbit.pairs.assign(seen.begin(), seen.end());
  for (const auto &e : g.edges()) {
    std::vector<std::size_t> succ(orbit.size());
    for (std::size_t i = 0; i < orbit.size(); ++i) {
      const auto &p = orbit.pairs[i];
      succ[i] = orbit.find({detail::swap_bits(n, e.j, e.k, p.x),
                            detail::swap_bits(n, e.j, e.k, p.y)});
    }
    orbit.adjacency.push_back(std::move(succ));
  }
  return orbit;
}

inline EntryOrbit orbit_of(const BasisLabel &x, const BasisLabel &y,
                           const InteractionGraph &g,
                           const DiagonalHamiltonian &h) {
  check_compatible(h, g);
  auto orbit = orbit_of(x, y, g);
  assign_rates(orbit, h);
  return orbit;
}

/// Partition of all 4^n index pairs into orbits, sorted by representative.
inline std::vector<EntryOrbit> all_orbits(const InteractionGraph &g) {
  const int n = g.qubits();
  const std::uint32_t dim = static_cast<std::uint32_t>(g.dim());
  std::vector<bool> covered(std::size_t{dim} * dim, false);
  std::vector<EntryOrbit> orbits;
  for (std::uint32_t x = 0; x < dim; ++x) {
    for (std::uint32_t y = 0; y < dim; ++y) {
      if (covered[std::size_t{x} * dim + y]) {
        continue;
      }
      auto orbit = orbit_of(BasisLabel(n, x), BasisLabel(n, y), g);
      for (const auto &p : orbit.pairs) {
        covered[std::size_t{p.x} * dim + p.y] = true;
      }
      orbits.push_back(std::move(orbit));
    }
  }
  // Row-major scan discovers each orbit at its smallest pair.
  return orbits;
}

inline std::vector<EntryOrbit> all_orbits(const InteractionGraph &g,
                                          const DiagonalHamiltonian &h) {
  check_compatible(h, g);
  auto orbits = all_orbits(g);
  for (auto &o : orbits) {
    assign_rates(o, h);
  }
  return orbits;
}

namespace detail {

inline void require_rates(const EntryOrbit &orbit) {
  if (orbit.thetas.size() != orbit.size()) {
    throw ValidationError("orbit has no rotation rates attached");
  }
}

} // namespace detail

/// Restriction of the master equation to one orbit:
///   v_i' = i theta_i v_i + sum_e (v_{adjacency[e][i]} - v_i).
inline CVector entrywise_rhs(const EntryOrbit &orbit, const CVector &values) {
  detail::require_rates(orbit);
  if (static_cast<std::size_t>(values.size()) != orbit.size()) {
    throw ValidationError("orbit has " + std::to_string(orbit.size()) +
                          " pairs but " + std::to_string(values.size()) +
                          " values were given");
  }
  CVector out(values.size());
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    const Complex v = values(static_cast<Eigen::Index>(i));
    Complex d = Complex(0.0, orbit.thetas[i]) * v;
    for (const auto &succ : orbit.adjacency) {
      d += values(static_cast<Eigen::Index>(succ[i])) - v;
    }
    out(static_cast<Eigen::Index>(i)) = d;
  }
  return out;
}

/// Form with explicit H and G; rates are recomputed from h.
inline CVector entrywise_rhs(const EntryOrbit &orbit, const CVector &values,
                             const DiagonalHamiltonian &h,
                             const InteractionGraph &g) {
  check_compatible(h, g);
  if (orbit.adjacency.size() != g.edges().size()) {
    throw ValidationError("orbit was built for a different graph");
  }
  EntryOrbit rated = orbit;
  assign_rates(rated, h);
  return entrywise_rhs(rated, values);
}

/// Orbit-local L: max |theta_i| + 2|E|.
inline double stability_bound(const EntryOrbit &orbit) {
  detail::require_rates(orbit);
  double m = 0.0;
  for (double t : orbit.thetas) {
    m = std::max(m, std::abs(t));
  }
  return m + 2.0 * static_cast<double>(orbit.adjacency.size());
}

/// Sampled per-pair values of one orbit.
struct OrbitTrajectory {
  std::vector<double> times;
  std::vector<CVector> values;
  TimeGrid grid;
};

inline OrbitTrajectory integrate_orbit(const EntryOrbit &orbit,
                                       const CVector &initial,
                                       const TimeGrid &grid) {
  detail::require_rates(orbit);
  if (static_cast<std::size_t>(initial.size()) != orbit.size()) {
    throw ValidationError("initial values do not match orbit size");
  }
  OrbitTrajectory out;
  out.grid = grid;
  march(
      initial, out.grid,
      [&](const CVector &v) { return entrywise_rhs(orbit, v); },
      [&](std::size_t, double t, const CVector &v) {
        out.times.push_back(t);
        out.values.push_back(v);
      },
      [](const CVector &v) { return v.allFinite(); });
  return out;
}

/// Same RK4 scheme and step rule as `integrate`, with L from the orbit.
inline OrbitTrajectory integrate_orbit(const EntryOrbit &orbit,
                                       const CVector &initial,
                                       const IntegrationOptions &opt = {}) {
  return integrate_orbit(orbit, initial,
                         make_time_grid(opt, stability_bound(orbit)));
}

/// Values of rho on the orbit's pairs, in orbit order.
inline CVector restrict_to(const EntryOrbit &orbit, const CMatrix &rho) {
  CVector v(static_cast<Eigen::Index>(orbit.size()));
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = rho(orbit.pairs[i].x, orbit.pairs[i].y);
  }
  return v;
}

/// The classical network of the orbit: one node per pair, one edge per graph
/// edge that moves a pair (edge-fixed pairs contribute nothing). Parallel
/// edges are kept, so the node equations match entrywise_rhs term by term.
inline ClassicalSystem reduced_system(const EntryOrbit &orbit) {
  detail::require_rates(orbit);
  std::vector<VertexPair> edges;
  for (const auto &succ : orbit.adjacency) {
    for (std::size_t i = 0; i < orbit.size(); ++i) {
      if (succ[i] > i) {
        edges.emplace_back(static_cast<int>(i), static_cast<int>(succ[i]));
      }
    }
  }
  return ClassicalSystem::create(static_cast<int>(orbit.size()),
                                 std::move(edges), orbit.thetas);
}

/// Orbits whose pairs touch the support of rho0, plus every diagonal orbit.
/// Entries of all other orbits start at zero and stay there.
inline std::vector<EntryOrbit> active_orbits(std::vector<EntryOrbit> orbits,
                                             const CMatrix &rho0) {
  std::vector<EntryOrbit> out;
  for (auto &o : orbits) {
    bool keep = o.diagonal();
    for (std::size_t i = 0; !keep && i < o.size(); ++i) {
      keep = rho0(o.pairs[i].x, o.pairs[i].y) != Complex(0.0, 0.0);
    }
    if (keep) {
      out.push_back(std::move(o));
    }
  }
  return out;
}

/// Integrate the master equation orbit by orbit and reassemble the dense
/// trajectory. Uses the dense step rule so grids match `integrate`. Up to
/// `threads` orbits run concurrently; assembly order is canonical.
inline Trajectory integrate_by_orbits(const DensityMatrix &rho0,
                                      const DiagonalHamiltonian &h,
                                      const InteractionGraph &g,
                                      const IntegrationOptions &opt = {},
                                      bool include_all = false,
                                      unsigned threads = 1,
                                      const Tolerances &tol = {}) {
  if (rho0.qubits() != g.qubits()) {
    throw ValidationError("initial state does not match graph");
  }
  check_compatible(h, g);
  require_valid(rho0, tol);
  const TimeGrid grid = make_time_grid(opt, stability_bound(h, g));
  auto orbits = all_orbits(g, h);
  if (!include_all) {
    orbits = active_orbits(std::move(orbits), rho0.matrix());
  }

  std::vector<OrbitTrajectory> results(orbits.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < orbits.size(); i = next++) {
      try {
        results[i] = integrate_orbit(orbits[i],
                                     restrict_to(orbits[i], rho0.matrix()), grid);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
      }
    }
  };
  const unsigned pool =
      std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(orbits.size())));
  std::vector<std::thread> workers;
  for (unsigned w = 1; w < pool; ++w) {
    workers.emplace_back(worker);
  }
  worker();
  for (auto &t : workers) {
    t.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  Trajectory traj;
  traj.meta = {g.qubits(),    grid.step,       grid.horizon,
               grid.steps,    grid.sample_every, g.to_string(),
               h.fingerprint(), 0.0};
  const auto dim = static_cast<Eigen::Index>(g.dim());
  const std::size_t samples = results.empty() ? 0 : results.front().times.size();
  traj.times = samples ? results.front().times : std::vector<double>{};
  traj.states.reserve(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    CMatrix m = CMatrix::Zero(dim, dim);
    for (std::size_t o = 0; o < orbits.size(); ++o) {
      const auto &v = results[o].values[k];
      for (std::size_t i = 0; i < orbits[o].size(); ++i) {
        m(orbits[o].pairs[i].x, orbits[o].pairs[i].y) =
            v(static_cast<Eigen::Index>(i));
      }
    }
    traj.meta.raw_hermiticity_defect =
        std::max(traj.meta.raw_hermiticity_defect,
                 (m - m.adjoint()).cwiseAbs().maxCoeff());
    traj.states.emplace_back(g.qubits(), hermitized(m));
  }
  return traj;
}

} // namespace qsync
