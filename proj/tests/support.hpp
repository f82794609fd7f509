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

// Test-only oracles. Everything here is computed by a route independent of
// the library implementation it checks: dense matrix products instead of
// index permutations, symbol-multiset orbit characterization instead of BFS,
// explicit Kronecker-index summation for partial traces.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "qsync/qsync.hpp"

namespace qsync::testing {

/// -(i/hbar)(H rho - rho H) + sum_e (U_e rho U_e^dag - rho), all dense.
inline CMatrix dense_master_rhs(const CMatrix &rho, const DiagonalHamiltonian &h,
                                const InteractionGraph &g) {
  const CMatrix hd = h.dense();
  CMatrix out = Complex(0.0, -1.0 / h.hbar()) * (hd * rho - rho * hd);
  for (const auto &e : g.edges()) {
    const CMatrix u = swap_matrix(g.qubits(), e.j, e.k);
    out += u * rho * u.adjoint() - rho;
  }
  return out;
}

/// Bit of qubit q (0 = leftmost) in index x, read via string form.
inline int bit_of(int n, std::uint32_t x, int q) {
  return label_bits(n, x)[static_cast<std::size_t>(q)] - '0';
}

/// For a connected graph the edge transpositions generate every qubit
/// permutation, so (x, y) and (x', y') share an orbit iff the multisets of
/// column symbols (x_q, y_q) agree.
inline std::vector<int> column_signature(int n, std::uint32_t x, std::uint32_t y) {
  std::vector<int> sig(4, 0);
  for (int q = 0; q < n; ++q) {
    ++sig[2 * bit_of(n, x, q) + bit_of(n, y, q)];
  }
  return sig;
}

inline std::map<std::vector<int>, std::set<std::pair<std::uint32_t, std::uint32_t>>>
signature_classes(int n) {
  std::map<std::vector<int>, std::set<std::pair<std::uint32_t, std::uint32_t>>> out;
  const std::uint32_t dim = 1u << n;
  for (std::uint32_t x = 0; x < dim; ++x) {
    for (std::uint32_t y = 0; y < dim; ++y) {
      out[column_signature(n, x, y)].insert({x, y});
    }
  }
  return out;
}

/// Reduced state by explicit summation over the traced-out labels.
inline Eigen::Matrix2cd summed_partial_trace(const CMatrix &rho, int n, int keep) {
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  const std::uint32_t dim = 1u << n;
  for (std::uint32_t x = 0; x < dim; ++x) {
    for (std::uint32_t y = 0; y < dim; ++y) {
      bool others_equal = true;
      for (int q = 0; q < n && others_equal; ++q) {
        if (q != keep && bit_of(n, x, q) != bit_of(n, y, q)) {
          others_equal = false;
        }
      }
      if (others_equal) {
        out(bit_of(n, x, keep), bit_of(n, y, keep)) += rho(x, y);
      }
    }
  }
  return out;
}

/// Permutation matrix of a qubit permutation built as a product of swap
/// matrices (adjacent transpositions of a bubble sort).
inline CMatrix permutation_matrix(int n, std::vector<int> perm) {
  const auto dim = static_cast<Eigen::Index>(1u << n);
  CMatrix u = CMatrix::Identity(dim, dim);
  for (int pass = 0; pass < n; ++pass) {
    for (int q = 0; q + 1 < n; ++q) {
      if (perm[q] > perm[q + 1]) {
        std::swap(perm[q], perm[q + 1]);
        u = swap_matrix(n, q, q + 1) * u;
      }
    }
  }
  return u;
}

/// (1/n!) sum_pi U_pi rho U_pi^dag with U_pi from swap-matrix products.
inline CMatrix dense_permutation_average(const CMatrix &rho, int n) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) {
    perm[q] = q;
  }
  CMatrix sum = CMatrix::Zero(rho.rows(), rho.cols());
  int count = 0;
  do {
    const CMatrix u = permutation_matrix(n, perm);
    sum += u * rho * u.adjoint();
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum / static_cast<double>(count);
}

// ---------------------------------------------------------------------------
// Seeded random instances

inline CMatrix random_density(int n, std::mt19937_64 &rng) {
  const auto dim = static_cast<Eigen::Index>(1u << n);
  std::normal_distribution<double> gauss;
  CMatrix g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index k = 0; k < dim; ++k) {
      g(i, k) = Complex(gauss(rng), gauss(rng));
    }
  }
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace();
  return hermitized(rho);
}

inline InteractionGraph random_graph(int n, std::mt19937_64 &rng) {
  std::vector<Edge> edges;
  for (auto [a, b] : random_connected_edges(n, 0.3, rng)) {
    edges.push_back({a, b});
  }
  return InteractionGraph::create(n, edges);
}

inline DiagonalHamiltonian random_hamiltonian(int n, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> l(1u << n);
  for (auto &v : l) {
    v = u(rng);
  }
  return DiagonalHamiltonian::create(n, l);
}

struct RandomClassical {
  ClassicalSystem system;
  CVector x0;
  bool common_theta;
};

/// Seeded classical instance: N in [2, 8], spanning tree plus extra edges,
/// X0 uniform in the unit box. Even seeds share one rotation rate drawn from
/// [-2, 2]; odd seeds take pairwise-distinct even rates from [-8, 8].
inline RandomClassical random_classical(unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(2, 8);
  const int nodes = size(rng);
  auto edges = random_connected_edges(nodes, 0.3, rng);
  std::uniform_real_distribution<double> rate(-2.0, 2.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const bool common = seed % 2 == 0;
  std::vector<double> thetas(static_cast<std::size_t>(nodes));
  if (common) {
    std::fill(thetas.begin(), thetas.end(), rate(rng));
  } else {
    std::vector<double> grid{-8, -6, -4, -2, 0, 2, 4, 6, 8};
    std::shuffle(grid.begin(), grid.end(), rng);
    std::copy_n(grid.begin(), nodes, thetas.begin());
  }
  CVector x0(nodes);
  for (int i = 0; i < nodes; ++i) {
    x0(i) = Complex(unit(rng), unit(rng));
  }
  return {ClassicalSystem::create(nodes, std::move(edges), std::move(thetas)), x0,
          common};
}

} // namespace qsync::testing
