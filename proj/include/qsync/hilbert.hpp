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

// Computational-basis bookkeeping for n-qubit networks.
//
// Qubits are 0-based in this API; qubit 0 is the leftmost bit of a label and
// the most significant bit of its integer index, so "011" at n = 3 is index 3.
// Configuration files and the CLI speak 1-based qubit numbers and convert at
// the parsing boundary.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qsync/errors.hpp"
#include "qsync/graph.hpp"

namespace qsync {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Dense representation cap: 2^10 = 1024 basis states.
inline constexpr int kMaxQubits = 10;

inline void check_qubit_count(int n) {
  if (n < 1 || n > kMaxQubits) {
    throw ValidationError("qubit count " + std::to_string(n) +
                          " outside supported range [1, " +
                          std::to_string(kMaxQubits) + "]");
  }
}

inline std::size_t dimension(int n) {
  check_qubit_count(n);
  return std::size_t{1} << n;
}

namespace detail {

inline std::uint32_t bit_mask(int n, int qubit) {
  return std::uint32_t{1} << (n - 1 - qubit);
}

/// Exchange the bits of qubits j and k in a raw index.
inline std::uint32_t swap_bits(int n, int j, int k, std::uint32_t index) {
  const std::uint32_t mj = bit_mask(n, j);
  const std::uint32_t mk = bit_mask(n, k);
  const bool bj = (index & mj) != 0;
  const bool bk = (index & mk) != 0;
  return bj == bk ? index : index ^ (mj | mk);
}

inline void check_qubit_pair(int n, int j, int k) {
  if (j < 0 || j >= n || k < 0 || k >= n) {
    throw std::out_of_range("qubit pair (" + std::to_string(j) + ", " +
                            std::to_string(k) + ") out of range for n = " +
                            std::to_string(n));
  }
  if (j == k) {
    throw std::invalid_argument("transposition needs two distinct qubits");
  }
}

} // namespace detail

/// An n-bit computational basis label, equivalently an index in [0, 2^n).
class BasisLabel {
public:
  BasisLabel(int n, std::uint32_t index) : n_(n), index_(index) {
    check_qubit_count(n);
    if (index >= (std::uint32_t{1} << n)) {
      throw std::out_of_range("basis index " + std::to_string(index) +
                              " out of range for n = " + std::to_string(n));
    }
  }

  /// Parse a string of '0'/'1' characters, leftmost character is qubit 0.
  static BasisLabel from_bits(std::string_view bits) {
    const int n = static_cast<int>(bits.size());
    check_qubit_count(n);
    std::uint32_t index = 0;
    for (char c : bits) {
      if (c != '0' && c != '1') {
        throw ValidationError("basis label '" + std::string(bits) +
                              "' contains a non-binary character");
      }
      index = (index << 1) | static_cast<std::uint32_t>(c - '0');
    }
    return BasisLabel(n, index);
  }

  int qubits() const { return n_; }
  std::uint32_t index() const { return index_; }

  int bit(int qubit) const {
    if (qubit < 0 || qubit >= n_) {
      throw std::out_of_range("qubit " + std::to_string(qubit) +
                              " out of range");
    }
    return (index_ & detail::bit_mask(n_, qubit)) != 0 ? 1 : 0;
  }

  std::string bits() const {
    std::string out(static_cast<std::size_t>(n_), '0');
    for (int q = 0; q < n_; ++q) {
      if (index_ & detail::bit_mask(n_, q)) {
        out[static_cast<std::size_t>(q)] = '1';
      }
    }
    return out;
  }

  int hamming_weight() const { return std::popcount(index_); }

  friend auto operator<=>(const BasisLabel &, const BasisLabel &) = default;

private:
  int n_;
  std::uint32_t index_;
};

inline std::string label_bits(int n, std::uint32_t index) {
  return BasisLabel(n, index).bits();
}

/// u_jk(x): the label with the bits of qubits j and k exchanged.
inline BasisLabel apply_transposition(int j, int k, const BasisLabel &x) {
  detail::check_qubit_pair(x.qubits(), j, k);
  return BasisLabel(x.qubits(), detail::swap_bits(x.qubits(), j, k, x.index()));
}

/// Image of the matrix unit |x><y| under conjugation by the swap of j and k.
inline std::pair<BasisLabel, BasisLabel>
conjugate_entry(int j, int k, const BasisLabel &x, const BasisLabel &y) {
  if (x.qubits() != y.qubits()) {
    throw ValidationError("labels of different lengths");
  }
  return {apply_transposition(j, k, x), apply_transposition(j, k, y)};
}

/// Permutation matrix of the swapping operator U_jk; column x has its single
/// 1 in row u_jk(x).
inline CMatrix swap_matrix(int n, int j, int k) {
  const auto dim = dimension(n);
  detail::check_qubit_pair(n, j, k);
  CMatrix u = CMatrix::Zero(static_cast<Eigen::Index>(dim),
                            static_cast<Eigen::Index>(dim));
  for (std::uint32_t x = 0; x < dim; ++x) {
    u(detail::swap_bits(n, j, k, x), x) = 1.0;
  }
  return u;
}

/// Undirected edge between two distinct qubits, stored with j < k.
struct Edge {
  int j = 0;
  int k = 0;
  friend auto operator<=>(const Edge &, const Edge &) = default;
};

/// Undirected, connected interaction graph on qubits {0..n-1}. Edge order is
/// preserved as given; it fixes the summation order of the swap terms.
class InteractionGraph {
public:
  static InteractionGraph create(int n, std::vector<Edge> edges) {
    check_qubit_count(n);
    std::vector<VertexPair> pairs;
    for (auto &e : edges) {
      if (e.j < 0 || e.j >= n || e.k < 0 || e.k >= n) {
        throw ValidationError("edge {" + std::to_string(e.j + 1) + "," +
                              std::to_string(e.k + 1) +
                              "} references a qubit outside 1.." +
                              std::to_string(n));
      }
      if (e.j == e.k) {
        throw ValidationError("self-loop on qubit " + std::to_string(e.j + 1));
      }
      if (e.j > e.k) {
        std::swap(e.j, e.k);
      }
      if (std::find(pairs.begin(), pairs.end(), VertexPair{e.j, e.k}) !=
          pairs.end()) {
        throw ValidationError("duplicate edge {" + std::to_string(e.j + 1) +
                              "," + std::to_string(e.k + 1) + "}");
      }
      pairs.emplace_back(e.j, e.k);
    }
    if (!is_connected(n, pairs)) {
      throw ValidationError("interaction graph on " + std::to_string(n) +
                            " qubits is not connected");
    }
    InteractionGraph g;
    g.n_ = n;
    g.edges_ = std::move(edges);
    return g;
  }

  static InteractionGraph complete(int n) {
    std::vector<Edge> edges;
    for (int j = 0; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        edges.push_back({j, k});
      }
    }
    return create(n, std::move(edges));
  }

  static InteractionGraph path(int n) {
    std::vector<Edge> edges;
    for (int j = 0; j + 1 < n; ++j) {
      edges.push_back({j, j + 1});
    }
    return create(n, std::move(edges));
  }

  int qubits() const { return n_; }
  std::size_t dim() const { return std::size_t{1} << n_; }
  const std::vector<Edge> &edges() const { return edges_; }

  /// 1-based textual form, e.g. "{1,2},{2,3}".
  std::string to_string() const {
    std::string out;
    for (const auto &e : edges_) {
      if (!out.empty()) {
        out += ',';
      }
      out += "{" + std::to_string(e.j + 1) + "," + std::to_string(e.k + 1) + "}";
    }
    return out;
  }

private:
  InteractionGraph() = default;
  int n_ = 1;
  std::vector<Edge> edges_;
};

/// Square complex matrix of side 2^n interpreted as a density operator. The
/// density invariants are not enforced here; see validate_density.
class DensityMatrix {
public:
  DensityMatrix(int n, CMatrix entries) : n_(n), entries_(std::move(entries)) {
    const auto dim = static_cast<Eigen::Index>(dimension(n));
    if (entries_.rows() != dim || entries_.cols() != dim) {
      throw ValidationError("density matrix must be " + std::to_string(dim) +
                            "x" + std::to_string(dim) + " for n = " +
                            std::to_string(n) + ", got " +
                            std::to_string(entries_.rows()) + "x" +
                            std::to_string(entries_.cols()));
    }
  }

  static DensityMatrix from_matrix(CMatrix entries) {
    const auto rows = entries.rows();
    if (rows < 2 || !std::has_single_bit(static_cast<std::uint64_t>(rows))) {
      throw ValidationError("matrix side " + std::to_string(rows) +
                            " is not a power of two >= 2");
    }
    const int n = std::countr_zero(static_cast<std::uint64_t>(rows));
    return DensityMatrix(n, std::move(entries));
  }

  static DensityMatrix maximally_mixed(int n) {
    const auto dim = static_cast<Eigen::Index>(dimension(n));
    return DensityMatrix(n, CMatrix::Identity(dim, dim) / static_cast<double>(dim));
  }

  /// |x><x| for a basis label.
  static DensityMatrix basis_state(const BasisLabel &x) {
    const auto dim = static_cast<Eigen::Index>(dimension(x.qubits()));
    CMatrix m = CMatrix::Zero(dim, dim);
    m(x.index(), x.index()) = 1.0;
    return DensityMatrix(x.qubits(), std::move(m));
  }

  int qubits() const { return n_; }
  std::size_t dim() const { return std::size_t{1} << n_; }
  const CMatrix &matrix() const { return entries_; }
  Complex operator()(std::uint32_t x, std::uint32_t y) const {
    return entries_(x, y);
  }
  Complex trace() const { return entries_.trace(); }

private:
  int n_;
  CMatrix entries_;
};

struct Tolerances {
  double hermiticity = 1e-9;
  double trace = 1e-9;
  double psd = 1e-8;
};

struct DensityReport {
  double hermiticity_defect = 0.0; // max_{x,y} |M_xy - conj(M_yx)|
  Complex trace{0.0, 0.0};
  double trace_defect = 0.0; // |tr M - 1|
  double min_eigenvalue = 0.0; // of the Hermitian part
  bool hermitian = false;
  bool unit_trace = false;
  bool positive = false;

  bool ok() const { return hermitian && unit_trace && positive; }
};

inline CMatrix hermitized(const CMatrix &m) { return (m + m.adjoint()) / 2.0; }

inline DensityReport validate_density(const CMatrix &m,
                                      const Tolerances &tol = {}) {
  if (m.rows() != m.cols()) {
    throw ValidationError("density matrix must be square");
  }
  DensityReport r;
  r.hermiticity_defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
  r.trace = m.trace();
  r.trace_defect = std::abs(r.trace - 1.0);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitized(m),
                                             Eigen::EigenvaluesOnly);
  r.min_eigenvalue = eig.eigenvalues().minCoeff();
  r.hermitian = r.hermiticity_defect <= tol.hermiticity;
  r.unit_trace = r.trace_defect <= tol.trace;
  r.positive = r.min_eigenvalue >= -tol.psd;
  return r;
}

inline DensityReport validate_density(const DensityMatrix &rho,
                                      const Tolerances &tol = {}) {
  return validate_density(rho.matrix(), tol);
}

inline std::string describe(const DensityReport &r) {
  return "hermiticity defect " + std::to_string(r.hermiticity_defect) +
         ", trace " + std::to_string(r.trace.real()) +
         (r.trace.imag() != 0.0 ? "+" + std::to_string(r.trace.imag()) + "i"
                                : std::string{}) +
         " (defect " + std::to_string(r.trace_defect) +
         "), min eigenvalue " + std::to_string(r.min_eigenvalue);
}

/// Throws ValidationError unless rho passes every tolerance.
inline void require_valid(const DensityMatrix &rho, const Tolerances &tol = {}) {
  const auto r = validate_density(rho, tol);
  if (!r.ok()) {
    throw ValidationError("invalid density matrix: " + describe(r));
  }
}

/// rho / tr(rho). Throws when the trace is numerically zero.
inline DensityMatrix normalized(const DensityMatrix &rho) {
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-300) {
    throw ValidationError("cannot normalize a matrix with zero trace");
  }
  return DensityMatrix(rho.qubits(), rho.matrix() / tr);
}

/// Reduced state of one qubit: trace out every other qubit.
inline Eigen::Matrix2cd partial_trace_single(const DensityMatrix &rho, int keep,
                                             const Tolerances &tol = {}) {
  const int n = rho.qubits();
  if (keep < 0 || keep >= n) {
    throw std::out_of_range("qubit " + std::to_string(keep) +
                            " out of range for n = " + std::to_string(n));
  }
  require_valid(rho, tol);
  const std::uint32_t mask = detail::bit_mask(n, keep);
  const std::uint32_t low = mask - 1;
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  const std::uint32_t rest_count = std::uint32_t{1} << (n - 1);
  for (std::uint32_t rest = 0; rest < rest_count; ++rest) {
    // Insert a zero bit at the kept qubit's position.
    const std::uint32_t base = ((rest & ~low) << 1) | (rest & low);
    const std::uint32_t idx[2] = {base, base | mask};
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        out(a, b) += rho(idx[a], idx[b]);
      }
    }
  }
  return out;
}

} // namespace qsync
