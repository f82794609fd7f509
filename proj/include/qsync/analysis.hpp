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

// Predictors and metrics for the long-time behaviour of the master equation:
// which orbits decohere, how the corner entries rotate, where the diagonal
// settles, and how fast the remaining coherence decays.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "qsync/errors.hpp"
#include "qsync/hilbert.hpp"
#include "qsync/lindblad.hpp"
#include "qsync/orbits.hpp"

namespace qsync {

// ---------------------------------------------------------------------------
// Distinct energy gaps

struct GapCollision {
  IndexPair first;  // (p, p') with lambda_p - lambda_p' equal to ...
  IndexPair second; // ... lambda_q - lambda_q'
};

struct DifferenceCheck {
  bool distinct = true;
  std::size_t collision_count = 0;
  std::vector<GapCollision> collisions; // at most kMaxListedCollisions
};

inline constexpr std::size_t kMaxListedCollisions = 64;

/// Whether lambda_p - lambda_p' over ordered pairs p != p' are pairwise
/// distinct. Gaps closer than `tolerance` (relative to the spread of H)
/// count as equal.
inline DifferenceCheck check_distinct_differences(const DiagonalHamiltonian &h,
                                                  double tolerance = 1e-12) {
  const auto &l = h.lambdas();
  const auto dim = static_cast<std::uint32_t>(l.size());
  struct Gap {
    double value;
    IndexPair pair;
  };
  std::vector<Gap> gaps;
  gaps.reserve(std::size_t{dim} * (dim - 1));
  for (std::uint32_t p = 0; p < dim; ++p) {
    for (std::uint32_t q = 0; q < dim; ++q) {
      if (p != q) {
        gaps.push_back({l[p] - l[q], {p, q}});
      }
    }
  }
  std::stable_sort(gaps.begin(), gaps.end(),
                   [](const Gap &a, const Gap &b) { return a.value < b.value; });
  const double scale = std::max(1.0, h.max_rate() * h.hbar());
  DifferenceCheck r;
  for (std::size_t i = 1; i < gaps.size(); ++i) {
    if (gaps[i].value - gaps[i - 1].value <= tolerance * scale) {
      r.distinct = false;
      ++r.collision_count;
      if (r.collisions.size() < kMaxListedCollisions) {
        r.collisions.push_back({gaps[i - 1].pair, gaps[i].pair});
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Orbit classification

enum class OrbitKind {
  CornerPersistent,        // singleton corner: modulus kept, phase rotates
  Decohering,              // off-diagonal, >= 2 pairs, >= 2 distinct rates
  DiagonalAveraging,       // Hamming class: entries tend to the class mean
  ConditionallyPersistent, // off-diagonal with one common rate
};

inline std::string to_string(OrbitKind k) {
  switch (k) {
  case OrbitKind::CornerPersistent:
    return "corner-persistent";
  case OrbitKind::Decohering:
    return "decohering";
  case OrbitKind::DiagonalAveraging:
    return "diagonal-averaging";
  case OrbitKind::ConditionallyPersistent:
    return "conditionally-persistent";
  }
  return "unknown";
}

enum class LimitForm {
  Zero,          // every entry -> 0
  RotatingPhase, // v(t) = v(0) exp(i theta t)
  ClassAverage,  // every entry -> mean of the initial class values
  RotatingMean,  // v_i(t) - exp(i theta t) mean(v(0)) -> 0
};

inline std::string to_string(LimitForm f) {
  switch (f) {
  case LimitForm::Zero:
    return "zero";
  case LimitForm::RotatingPhase:
    return "rotating phase";
  case LimitForm::ClassAverage:
    return "class average";
  case LimitForm::RotatingMean:
    return "rotating mean";
  }
  return "unknown";
}

struct OrbitClassification {
  std::size_t orbit = 0; // index into the classified orbit list
  OrbitKind kind = OrbitKind::Decohering;
  LimitForm limit = LimitForm::Zero;
  double rate = 0.0; // rotation rate for RotatingPhase / RotatingMean
};

inline std::size_t distinct_rate_count(const EntryOrbit &orbit,
                                       double tolerance = 1e-12) {
  detail::require_rates(orbit);
  std::vector<double> t(orbit.thetas);
  std::sort(t.begin(), t.end());
  std::size_t count = t.empty() ? 0 : 1;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i] - t[i - 1] > tolerance * std::max(1.0, std::abs(t[i]))) {
      ++count;
    }
  }
  return count;
}

inline OrbitClassification classify_orbit(const EntryOrbit &orbit,
                                          std::size_t index = 0) {
  detail::require_rates(orbit);
  OrbitClassification c;
  c.orbit = index;
  if (orbit.diagonal()) {
    c.kind = OrbitKind::DiagonalAveraging;
    c.limit = LimitForm::ClassAverage;
  } else if (orbit.size() == 1) {
    // Singleton off-diagonal orbits of a connected graph are the corners.
    c.kind = OrbitKind::CornerPersistent;
    c.limit = LimitForm::RotatingPhase;
    c.rate = orbit.thetas.front();
  } else if (distinct_rate_count(orbit) >= 2) {
    c.kind = OrbitKind::Decohering;
    c.limit = LimitForm::Zero;
  } else {
    c.kind = OrbitKind::ConditionallyPersistent;
    c.limit = LimitForm::RotatingMean;
    c.rate = orbit.thetas.front();
  }
  return c;
}

inline std::vector<OrbitClassification>
classify_orbits(const std::vector<EntryOrbit> &orbits) {
  std::vector<OrbitClassification> out;
  out.reserve(orbits.size());
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    out.push_back(classify_orbit(orbits[i], i));
  }
  return out;
}

inline std::vector<OrbitClassification>
classify_orbits(std::vector<EntryOrbit> orbits, const DiagonalHamiltonian &h) {
  for (auto &o : orbits) {
    assign_rates(o, h);
  }
  return classify_orbits(orbits);
}

// ---------------------------------------------------------------------------
// Metrics on single states

inline bool is_corner(int n, std::uint32_t x, std::uint32_t y) {
  const std::uint32_t ones = (std::uint32_t{1} << n) - 1;
  return (x == 0 && y == ones) || (x == ones && y == 0);
}

/// E_o: sum of |rho_xy|^2 over x != y, excluding the two corner entries.
inline double decoherence_measure(const DensityMatrix &rho) {
  const int n = rho.qubits();
  const auto dim = static_cast<std::uint32_t>(rho.dim());
  double sum = 0.0;
  for (std::uint32_t y = 0; y < dim; ++y) {
    for (std::uint32_t x = 0; x < dim; ++x) {
      if (x != y && !is_corner(n, x, y)) {
        sum += std::norm(rho(x, y));
      }
    }
  }
  return sum;
}

/// Largest |rho_xy| over x != y outside the corners.
inline double max_noncorner_coherence(const DensityMatrix &rho) {
  const int n = rho.qubits();
  const auto dim = static_cast<std::uint32_t>(rho.dim());
  double m = 0.0;
  for (std::uint32_t y = 0; y < dim; ++y) {
    for (std::uint32_t x = 0; x < dim; ++x) {
      if (x != y && !is_corner(n, x, y)) {
        m = std::max(m, std::abs(rho(x, y)));
      }
    }
  }
  return m;
}

inline std::vector<double> diagonal_of(const DensityMatrix &rho) {
  std::vector<double> d(rho.dim());
  for (std::uint32_t x = 0; x < d.size(); ++x) {
    d[x] = rho(x, x).real();
  }
  return d;
}

// ---------------------------------------------------------------------------
// Corner phase

struct CornerSample {
  double t = 0.0;
  Complex value;
  Complex predicted;
  double modulus = 0.0;
  double phase_error = 0.0; // arg(value / predicted), 0 if predicted == 0
};

struct CornerReport {
  std::vector<CornerSample> samples;
  double max_deviation = 0.0;     // max_t |value - predicted|
  double max_modulus_drift = 0.0; // max_t ||value| - |value(0)||
  double max_phase_error = 0.0;   // max_t |phase_error|
};

/// Compare rho(t)[0..0][1..1] with rho(0)[0..0][1..1] exp(-i (l_0 - l_1) t / hbar).
inline CornerReport corner_phase_check(const Trajectory &traj,
                                       const DiagonalHamiltonian &h) {
  if (traj.empty()) {
    throw ValidationError("corner check needs a nonempty trajectory");
  }
  const int n = traj.states.front().qubits();
  if (h.qubits() != n) {
    throw ValidationError("hamiltonian does not match trajectory");
  }
  const std::uint32_t ones = (std::uint32_t{1} << n) - 1;
  const Complex v0 = traj.states.front()(0, ones);
  const double rate = -(h.lambda(0) - h.lambda(ones)) / h.hbar();
  CornerReport r;
  r.samples.reserve(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    CornerSample s;
    s.t = traj.times[k];
    s.value = traj.states[k](0, ones);
    s.predicted = v0 * std::polar(1.0, rate * s.t);
    s.modulus = std::abs(s.value);
    s.phase_error = std::abs(s.predicted) > 0.0 && std::abs(s.value) > 0.0
                        ? std::arg(s.value / s.predicted)
                        : 0.0;
    r.max_deviation = std::max(r.max_deviation, std::abs(s.value - s.predicted));
    r.max_modulus_drift =
        std::max(r.max_modulus_drift, std::abs(s.modulus - std::abs(v0)));
    r.max_phase_error = std::max(r.max_phase_error, std::abs(s.phase_error));
    r.samples.push_back(s);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Diagonal limits

struct DiagonalLimits {
  std::vector<double> class_values; // indexed by Hamming weight 0..n
  std::vector<double> per_label;    // indexed by basis index
};

inline double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
  }
  return c;
}

/// Hamming-class averages of the initial diagonal.
inline DiagonalLimits predicted_diagonal_limits(const DensityMatrix &rho0) {
  const int n = rho0.qubits();
  DiagonalLimits out;
  out.class_values.assign(static_cast<std::size_t>(n) + 1, 0.0);
  for (std::uint32_t x = 0; x < rho0.dim(); ++x) {
    out.class_values[std::popcount(x)] += rho0(x, x).real();
  }
  for (int k = 0; k <= n; ++k) {
    out.class_values[k] /= binomial(n, k);
  }
  out.per_label.resize(rho0.dim());
  for (std::uint32_t x = 0; x < rho0.dim(); ++x) {
    out.per_label[x] = out.class_values[std::popcount(x)];
  }
  return out;
}

/// Number of distinct values in `v`, merging values within `tolerance`.
inline std::size_t count_clusters(std::vector<double> v, double tolerance) {
  std::sort(v.begin(), v.end());
  std::size_t count = v.empty() ? 0 : 1;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] - v[i - 1] > tolerance) {
      ++count;
    }
  }
  return count;
}

// ---------------------------------------------------------------------------
// Reduced states

/// Sum of singular values.
inline double trace_norm(const Eigen::Matrix2cd &m) {
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m);
  return svd.singularValues().sum();
}

/// max_{k < m} || rho^k - rho^m ||_1 for one state.
inline double reduced_state_gap(const DensityMatrix &rho,
                                const Tolerances &tol = {}) {
  const int n = rho.qubits();
  if (n < 2) {
    throw ValidationError("reduced-state gap needs at least two qubits");
  }
  std::vector<Eigen::Matrix2cd> reduced;
  for (int q = 0; q < n; ++q) {
    reduced.push_back(partial_trace_single(rho, q, tol));
  }
  double gap = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      gap = std::max(gap, trace_norm(reduced[a] - reduced[b]));
    }
  }
  return gap;
}

struct ReducedGapReport {
  std::vector<double> gaps; // one per sample
  double tail_max = 0.0;
  std::size_t tail_samples = 0;
};

inline ReducedGapReport reduced_state_gap(const Trajectory &traj,
                                          double tail_fraction = 0.25,
                                          const Tolerances &tol = {}) {
  if (traj.empty()) {
    throw ValidationError("reduced-state gap needs a nonempty trajectory");
  }
  ReducedGapReport r;
  const double t0 = traj.times.front();
  const double t_start = t0 + (1.0 - tail_fraction) * (traj.times.back() - t0);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    r.gaps.push_back(reduced_state_gap(traj.states[k], tol));
    if (traj.times[k] >= t_start - 1e-12) {
      r.tail_max = std::max(r.tail_max, r.gaps.back());
      ++r.tail_samples;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Exponential rate fit

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0; // on the log scale
  std::size_t clipped = 0;   // values raised to kLogFloor
};

inline constexpr double kLogFloor = 1e-300;

/// Least-squares line through (t, log value).
inline RateFit exponential_rate_fit(const std::vector<double> &times,
                                    const std::vector<double> &values) {
  if (times.size() != values.size() || times.size() < 2) {
    throw ValidationError("rate fit needs at least two (t, value) samples");
  }
  RateFit fit;
  const std::size_t m = times.size();
  std::vector<double> logs(m);
  for (std::size_t i = 0; i < m; ++i) {
    double v = values[i];
    if (!(v >= kLogFloor)) {
      v = kLogFloor;
      ++fit.clipped;
    }
    logs[i] = std::log(v);
  }
  const double tm = std::accumulate(times.begin(), times.end(), 0.0) / m;
  const double lm = std::accumulate(logs.begin(), logs.end(), 0.0) / m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (times[i] - tm) * (times[i] - tm);
    sxy += (times[i] - tm) * (logs[i] - lm);
  }
  if (sxx <= 0.0) {
    throw ValidationError("rate fit needs at least two distinct times");
  }
  fit.slope = sxy / sxx;
  fit.intercept = lm - fit.slope * tm;
  for (std::size_t i = 0; i < m; ++i) {
    fit.max_residual = std::max(
        fit.max_residual, std::abs(logs[i] - (fit.intercept + fit.slope * times[i])));
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Commutative regime

/// rho_* = (1/n!) sum_pi U_pi rho U_pi^dag, by explicit enumeration of all
/// qubit permutations.
inline DensityMatrix permutation_average(const DensityMatrix &rho) {
  const int n = rho.qubits();
  const auto dim = static_cast<std::uint32_t>(rho.dim());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::uint32_t> image(dim);
  CMatrix sum = CMatrix::Zero(dim, dim);
  std::size_t count = 0;
  do {
    // Qubit q of the image label carries qubit perm[q] of the source label.
    for (std::uint32_t x = 0; x < dim; ++x) {
      std::uint32_t out = 0;
      for (int q = 0; q < n; ++q) {
        if (x & detail::bit_mask(n, perm[q])) {
          out |= detail::bit_mask(n, q);
        }
      }
      image[x] = out;
    }
    for (std::uint32_t y = 0; y < dim; ++y) {
      for (std::uint32_t x = 0; x < dim; ++x) {
        sum(image[x], image[y]) += rho(x, y);
      }
    }
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return DensityMatrix(n, sum / static_cast<double>(count));
}

/// exp(-iHt/hbar) rho exp(iHt/hbar) for diagonal H.
inline DensityMatrix rotate(const DensityMatrix &rho, const DiagonalHamiltonian &h,
                            double t) {
  const auto dim = static_cast<std::uint32_t>(rho.dim());
  CMatrix out(dim, dim);
  for (std::uint32_t y = 0; y < dim; ++y) {
    for (std::uint32_t x = 0; x < dim; ++x) {
      out(x, y) = rho(x, y) *
                  std::polar(1.0, -(h.lambda(x) - h.lambda(y)) * t / h.hbar());
    }
  }
  return DensityMatrix(rho.qubits(), std::move(out));
}

/// Largest |entry| of a - b.
inline double max_entry_deviation(const CMatrix &a, const CMatrix &b) {
  return (a - b).cwiseAbs().maxCoeff();
}

} // namespace qsync
