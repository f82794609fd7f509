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

#include <gtest/gtest.h>

#include <random>

#include "qsync/analysis.hpp"
#include "qsync/config.hpp"
#include "support.hpp"

namespace qsync {
namespace {

DensityMatrix example_state() { return normalized(DensityMatrix(3, paper_example_rho0())); }

TEST(DistinctDifferences, Cases) {
  EXPECT_TRUE(check_distinct_differences(DiagonalHamiltonian::powers_of_two(3)).distinct);
  EXPECT_TRUE(check_distinct_differences(DiagonalHamiltonian::create(1, {0, 1})).distinct);
  const auto flat = check_distinct_differences(DiagonalHamiltonian::constant(2, 1.0));
  EXPECT_FALSE(flat.distinct);
  EXPECT_GT(flat.collision_count, 0u);
  // 1 - 0 == 2 - 1.
  const auto ladder = check_distinct_differences(DiagonalHamiltonian::create(2, {0, 1, 2, 5}));
  EXPECT_FALSE(ladder.distinct);
  ASSERT_FALSE(ladder.collisions.empty());
  const auto &c = ladder.collisions.front();
  auto gap = [](const IndexPair &p) {
    const std::vector<double> l{0, 1, 2, 5};
    return l[p.x] - l[p.y];
  };
  EXPECT_EQ(gap(c.first), gap(c.second));
  EXPECT_LE(ladder.collisions.size(), kMaxListedCollisions);
}

std::size_t count_kind(const std::vector<OrbitClassification> &cs, OrbitKind k) {
  return static_cast<std::size_t>(
      std::count_if(cs.begin(), cs.end(), [&](const auto &c) { return c.kind == k; }));
}

TEST(Classification, ExampleNetwork) {
  const auto g = InteractionGraph::complete(3);
  const auto orbits = all_orbits(g);
  const auto cs = classify_orbits(orbits, DiagonalHamiltonian::powers_of_two(3));
  EXPECT_EQ(count_kind(cs, OrbitKind::CornerPersistent), 2u);
  EXPECT_EQ(count_kind(cs, OrbitKind::DiagonalAveraging), 4u);
  EXPECT_EQ(count_kind(cs, OrbitKind::ConditionallyPersistent), 0u);
  EXPECT_EQ(count_kind(cs, OrbitKind::Decohering), orbits.size() - 6);
  for (const auto &c : cs) {
    if (c.kind == OrbitKind::CornerPersistent) {
      EXPECT_EQ(c.limit, LimitForm::RotatingPhase);
      EXPECT_EQ(std::abs(c.rate), 127.0);
    }
  }
}

TEST(Classification, ConstantSpectrum) {
  const auto cs = classify_orbits(all_orbits(InteractionGraph::complete(3)),
                                  DiagonalHamiltonian::constant(3, 2.0));
  EXPECT_EQ(count_kind(cs, OrbitKind::Decohering), 0u);
  EXPECT_EQ(count_kind(cs, OrbitKind::CornerPersistent), 2u);
  EXPECT_EQ(count_kind(cs, OrbitKind::DiagonalAveraging), 4u);
  for (const auto &c : cs) {
    if (c.kind == OrbitKind::ConditionallyPersistent) {
      EXPECT_EQ(c.limit, LimitForm::RotatingMean);
      EXPECT_EQ(c.rate, 0.0);
    }
  }
  EXPECT_EQ(to_string(OrbitKind::Decohering), "decohering");
  EXPECT_EQ(to_string(LimitForm::ClassAverage), "class average");
}

TEST(Metrics, DecoherenceMeasure) {
  EXPECT_NEAR(decoherence_measure(example_state()), 54.0 / (72.0 * 72.0), 1e-15);
  EXPECT_EQ(decoherence_measure(DensityMatrix::maximally_mixed(3)), 0.0);
  CMatrix cat = CMatrix::Zero(8, 8);
  cat(0, 0) = cat(7, 7) = cat(0, 7) = cat(7, 0) = 0.5;
  EXPECT_EQ(decoherence_measure(DensityMatrix(3, cat)), 0.0);
  EXPECT_EQ(max_noncorner_coherence(DensityMatrix(3, cat)), 0.0);
  EXPECT_NEAR(max_noncorner_coherence(example_state()), 1.0 / 72.0, 1e-15);
  EXPECT_TRUE(is_corner(3, 7, 0));
  EXPECT_FALSE(is_corner(3, 7, 7));
}

TEST(DiagonalLimits, ExampleClassValues) {
  const auto lim = predicted_diagonal_limits(example_state());
  const double s = 16.0 / 9.0;
  EXPECT_NEAR(lim.class_values[0], (1.0 / 128.0 + 1.0 / 72.0) * s, 1e-15);
  EXPECT_NEAR(lim.class_values[3], (1.0 / 128.0 + 8.0 / 72.0) * s, 1e-15);
  // Weight one: indices 1, 2, 4 carry 2, 3, 5.
  EXPECT_NEAR(lim.class_values[1], (1.0 / 128.0 + 10.0 / 216.0) * s, 1e-15);
  EXPECT_NEAR(std::accumulate(lim.per_label.begin(), lim.per_label.end(), 0.0), 1.0, 1e-14);
  EXPECT_EQ(count_clusters(lim.per_label, 1e-9), 4u);
  EXPECT_EQ(binomial(5, 2), 10.0);
}

TEST(RateFit, ExactExponential) {
  std::vector<double> t, v;
  for (int i = 0; i <= 20; ++i) {
    t.push_back(0.5 * i);
    v.push_back(3.0 * std::exp(-2.0 * t.back()));
  }
  const auto fit = exponential_rate_fit(t, v);
  EXPECT_NEAR(fit.slope, -2.0, 1e-12);
  EXPECT_NEAR(std::exp(fit.intercept), 3.0, 1e-12);
  EXPECT_LE(fit.max_residual, 1e-12);
  EXPECT_EQ(fit.clipped, 0u);
  v.back() = 0.0;
  EXPECT_EQ(exponential_rate_fit(t, v).clipped, 1u);
  EXPECT_THROW(exponential_rate_fit({1.0}, {1.0}), ValidationError);
  EXPECT_THROW(exponential_rate_fit({1.0, 1.0}, {1.0, 2.0}), ValidationError);
}

TEST(ReducedGap, SymmetricStatesHaveNoGap) {
  EXPECT_LE(reduced_state_gap(DensityMatrix(3, CMatrix::Constant(8, 8, 1.0 / 8.0))), 1e-14);
  // The example diagonal singles out qubits, so its marginals differ.
  EXPECT_GT(reduced_state_gap(example_state()), 0.1);
  EXPECT_EQ(reduced_state_gap(DensityMatrix::maximally_mixed(3)), 0.0);
  const auto prod = DensityMatrix::basis_state(BasisLabel::from_bits("01"));
  EXPECT_NEAR(reduced_state_gap(prod), 2.0, 1e-14);
  EXPECT_THROW(reduced_state_gap(DensityMatrix::maximally_mixed(1)), ValidationError);
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  EXPECT_NEAR(trace_norm(m), 2.0, 1e-15);
}

TEST(PermutationAverage, MatchesDenseOracle) {
  std::mt19937_64 rng(61);
  for (int n = 1; n <= 4; ++n) {
    const DensityMatrix rho(n, testing::random_density(n, rng));
    const auto fast = permutation_average(rho);
    EXPECT_LE(max_entry_deviation(fast.matrix(), testing::dense_permutation_average(rho.matrix(), n)),
              1e-14);
    EXPECT_TRUE(validate_density(fast).ok());
    if (n >= 2) {
      EXPECT_LE(reduced_state_gap(fast), 1e-14);
    }
  }
}

TEST(Rotate, MatchesDenseExponential) {
  std::mt19937_64 rng(62);
  const auto h = testing::random_hamiltonian(2, rng);
  const DensityMatrix rho(2, testing::random_density(2, rng));
  CMatrix u = CMatrix::Zero(4, 4);
  for (int x = 0; x < 4; ++x) {
    u(x, x) = std::polar(1.0, -h.lambda(static_cast<std::uint32_t>(x)) * 0.7);
  }
  EXPECT_LE(max_entry_deviation(rotate(rho, h, 0.7).matrix(), u * rho.matrix() * u.adjoint()),
            1e-14);
}

class ExampleRun : public ::testing::Test {
protected:
  static void SetUpTestSuite() {
    traj_ = new Trajectory(integrate(example_state(), DiagonalHamiltonian::powers_of_two(3),
                                     InteractionGraph::complete(3), {1e-4, 20.0, 0.05}));
  }
  static void TearDownTestSuite() {
    delete traj_;
    traj_ = nullptr;
  }
  static Trajectory *traj_;
};
Trajectory *ExampleRun::traj_ = nullptr;

TEST_F(ExampleRun, CornerRotates) {
  const auto rep = corner_phase_check(*traj_, DiagonalHamiltonian::powers_of_two(3));
  EXPECT_LE(rep.max_deviation, 1e-7);
  EXPECT_LE(rep.max_modulus_drift, 1e-8);
  EXPECT_NEAR(rep.samples.front().modulus, 1.0 / 72.0, 1e-15);
  EXPECT_EQ(rep.samples.size(), traj_->size());
}

TEST_F(ExampleRun, CoherenceDecays) {
  EXPECT_LE(max_noncorner_coherence(traj_->states.back()), 1e-6);
  std::vector<double> t, eo;
  for (std::size_t k = 0; k < traj_->size(); ++k) {
    if (traj_->times[k] >= 2.0 - 1e-12 && traj_->times[k] <= 10.0 + 1e-12) {
      t.push_back(traj_->times[k]);
      eo.push_back(decoherence_measure(traj_->states[k]));
    }
  }
  const auto fit = exponential_rate_fit(t, eo);
  EXPECT_LT(fit.slope, 0.0);
  EXPECT_LE(fit.max_residual, 0.1);
}

TEST_F(ExampleRun, DiagonalsReachClassAverages) {
  const auto lim = predicted_diagonal_limits(example_state());
  const auto d = diagonal_of(traj_->states.back());
  for (std::size_t x = 0; x < d.size(); ++x) {
    EXPECT_NEAR(d[x], lim.per_label[x], 1e-6);
  }
  EXPECT_EQ(count_clusters(d, 1e-6), 4u);
}

TEST_F(ExampleRun, ReducedStatesAgree) {
  EXPECT_LE(reduced_state_gap(*traj_).tail_max, 1e-5);
}

TEST_F(ExampleRun, OrbitPredictionsHold) {
  const auto h = DiagonalHamiltonian::powers_of_two(3);
  const auto orbits = all_orbits(InteractionGraph::complete(3), h);
  const auto cs = classify_orbits(orbits);
  const auto &rho0 = traj_->states.front().matrix();
  const auto &rho = traj_->states.back().matrix();
  for (const auto &c : cs) {
    const auto &o = orbits[c.orbit];
    const CVector v = restrict_to(o, rho);
    if (c.limit == LimitForm::Zero) {
      EXPECT_LE(v.cwiseAbs().maxCoeff(), 1e-6);
    } else if (c.limit == LimitForm::ClassAverage) {
      const Complex mean = restrict_to(o, rho0).mean();
      EXPECT_LE((v.array() - mean).abs().maxCoeff(), 1e-6);
    } else if (c.limit == LimitForm::RotatingPhase) {
      EXPECT_NEAR(std::abs(v(0) - restrict_to(o, rho0)(0) * std::polar(1.0, c.rate * 20.0)),
                  0.0, 1e-7);
    }
  }
}

TEST_F(ExampleRun, DecoherenceEqualsOrbitSum) {
  const auto orbits = all_orbits(InteractionGraph::complete(3));
  for (std::size_t k = 0; k < traj_->size(); k += 40) {
    double sum = 0.0;
    for (const auto &o : orbits) {
      if (!o.diagonal() && !o.corner()) {
        sum += restrict_to(o, traj_->states[k].matrix()).squaredNorm();
      }
    }
    EXPECT_NEAR(sum, decoherence_measure(traj_->states[k]), 1e-15);
  }
}

TEST(Commutative, ConvergesToRotatedAverage) {
  std::mt19937_64 rng(71);
  const auto h = DiagonalHamiltonian::constant(3, 1.5);
  const DensityMatrix rho0(3, testing::random_density(3, rng));
  const auto traj = integrate(rho0, h, InteractionGraph::path(3), {0.0, 20.0, 0.5});
  const auto star = permutation_average(rho0);
  EXPECT_LE(max_entry_deviation(traj.states.back().matrix(), rotate(star, h, 20.0).matrix()),
            1e-4);
  EXPECT_LE(reduced_state_gap(traj).tail_max, 1e-5);
}

} // namespace
} // namespace qsync
