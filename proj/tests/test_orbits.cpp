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

#include "qsync/consensus.hpp"
#include "qsync/orbits.hpp"
#include "support.hpp"

namespace qsync {
namespace {

BasisLabel L(const char *bits) { return BasisLabel::from_bits(bits); }

IndexPair P(const char *x, const char *y) { return {L(x).index(), L(y).index()}; }

TEST(Orbit, CornerIsFixedByEveryTransposition) {
  for (int n = 1; n <= 5; ++n) {
    const std::uint32_t ones = (1u << n) - 1;
    for (const auto &g : {InteractionGraph::complete(n), InteractionGraph::path(n)}) {
      const auto o = orbit_of(BasisLabel(n, 0), BasisLabel(n, ones), g);
      ASSERT_EQ(o.size(), 1u);
      EXPECT_TRUE(o.corner());
      EXPECT_FALSE(o.diagonal());
      for (const auto &succ : o.adjacency) {
        EXPECT_EQ(succ.front(), 0u);
      }
    }
  }
}

TEST(Orbit, WeightOnePairsOnTriangle) {
  const auto o = orbit_of(L("001"), L("010"), InteractionGraph::complete(3));
  const std::vector<IndexPair> expected{P("001", "010"), P("001", "100"),
                                        P("010", "001"), P("010", "100"),
                                        P("100", "001"), P("100", "010")};
  EXPECT_EQ(o.pairs, expected);
  EXPECT_FALSE(o.corner());
  EXPECT_EQ(o.representative(), P("001", "010"));
}

TEST(Orbit, DiagonalOrbitsAreWeightClasses) {
  const auto g = InteractionGraph::complete(3);
  EXPECT_EQ(orbit_of(L("001"), L("001"), g).pairs,
            (std::vector<IndexPair>{P("001", "001"), P("010", "010"), P("100", "100")}));
  EXPECT_TRUE(orbit_of(L("011"), L("011"), g).diagonal());
  EXPECT_EQ(orbit_of(L("011"), L("011"), g).size(), 3u);
}

TEST(Orbit, TwoQubitPartition) {
  const auto orbits = all_orbits(InteractionGraph::complete(2));
  // Singletons 00/00, 11/11, 00/11, 11/00; pairs of size two for the rest.
  std::vector<std::vector<IndexPair>> got;
  for (const auto &o : orbits) {
    got.push_back(o.pairs);
  }
  const std::vector<std::vector<IndexPair>> expected{
      {P("00", "00")},
      {P("00", "01"), P("00", "10")},
      {P("00", "11")},
      {P("01", "00"), P("10", "00")},
      {P("01", "01"), P("10", "10")},
      {P("01", "10"), P("10", "01")},
      {P("01", "11"), P("10", "11")},
      {P("11", "00")},
      {P("11", "01"), P("11", "10")},
      {P("11", "11")}};
  EXPECT_EQ(got, expected);
}

void check_partition(const InteractionGraph &g) {
  const int n = g.qubits();
  const auto dim = static_cast<std::uint32_t>(g.dim());
  const auto orbits = all_orbits(g);
  std::vector<int> owner(dim * dim, -1);
  for (std::size_t k = 0; k < orbits.size(); ++k) {
    const auto &o = orbits[k];
    EXPECT_TRUE(std::is_sorted(o.pairs.begin(), o.pairs.end()));
    if (k > 0) {
      EXPECT_LT(orbits[k - 1].representative(), o.representative());
    }
    for (std::size_t i = 0; i < o.size(); ++i) {
      const auto &p = o.pairs[i];
      auto &slot = owner[p.x * dim + p.y];
      EXPECT_EQ(slot, -1) << "pair in two orbits";
      slot = static_cast<int>(k);
      for (std::size_t e = 0; e < g.edges().size(); ++e) {
        const auto &edge = g.edges()[e];
        const auto [a, b] = conjugate_entry(edge.j, edge.k, BasisLabel(n, p.x),
                                            BasisLabel(n, p.y));
        const std::size_t at = o.find({a.index(), b.index()});
        ASSERT_LT(at, o.size()) << "orbit not closed";
        EXPECT_EQ(o.adjacency[e][i], at);
      }
    }
  }
  EXPECT_TRUE(std::none_of(owner.begin(), owner.end(), [](int v) { return v < 0; }));
}

TEST(Orbit, PartitionAndClosure) {
  for (int n = 1; n <= 4; ++n) {
    check_partition(InteractionGraph::complete(n));
    check_partition(InteractionGraph::path(n));
  }
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 8; ++trial) {
    check_partition(testing::random_graph(2 + trial % 3, rng));
  }
}

// For a connected graph the transpositions generate the whole symmetric
// group, so orbits are classes of equal column multisets.
void check_against_signatures(const InteractionGraph &g) {
  const auto classes = testing::signature_classes(g.qubits());
  const auto orbits = all_orbits(g);
  ASSERT_EQ(orbits.size(), classes.size());
  for (const auto &o : orbits) {
    const auto &p = o.representative();
    const auto &cls = classes.at(testing::column_signature(g.qubits(), p.x, p.y));
    std::set<std::pair<std::uint32_t, std::uint32_t>> got;
    for (const auto &q : o.pairs) {
      got.emplace(q.x, q.y);
    }
    EXPECT_EQ(got, cls);
  }
}

TEST(Orbit, MatchesColumnMultisetClasses) {
  for (int n = 1; n <= 5; ++n) {
    check_against_signatures(InteractionGraph::path(n));
  }
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    check_against_signatures(testing::random_graph(2 + trial % 3, rng));
  }
}

TEST(Orbit, NonCornerOffDiagonalOrbitsHaveAtLeastTwoPairs) {
  for (int n = 1; n <= 5; ++n) {
    for (const auto &o : all_orbits(InteractionGraph::path(n))) {
      if (!o.diagonal() && !o.corner()) {
        EXPECT_GE(o.size(), 2u);
      }
    }
  }
}

TEST(Orbit, ConjugateSymmetry) {
  const auto g = InteractionGraph::complete(3);
  for (const auto &o : all_orbits(g)) {
    const auto &p = o.representative();
    const auto t = orbit_of(BasisLabel(3, p.y), BasisLabel(3, p.x), g);
    ASSERT_EQ(t.size(), o.size());
    for (const auto &q : o.pairs) {
      EXPECT_TRUE(t.contains({q.y, q.x}));
    }
  }
}

TEST(Orbit, Rates) {
  const auto h = DiagonalHamiltonian::powers_of_two(3);
  const auto g = InteractionGraph::complete(3);
  const auto corner = orbit_of(L("000"), L("111"), g, h);
  EXPECT_EQ(corner.thetas, std::vector<double>{127.0});
  EXPECT_EQ(stability_bound(corner), 127.0 + 6.0);
  EXPECT_THROW(stability_bound(orbit_of(L("000"), L("111"), g)), ValidationError);
  EXPECT_THROW(orbit_of(L("00"), L("11"), g), ValidationError);
}

TEST(EntrywiseRhs, CornerRotatesOnly) {
  const auto h = DiagonalHamiltonian::powers_of_two(3);
  const auto corner = orbit_of(L("000"), L("111"), InteractionGraph::complete(3), h);
  CVector v(1);
  v(0) = Complex(0.25, -0.5);
  EXPECT_EQ(entrywise_rhs(corner, v)(0), Complex(0.0, 127.0) * v(0));
  EXPECT_THROW(entrywise_rhs(corner, CVector::Zero(2)), ValidationError);
}

TEST(EntrywiseRhs, MatchesMasterEquationOnEveryOrbit) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 1 + trial % 4;
    const auto g = testing::random_graph(n, rng);
    const auto h = testing::random_hamiltonian(n, rng);
    const CMatrix rho = testing::random_density(n, rng);
    const CMatrix full = MasterEquation(h, g)(rho);
    for (const auto &o : all_orbits(g)) {
      const CVector local = entrywise_rhs(o, restrict_to(o, rho), h, g);
      EXPECT_LE((local - restrict_to(o, full)).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(ReducedSystem, SameVectorField) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + trial % 3;
    const auto g = testing::random_graph(n, rng);
    const auto h = testing::random_hamiltonian(n, rng);
    for (const auto &o : all_orbits(g, h)) {
      const auto sys = reduced_system(o);
      EXPECT_EQ(sys.nodes(), static_cast<int>(o.size()));
      CVector v(static_cast<Eigen::Index>(o.size()));
      for (auto &c : v) {
        c = Complex(z(rng), z(rng));
      }
      EXPECT_LE((classical_rhs(sys, v) - entrywise_rhs(o, v)).cwiseAbs().maxCoeff(),
                1e-12);
    }
  }
}

TEST(ReducedSystem, TrajectoriesAgree) {
  const auto h = DiagonalHamiltonian::powers_of_two(3);
  const auto g = InteractionGraph::complete(3);
  const IntegrationOptions opt{5e-4, 2.0, 0.1};
  for (const auto &o : all_orbits(g, h)) {
    const CVector init = CVector::Constant(static_cast<Eigen::Index>(o.size()),
                                           Complex(1.0 / 72.0, 0.0));
    const auto sys = reduced_system(o);
    const auto a = integrate_orbit(o, init, make_time_grid(opt, stability_bound(o)));
    const auto b = integrate_classical(sys, init, opt);
    ASSERT_EQ(a.times, b.times);
    for (std::size_t k = 0; k < a.times.size(); ++k) {
      EXPECT_LE((a.values[k] - b.states[k]).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(IntegrateOrbit, LimitBehaviour) {
  const auto h = DiagonalHamiltonian::powers_of_two(3);
  const auto g = InteractionGraph::complete(3);
  const IntegrationOptions opt{0.0, 20.0, 0.5};
  // Corner: constant modulus, phase 127 t.
  const auto corner = orbit_of(L("000"), L("111"), g, h);
  CVector c0(1);
  c0(0) = 1.0;
  const auto ct = integrate_orbit(corner, c0, IntegrationOptions{1e-4, 1.0, 0.5});
  EXPECT_NEAR(std::abs(ct.values.back()(0) - std::polar(1.0, 127.0)), 0.0, 1e-7);
  // Diagonal: converges to the class mean.
  const auto diag = orbit_of(L("001"), L("001"), g, h);
  CVector d0(3);
  d0 << 0.1, 0.2, 0.6;
  const auto dt = integrate_orbit(diag, d0, opt);
  for (const auto &c : dt.values.back()) {
    EXPECT_NEAR(std::abs(c - Complex(0.3, 0.0)), 0.0, 1e-12);
  }
  // Off-diagonal with distinct rates: decays.
  const auto off = orbit_of(L("001"), L("010"), g, h);
  const auto ot = integrate_orbit(off, CVector::Ones(6), opt);
  EXPECT_LE(ot.values.back().cwiseAbs().maxCoeff(), 1e-6);
}

TEST(ByOrbits, MatchesFullIntegration) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 4; ++trial) {
    const int n = 1 + trial % 4;
    const auto g = testing::random_graph(n, rng);
    const auto h = testing::random_hamiltonian(n, rng);
    const DensityMatrix rho0(n, testing::random_density(n, rng));
    const IntegrationOptions opt{0.0, 3.0, 0.1};
    const auto full = integrate(rho0, h, g, opt);
    const auto orb = integrate_by_orbits(rho0, h, g, opt, false, 1 + trial % 3);
    ASSERT_EQ(full.times, orb.times);
    for (std::size_t k = 0; k < full.size(); ++k) {
      EXPECT_LE((full.states[k].matrix() - orb.states[k].matrix()).cwiseAbs().maxCoeff(),
                1e-12);
    }
  }
}

TEST(ByOrbits, ThreadCountDoesNotChangeResult) {
  const auto h = DiagonalHamiltonian::powers_of_two(3);
  const auto g = InteractionGraph::complete(3);
  std::mt19937_64 rng(2);
  const DensityMatrix rho0(3, testing::random_density(3, rng));
  const IntegrationOptions opt{0.0, 1.0, 0.1};
  const auto a = integrate_by_orbits(rho0, h, g, opt, true, 1);
  const auto b = integrate_by_orbits(rho0, h, g, opt, true, 4);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a.states[k].matrix(), b.states[k].matrix());
  }
}

TEST(ByOrbits, SkipsInactiveOrbits) {
  const auto g = InteractionGraph::complete(2);
  const auto active = active_orbits(all_orbits(g), CMatrix::Identity(4, 4) / 4.0);
  EXPECT_EQ(active.size(), 3u); // the diagonal orbits
}

} // namespace
} // namespace qsync
