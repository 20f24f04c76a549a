#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "ladder/linalg.hpp"
#include "ladder/models.hpp"
#include "ladder/observables.hpp"

using namespace ladder;

namespace {

// Open tight-binding chain: eps_k = -2 tau cos(pi k / (L + 1)),
// phi_k(j) = sqrt(2 / (L + 1)) sin(pi k (j + 1) / (L + 1)), k = 1..L.
double chain_level(int L, int k) { return -2.0 * std::cos(pi * k / (L + 1)); }
double chain_orbital(int L, int k, int j) { return std::sqrt(2.0 / (L + 1)) * std::sin(pi * k * (j + 1) / (L + 1)); }

// Lowest energy of N fermions on two identical open chains.
double free_ladder_energy(int L, int N) {
  std::vector<double> levels;
  for (int k = 1; k <= L; ++k) {
    levels.push_back(chain_level(L, k));
    levels.push_back(chain_level(L, k));
  }
  std::sort(levels.begin(), levels.end());
  double e = 0.0;
  for (int i = 0; i < N; ++i) e += levels[i];
  return e;
}

}  // namespace

TEST(ChargeGaps, FreeFermionOracle) {
  const int L = 5;
  const ModelParams m{1.0, 0.0, L, Boundary::open};
  for (int N : {3, 4, 6}) {
    const auto rep = charge_gaps(h0(m), L, N, false);
    EXPECT_NEAR(rep.E0.at({N, 0}), free_ladder_energy(L, N), 1e-9);
    EXPECT_NEAR(rep.Delta_Qplus, free_ladder_energy(L, N + 1) - free_ladder_energy(L, N), 1e-9);
    EXPECT_NEAR(rep.Delta_Qminus, free_ladder_energy(L, N - 1) - free_ladder_energy(L, N), 1e-9);
    EXPECT_NEAR(rep.Delta_topo, (rep.Delta_Qplus + rep.Delta_Qminus) / 2, 1e-15);
  }
  EXPECT_THROW(charge_gaps(h0(m), L, 0), std::invalid_argument);
}

TEST(ChargeGaps, ParityResolved) {
  const int L = 4;
  const ModelParams m{1.0, -1.0, L, Boundary::open};
  const auto rep = charge_gaps(h_eff_pulse(m, 0.5), L, 4, true);
  EXPECT_NEAR(rep.parity_splitting, std::abs(rep.E0.at({4, 1}) - rep.E0.at({4, -1})), 1e-15);
  EXPECT_GT(rep.bulk_gap, 0.0);
  const auto all = make_ladder_basis(L, 4);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(build_sparse(h_eff_pulse(m, 0.5), all).dense());
  EXPECT_NEAR(std::min(rep.E0.at({4, 1}), rep.E0.at({4, -1})), es.eigenvalues()(0), 1e-9);
}

TEST(TwoPoint, SlaterDeterminantOracle) {
  // U0 = 0, two particles per leg: closed shells, unique ground state.
  const int L = 4;
  const ModelParams m{1.0, 0.0, L, Boundary::open};
  const auto basis = make_ladder_basis(L, 4, 1);
  const auto gs = ground_states(build_sparse(h0(m), basis), 2);
  ASSERT_GT(gs[1].energy - gs[0].energy, 0.1);
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      const double want = chain_orbital(L, 1, i) * chain_orbital(L, 1, j) + chain_orbital(L, 2, i) * chain_orbital(L, 2, j);
      EXPECT_NEAR(std::abs(two_point(gs[0].state, basis, Leg::a, i, j)), std::abs(want), 1e-9);
      EXPECT_NEAR(std::abs(two_point(gs[0].state, basis, Leg::b, i, j)), std::abs(want), 1e-9);
    }
  }
}

TEST(Entanglement, FreeFermionCorrelationOracle) {
  const int L = 4;
  const int cut = 2;
  const ModelParams m{1.0, 0.0, L, Boundary::open};
  const auto basis = make_ladder_basis(L, 4, 1);
  const auto gs = ground_states(build_sparse(h0(m), basis), 1).front();
  const auto levels = entanglement_spectrum(gs.state, basis, cut);

  // Per leg, the restricted correlation matrix of the two filled orbitals.
  RMatrix c(cut, cut);
  for (int i = 0; i < cut; ++i) {
    for (int j = 0; j < cut; ++j) {
      c(i, j) = chain_orbital(L, 1, i) * chain_orbital(L, 1, j) + chain_orbital(L, 2, i) * chain_orbital(L, 2, j);
    }
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(c);
  std::vector<double> nu;
  for (int leg = 0; leg < 2; ++leg) {
    for (int k = 0; k < cut; ++k) nu.push_back(es.eigenvalues()(k));
  }
  std::vector<double> want;
  for (int mask = 0; mask < (1 << nu.size()); ++mask) {
    double w = 1.0;
    for (std::size_t k = 0; k < nu.size(); ++k) w *= (mask >> k & 1) ? nu[k] : 1 - nu[k];
    if (w > 1e-16) want.push_back(w);
  }
  std::sort(want.rbegin(), want.rend());
  ASSERT_EQ(levels.size(), want.size());
  double total = 0.0;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    EXPECT_NEAR(levels[k].lambda, want[k], 1e-10);
    EXPECT_NEAR(levels[k].xi, -std::log(levels[k].lambda), 1e-12);
    total += levels[k].lambda;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Entanglement, ProductStateAndLabels) {
  const auto basis = make_ladder_basis(3, 3);
  CVector psi = CVector::Zero(basis->size());
  psi(*basis->index_of(make_state({0, 2, 4}))) = 1.0;
  const auto single = entanglement_spectrum(psi, basis, 1);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_NEAR(single[0].lambda, 1.0, 1e-15);
  EXPECT_EQ(single[0].charge, 1);
  EXPECT_EQ(single[0].parity, -1);

  // Weight per block equals the probability of that left charge.
  psi.setZero();
  psi(*basis->index_of(make_state({0, 2, 4}))) = std::sqrt(0.3);
  psi(*basis->index_of(make_state({2, 3, 4}))) = std::sqrt(0.7);
  const auto levels = entanglement_spectrum(psi, basis, 1);
  double q0 = 0.0;
  for (const auto& l : levels) {
    if (l.charge == 0) q0 += l.lambda;
    EXPECT_EQ(l.parity, 0);  // the state mixes leg parities
  }
  EXPECT_NEAR(q0, 0.7, 1e-14);
  EXPECT_THROW(entanglement_spectrum(psi, basis, 3), std::invalid_argument);
}

TEST(Entanglement, LevelPairing) {
  std::vector<EntanglementLevel> levels;
  for (double x : {1.0, 1.001, 2.0, 2.002, 3.0, 3.0, 4.0, 4.001}) levels.push_back({x, std::exp(-x)});
  auto pc = check_level_pairing(levels);
  EXPECT_TRUE(pc.paired);
  EXPECT_NEAR(pc.mean_spacing, 3.001 / 7, 1e-12);
  levels[1].xi = 1.5;
  EXPECT_FALSE(check_level_pairing(levels).paired);
  EXPECT_FALSE(check_level_pairing(std::vector<EntanglementLevel>(3)).paired);
}

TEST(ParityChange, ExactAtHalfPiAndBounded) {
  const ModelParams m{1.0, -0.7, 2, Boundary::open};
  const auto basis = make_ladder_basis(2, 2);
  PropagationPlan p;
  p.model = m;
  p.drive.alpha = 1.0 / 3;
  p.drive.T = 0.2;
  p.n_periods = 20;
  p.samples_per_period = 8;
  const auto s = parity_change_probability(p, basis);
  EXPECT_EQ(s.mean_probability.front(), 0.0);
  double inside = 0.0;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    EXPECT_GE(s.mean_probability[i], 0.0);
    EXPECT_LE(s.mean_probability[i], 1.0);
    if (s.stroboscopic[i]) EXPECT_LT(s.mean_probability[i], 1e-12);
    else inside = std::max(inside, s.mean_probability[i]);
  }
  // Right after a pulse each singly occupied rung sits in an equal a/b
  // superposition; the four states with two such rungs change parity with
  // probability 1/2, the two with a doubly occupied rung never: mean 1/3.
  EXPECT_NEAR(inside, 1.0 / 3, 0.02);
  EXPECT_THROW(parity_change_probability(p, make_ladder_basis(2, 2, 1)), std::invalid_argument);
}

TEST(OscillationPeriod, RecoversSampledPeriod) {
  std::vector<double> t, v;
  const double period = 3.7;
  for (int i = 0; i <= 2000; ++i) {
    t.push_back(i * 0.01);
    v.push_back(std::pow(std::sin(pi * t.back() / period), 2));
  }
  const auto got = oscillation_period(t, v);
  ASSERT_TRUE(got);
  EXPECT_NEAR(*got, period, 1e-3);
  EXPECT_FALSE(oscillation_period({0, 1}, {0.0, 1.0}));
}

TEST(OrderParameter, VanishesOnFixedLegParitySectors) {
  const ModelParams m{1.0, -1.0, 3, Boundary::open};
  const auto basis = make_ladder_basis(3, 2, 1);
  const auto gs = ground_states(build_sparse(h_eff_pulse(m, 0.5), basis), 1).front();
  for (int j = 0; j < 3; ++j) EXPECT_EQ(order_parameter(gs.state, basis, j), cplx{});
  EXPECT_NEAR(population(gs.state, basis, basis->state(0)), std::norm(gs.state(0)), 1e-15);
}
