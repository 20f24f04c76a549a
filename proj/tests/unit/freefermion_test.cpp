#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ladder/freefermion.hpp"
#include "ladder/linalg.hpp"

using namespace ladder;

TEST(Bdg, PeriodicSpectrumMatchesDispersion) {
  for (const KitaevParams p : {KitaevParams{1.0, 0.3, 0.8, 10, Boundary::periodic},
                               KitaevParams{0.7, -2.1, 0.4, 9, Boundary::periodic}}) {
    const auto sol = kitaev_spectrum(p);
    std::vector<double> want;
    for (int n = 0; n < p.L; ++n) {
      const double k = 2 * pi * n / p.L;
      want.push_back(std::hypot(2 * p.t * std::cos(k) + p.mu, 2 * p.Delta * std::sin(k)));
    }
    std::sort(want.begin(), want.end());
    auto closed = kitaev_periodic_dispersion(p);
    std::sort(closed.begin(), closed.end());
    for (int i = 0; i < p.L; ++i) {
      EXPECT_NEAR(sol.energies(i), want[i], 1e-12);
      EXPECT_NEAR(closed[i], want[i], 1e-14);
    }
    EXPECT_LT(sol.particle_hole_defect, 1e-12);
  }
}

TEST(Bdg, GroundEnergyMatchesExactDiagonalization) {
  for (const KitaevParams p : {KitaevParams{1.0, 0.5, 0.7, 6, Boundary::open}, KitaevParams{1.0, 2.5, 0.3, 7, Boundary::open},
                               KitaevParams{1.0, -0.4, 1.2, 6, Boundary::periodic}}) {
    const double ed = std::min(kitaev_ground_state_ed(p, 1).energy, kitaev_ground_state_ed(p, -1).energy);
    EXPECT_NEAR(kitaev_spectrum(p).ground_energy, ed, 1e-10);
  }
}

TEST(Bdg, ManyBodyMatrixIsQuadraticForm) {
  // Brute-force check of the many-body Hamiltonian on one matrix element:
  // the pairing term creates a pair on a bond with amplitude -Delta.
  const KitaevParams p{1.0, 0.0, 0.6, 3, Boundary::open};
  const auto basis = make_chain_parity_basis(3, 1);
  const CMatrix h = build_sparse(kitaev_terms(p), basis).dense();
  const auto vac = *basis->index_of(FockState{0});
  const auto pair = *basis->index_of(make_state({0, 1}));
  EXPECT_NEAR(std::abs(h(pair, vac)), 0.6, 1e-15);
  EXPECT_LT(hermiticity_defect(h), 1e-15);
}

TEST(Majorana, SweetSpotAndExponentialSplitting) {
  EXPECT_LT(majorana_splitting({1.0, 0.0, 1.0, 30, Boundary::open}), 1e-12);
  std::vector<int> sizes{8, 10, 12, 14};
  std::vector<double> split;
  for (int L : sizes) split.push_back(majorana_splitting({1.0, 0.5, 0.3, L, Boundary::open}));
  EXPECT_LT(exponential_rate(sizes, split), -0.05);
  EXPECT_GT(majorana_splitting({1.0, 3.0, 1.0, 20, Boundary::open}), 0.5);
  EXPECT_NEAR(exponential_rate({1, 2, 3}, {std::exp(-0.5), std::exp(-1.0), std::exp(-1.5)}), -0.5, 1e-14);
}

TEST(Phase, GapClosesAtTwiceHopping) {
  EXPECT_LT(kitaev_bulk_gap({1.0, 2.0, 0.5, 10, Boundary::open}), 1e-9);
  EXPECT_LT(kitaev_bulk_gap({1.0, -2.0, 0.5, 10, Boundary::open}), 1e-9);
  EXPECT_NEAR(kitaev_bulk_gap({1.0, 3.0, 0.5, 10, Boundary::open}), 1.0, 1e-9);
  EXPECT_EQ(phase_classify({1.0, 1.9, 1.0}), KitaevPhase::topological);
  EXPECT_EQ(phase_classify({1.0, 2.1, 1.0}), KitaevPhase::trivial);
  EXPECT_EQ(phase_classify({1.0, 2.0, 1.0}), KitaevPhase::critical);
}

TEST(Correlation, ProjectorOntoOccupiedModes) {
  for (const KitaevParams p : {KitaevParams{1.0, 0.0, 1.0, 8}, KitaevParams{1.0, 0.4, 0.6, 9}}) {
    const CMatrix g = ground_correlation(p);
    EXPECT_LT(hermiticity_defect(g), 1e-12);
    EXPECT_LT((g * g - g).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(g.trace().real(), p.L, 1e-12);
  }
}

TEST(Correlation, EntanglementMatchesManyBody) {
  for (const KitaevParams p : {KitaevParams{1.0, 0.5, 0.7, 8}, KitaevParams{1.0, 2.6, 0.5, 8}}) {
    const auto even = kitaev_ground_state_ed(p, 1);
    const auto odd = kitaev_ground_state_ed(p, -1);
    const auto& gs = even.energy <= odd.energy ? even : odd;
    for (int cut : {2, 4}) {
      const auto a = entanglement_spectrum_modes(gs.state, gs.basis, cut);
      const auto b = correlation_entanglement(p, cut);
      const std::size_t n = std::min(a.size(), b.size());
      ASSERT_GT(n, 2u);
      for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(a[k].lambda, b[k].lambda, 1e-8);
    }
  }
}

TEST(Correlation, SweetSpotEntanglementIsDoubled) {
  const auto levels = correlation_entanglement({1.0, 0.0, 1.0, 30}, 15);
  ASSERT_EQ(levels.size(), 2u);
  EXPECT_NEAR(levels[0].lambda, 0.5, 1e-12);
  EXPECT_NEAR(levels[1].lambda, 0.5, 1e-12);
}

TEST(Kitaev, Validation) {
  EXPECT_THROW(validate(KitaevParams{1.0, 0.0, 1.0, 1}), std::invalid_argument);
  EXPECT_THROW(validate(KitaevParams{1.0, 0.0, 1.0, 2, Boundary::periodic}), std::invalid_argument);
  EXPECT_THROW(correlation_entanglement({1.0, 0.0, 1.0, 8, Boundary::periodic}, 4), std::invalid_argument);
}
