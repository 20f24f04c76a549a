#include <gtest/gtest.h>

#include <cmath>

#include "ladder/linalg.hpp"
#include "ladder/models.hpp"

using namespace ladder;

namespace {

CMatrix dense(const TermList& h, const BasisPtr& b) { return build_sparse(h, b).dense(); }

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// J0 by its power series.
double bessel_j0_series(double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= -(x * x / 4.0) / (double(k) * k);
    sum += term;
  }
  return sum;
}

}  // namespace

TEST(Spin, RungAlgebra) {
  const auto basis = make_ladder_basis(3, 3);
  const auto s = spin_totals(basis);
  const CMatrix x = s.Jx.dense(), y = s.Jy.dense(), z = s.Jz.dense();
  EXPECT_LT(max_abs(commutator(x, y) - I * z), 1e-14);
  EXPECT_LT(max_abs(commutator(y, z) - I * x), 1e-14);
  EXPECT_LT(max_abs(commutator(z, x) - I * y), 1e-14);
  // Jz = (N_a - N_b) / 2 on each rung.
  const auto na = dense(density(Leg::a, 0) + density(Leg::a, 1) + density(Leg::a, 2), basis);
  const auto nb = dense(density(Leg::b, 0) + density(Leg::b, 1) + density(Leg::b, 2), basis);
  EXPECT_LT(max_abs(z - 0.5 * (na - nb)), 1e-15);
}

TEST(Bch, ClosedFormMatchesConjugation) {
  for (int L : {2, 3}) {
    const ModelParams m{1.0, -0.7, L, Boundary::open};
    for (int N = 0; N <= 2 * L; ++N) {
      const auto basis = make_ladder_basis(L, N);
      for (double eta : {0.0, 0.3, pi / 4, pi / 2, 2.0}) {
        EXPECT_LT(max_abs(dense(h1_closed_form(m, eta), basis) - h1_by_conjugation(m, eta, basis)), 1e-12)
            << "L=" << L << " N=" << N << " eta=" << eta;
      }
    }
  }
}

TEST(Bch, PeriodicBoundary) {
  const ModelParams m{1.0, 0.9, 3, Boundary::periodic};
  const auto basis = make_ladder_basis(3, 3);
  EXPECT_LT(max_abs(dense(h1_closed_form(m, 0.8), basis) - h1_by_conjugation(m, 0.8, basis)), 1e-12);
}

TEST(Bch, SecondRotationClosedForm) {
  for (int L : {2, 3}) {
    const ModelParams m{1.0, -0.7, L, Boundary::open};
    ModelParams flipped = m;
    flipped.U0 = -m.U0;
    const auto basis = make_ladder_basis(L, L);
    const CMatrix r = expm_hermitian(spin_totals(basis).Jy.dense(), pi / 2);
    const CMatrix want = r * dense(h0(flipped), basis) * r.adjoint();
    EXPECT_LT(max_abs(dense(h2_closed_form(m), basis) - want), 1e-12);
  }
}

TEST(Effective, PulseFormIsTrotterAtHalfPi) {
  const ModelParams m{1.0, -1.3, 3, Boundary::open};
  const auto basis = make_ladder_basis(3, 3);
  for (double a : {0.0, 0.25, 0.6, 1.0}) {
    EXPECT_LT(max_abs(dense(h_eff_pulse(m, a), basis) - dense(h_eff_trotter(m, a, pi / 2), basis)), 1e-13);
  }
}

TEST(Effective, PulseCouplingsFromPatterns) {
  const double U0 = -0.9;
  const double alpha = 0.3;
  const ModelParams m{1.0, U0, 3, Boundary::open};
  const auto basis = make_ladder_basis(3, 3);
  const auto amp = decompose_patterns(build_sparse(h_eff_pulse(m, alpha), basis));
  EXPECT_NEAR(amp.hopping, 1.0, 1e-12);
  EXPECT_NEAR(amp.intra_density, U0 * (1 + alpha) / 2, 1e-12);
  EXPECT_NEAR(amp.inter_density, U0 * (1 - alpha) / 2, 1e-12);
  EXPECT_NEAR(amp.swap, U0 * (1 - alpha) / 2, 1e-12);
  EXPECT_NEAR(amp.pair, -U0 * (1 - alpha) / 2, 1e-12);
  EXPECT_LT(amp.residual_norm, 1e-12);
}

TEST(Effective, IsospectralUnderAlphaSwap) {
  const ModelParams m{1.0, -1.5, 3, Boundary::open};
  for (int N = 1; N < 6; ++N) {
    const auto basis = make_ladder_basis(3, N);
    Eigen::SelfAdjointEigenSolver<CMatrix> a(dense(h_eff_pulse(m, 0.2), basis));
    Eigen::SelfAdjointEigenSolver<CMatrix> b(dense(h_eff_pulse(m, 0.8), basis));
    EXPECT_LT((a.eigenvalues() - b.eigenvalues()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Effective, ConservesLegParity) {
  const ModelParams m{1.0, -1.0, 4, Boundary::open};
  const auto basis = make_ladder_basis(4, 4);
  const CMatrix p = leg_parity_operator(basis).dense();
  const CMatrix h = dense(h_eff_pulse(m, 0.4), basis);
  EXPECT_LT(max_abs(h * p - p * h), 1e-14);
  DriveParams d;
  d.alpha = 0.5;
  d.T = 0.1;
  d.t_p = 0.005;
  const CMatrix hi = dense(h_eff_impure(m, d), basis);
  EXPECT_GT(max_abs(hi * p - p * hi), 1e-3);
}

TEST(Continuous, BesselRenormalization) {
  // First zero of J0.
  const double root = 2.404825557695773;
  EXPECT_NEAR(bessel_j0_series(root), 0.0, 1e-14);
  const auto at_root = continuous_couplings(-0.8, root / 2);
  EXPECT_NEAR(at_root.U1, 0.75 * -0.8, 1e-14);
  EXPECT_NEAR(at_root.U2, 0.25 * -0.8, 1e-14);
  for (double K0 : {0.0, 0.5, 1.0, 1.5, 3.0}) {
    const auto k = continuous_couplings(1.3, K0);
    EXPECT_NEAR(k.U1, 1.3 * (3 + bessel_j0_series(2 * K0)) / 4, 1e-13);
    EXPECT_NEAR(k.U1 + k.U2, 1.3, 1e-14);
  }
  // K0 = 0 is the undriven ladder.
  const ModelParams m{1.0, -0.6, 3, Boundary::open};
  const auto basis = make_ladder_basis(3, 3);
  EXPECT_LT(max_abs(dense(h_eff_continuous(m, 0.0), basis) - dense(h0(m), basis)), 1e-14);
}

TEST(PurePair, EqualWeightsCancelSwapAndInterLeg) {
  const ModelParams m{1.0, -0.7, 3, Boundary::open};
  const auto basis = make_ladder_basis(3, 3);
  const std::array<double, 4> a{0.3, 0.2, 0.3, 0.2};
  const auto amp = decompose_patterns(build_sparse(h_eff_pure_pair(m, a), basis));
  const auto k = pure_pair_couplings(m.U0, a);
  EXPECT_NEAR(k.Un, m.U0 * 0.6, 1e-15);
  EXPECT_NEAR(k.Up, -m.U0 * 0.2, 1e-15);
  EXPECT_LT(std::abs(amp.swap), 1e-12);
  EXPECT_LT(std::abs(amp.inter_density), 1e-12);
  EXPECT_NEAR(amp.pair, k.Up, 1e-12);
  EXPECT_NEAR(amp.intra_density, k.Un, 1e-12);
  EXPECT_LT(amp.residual_norm, 1e-12);

  const auto unequal = decompose_patterns(build_sparse(h_eff_pure_pair(m, {0.3, 0.3, 0.3, 0.1}), basis));
  EXPECT_GT(std::abs(unequal.swap), 1e-3);
  EXPECT_THROW(pure_pair_couplings(1.0, {0.3, 0.3, 0.3, 0.3}), std::invalid_argument);
}

TEST(Impure, CoefficientAndHermiticity) {
  EXPECT_NEAR(impure_z2_coefficient(-0.7, 0.005, 0.1), 4 * -0.7 / (3 * pi) * 0.05, 1e-16);
  const ModelParams m{1.0, -0.7, 3, Boundary::open};
  DriveParams d;
  d.alpha = 0.5;
  d.T = 0.1;
  d.t_p = 0.0025;
  const auto basis = make_ladder_basis(3, 3);
  EXPECT_LT(hermiticity_defect(dense(h_eff_impure(m, d), basis)), 1e-15);
  d.t_p = 0.06;
  EXPECT_THROW(h_eff_impure(m, d), std::invalid_argument);
}

TEST(WLadder, PairHoppingMatrixElement) {
  const auto basis = make_ladder_basis(2, 2);
  const CMatrix h = dense(ladder_pairhop_w(1.0, 0.4, 2), basis);
  const auto aa = *basis->index_of(make_state({mode_index(Leg::a, 0), mode_index(Leg::a, 1)}));
  const auto bb = *basis->index_of(make_state({mode_index(Leg::b, 0), mode_index(Leg::b, 1)}));
  EXPECT_NEAR(std::abs(h(aa, bb)), 0.4, 1e-15);
  EXPECT_LT(hermiticity_defect(h), 1e-15);
}

TEST(Hamiltonians, AllHermitian) {
  const ModelParams m{1.0, -0.7, 4, Boundary::periodic};
  const auto basis = make_ladder_basis(4, 3);
  for (const auto& h : {h0(m), h1_closed_form(m, 0.4), h2_closed_form(m), h_eff_pulse(m, 0.3),
                        h_eff_pure_pair(m, {0.2, 0.3, 0.2, 0.3}), h_eff_continuous(m, 1.1)}) {
    EXPECT_LT(hermiticity_defect(dense(h, basis)), 1e-14);
  }
}

TEST(Params, Validation) {
  EXPECT_THROW(validate(ModelParams{0.0, 1.0, 3, Boundary::open}), std::invalid_argument);
  EXPECT_THROW(validate(ModelParams{1.0, 1.0, 2, Boundary::periodic}), std::invalid_argument);
  EXPECT_THROW(h_eff_trotter(ModelParams{1.0, 1.0, 3, Boundary::open}, 1.5, pi / 2), std::invalid_argument);
  EXPECT_EQ(bonds(4, Boundary::open).size(), 3u);
  EXPECT_EQ(bonds(4, Boundary::periodic).size(), 4u);
}
