#include <gtest/gtest.h>

#include <random>

#include "ladder/linalg.hpp"

using namespace ladder;

namespace {

SparseMatrix random_hermitian(int n, double density, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution keep(density);
  std::vector<Eigen::Triplet<cplx>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, u(rng));
    for (int j = i + 1; j < n; ++j) {
      if (!keep(rng)) continue;
      const cplx v{u(rng), u(rng)};
      t.emplace_back(i, j, v);
      t.emplace_back(j, i, std::conj(v));
    }
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

CVector random_state(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = {g(rng), g(rng)};
  return v.normalized();
}

}  // namespace

TEST(Expm, UnitaryAndGroupProperty) {
  const CMatrix h = CMatrix(random_hermitian(40, 0.3, 1));
  const CMatrix u = expm_hermitian(h, 0.7);
  EXPECT_LT((u * u.adjoint() - CMatrix::Identity(40, 40)).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((expm_hermitian(h, 0.3) * expm_hermitian(h, 0.4) - u).cwiseAbs().maxCoeff(), 1e-13);
  HermitianExponential cached(h);
  EXPECT_LT((cached.unitary(0.7) - u).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Expm, DiagonalOracle) {
  CMatrix h = CMatrix::Zero(3, 3);
  h.diagonal() << 1.0, -2.0, 0.5;
  const CMatrix u = expm_hermitian(h, 0.3);
  for (int i = 0; i < 3; ++i) EXPECT_LT(std::abs(u(i, i) - std::exp(-I * 0.3 * h(i, i))), 1e-15);
}

TEST(Krylov, MatchesDenseExponential) {
  const int n = 256;
  const auto h = random_hermitian(n, 0.05, 3);
  const CVector psi = random_state(n, 4);
  for (double dt : {0.01, 0.5, 3.0}) {
    const CVector exact = expm_hermitian(CMatrix(h), dt) * psi;
    const CVector got = krylov_step(h, psi, dt);
    EXPECT_LT((got - exact).norm(), 1e-10) << "dt = " << dt;
  }
}

TEST(Lanczos, MatchesDenseEigenvalues) {
  const auto h = random_hermitian(300, 0.05, 5);
  Eigen::SelfAdjointEigenSolver<CMatrix> es{CMatrix(h)};
  const auto pairs = lanczos_lowest(h, 4);
  ASSERT_EQ(pairs.size(), 4u);
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(pairs[k].energy, es.eigenvalues()(k), 1e-9);
    EXPECT_LT((h * pairs[k].state - pairs[k].energy * pairs[k].state).norm(), 1e-8);
  }
}

TEST(Lanczos, ResolvesExactDegeneracy) {
  // Direct sum of a matrix with itself: every level twice.
  const auto a = random_hermitian(60, 0.2, 6);
  std::vector<Eigen::Triplet<cplx>> t;
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      t.emplace_back(it.row(), it.col(), it.value());
      t.emplace_back(it.row() + 60, it.col() + 60, it.value());
    }
  }
  SparseMatrix h(120, 120);
  h.setFromTriplets(t.begin(), t.end());
  Eigen::SelfAdjointEigenSolver<CMatrix> es{CMatrix(a)};
  const auto pairs = lanczos_lowest(h, 4);
  EXPECT_NEAR(pairs[0].energy, es.eigenvalues()(0), 1e-9);
  EXPECT_NEAR(pairs[1].energy, es.eigenvalues()(0), 1e-9);
  EXPECT_NEAR(pairs[2].energy, es.eigenvalues()(1), 1e-9);
  EXPECT_NEAR(pairs[3].energy, es.eigenvalues()(1), 1e-9);
  EXPECT_LT(std::abs(pairs[0].state.dot(pairs[1].state)), 1e-8);
}

TEST(Norms, SpectralNormAndCommutator) {
  CMatrix d = CMatrix::Zero(3, 3);
  d.diagonal() << 1.0, -4.0, 2.0;
  EXPECT_NEAR(spectral_norm(d), 4.0, 1e-14);
  CMatrix x(2, 2), y(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  y << 0, -I, I, 0;
  z << 1, 0, 0, -1;
  EXPECT_LT((commutator(x, y) - 2.0 * I * z).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(hermiticity_defect(x), 0.0);
}
