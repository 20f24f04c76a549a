#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "ladder/fockspace.hpp"
#include "ladder/linalg.hpp"
#include "ladder/models.hpp"

using namespace ladder;

namespace {

// Antisymmetrized-product oracle: a state is the ordered list of occupied
// modes; operators act on the left of the product and the list is re-sorted
// by adjacent transpositions, each contributing a minus sign.
struct Slater {
  std::vector<int> modes;
  int sign = 1;
};

std::optional<Slater> apply_oracle(const FermionTerm& term, Slater s) {
  for (auto it = term.factors.rbegin(); it != term.factors.rend(); ++it) {
    auto& m = s.modes;
    if (it->create) {
      if (std::find(m.begin(), m.end(), it->mode) != m.end()) return std::nullopt;
      m.insert(m.begin(), it->mode);
      for (std::size_t i = 0; i + 1 < m.size() && m[i] > m[i + 1]; ++i) {
        std::swap(m[i], m[i + 1]);
        s.sign = -s.sign;
      }
    } else {
      const auto pos = std::find(m.begin(), m.end(), it->mode);
      if (pos == m.end()) return std::nullopt;
      // Bring the mode to the front, then remove it.
      for (auto k = pos; k != m.begin(); --k) {
        std::iter_swap(k, k - 1);
        s.sign = -s.sign;
      }
      m.erase(m.begin());
    }
  }
  return s;
}

Slater to_slater(FockState st, int modes) {
  Slater s;
  for (int m = 0; m < modes; ++m) {
    if (st.occupied(m)) s.modes.push_back(m);
  }
  return s;
}

double binomial(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST(SectorBasis, SizesAreBinomial) {
  for (int L = 1; L <= 5; ++L) {
    for (int N = 0; N <= 2 * L; ++N) {
      EXPECT_EQ(make_ladder_basis(L, N)->size(), static_cast<std::size_t>(binomial(2 * L, N)));
    }
  }
}

TEST(SectorBasis, IndexLookupRoundTrips) {
  const auto b = make_ladder_basis(4, 3);
  for (std::size_t i = 0; i < b->size(); ++i) {
    EXPECT_EQ(b->state(i).count(), 3);
    ASSERT_TRUE(b->index_of(b->state(i)));
    EXPECT_EQ(*b->index_of(b->state(i)), i);
  }
  EXPECT_FALSE(b->index_of(make_state({0, 1})));
}

TEST(SectorBasis, LegParityPartitionsTheSector) {
  for (int L = 2; L <= 4; ++L) {
    for (int N = 0; N <= 2 * L; ++N) {
      const auto all = make_ladder_basis(L, N);
      const auto plus = make_ladder_basis(L, N, 1);
      const auto minus = make_ladder_basis(L, N, -1);
      EXPECT_EQ(plus->size() + minus->size(), all->size());
      std::set<Bits> seen;
      for (auto s : plus->states()) {
        EXPECT_EQ(leg_parity(s), 1);
        seen.insert(s.bits);
      }
      for (auto s : minus->states()) {
        EXPECT_EQ(leg_parity(s), -1);
        EXPECT_TRUE(seen.insert(s.bits).second);
      }
    }
  }
}

TEST(SectorBasis, ChainParityBasis) {
  const auto even = make_chain_parity_basis(6, 1);
  const auto odd = make_chain_parity_basis(6, -1);
  EXPECT_EQ(even->size(), 32u);
  EXPECT_EQ(odd->size(), 32u);
  for (auto s : odd->states()) EXPECT_EQ(s.count() % 2, 1);
}

TEST(ApplyTerm, SignsMatchAntisymmetrizedProducts) {
  std::mt19937 rng(7);
  const int modes = 10;
  std::uniform_int_distribution<int> mode(0, modes - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<Bits> bits(0, (Bits{1} << modes) - 1);
  int nontrivial = 0;
  for (int trial = 0; trial < 4000; ++trial) {
    FermionTerm term;
    const int len = 1 + trial % 4;
    for (int k = 0; k < len; ++k) term.factors.push_back({mode(rng), coin(rng) == 1});
    const FockState st{bits(rng)};
    const auto got = apply_term(term, st);
    const auto want = apply_oracle(term, to_slater(st, modes));
    ASSERT_EQ(got.has_value(), want.has_value()) << term.to_string();
    if (!got) continue;
    ++nontrivial;
    EXPECT_EQ(to_slater(got->state, modes).modes, want->modes);
    EXPECT_EQ(got->sign, want->sign) << term.to_string();
  }
  EXPECT_GT(nontrivial, 500);
}

TEST(ApplyTerm, CanonicalAnticommutators) {
  // {c_i, c+_j} = delta_ij and {c_i, c_j} = 0, checked as number-conserving
  // operators on every ladder sector of L = 3.
  const int L = 3;
  for (int N = 0; N <= 2 * L; ++N) {
    const auto basis = make_ladder_basis(L, N);
    const auto id = CMatrix::Identity(basis->size(), basis->size());
    for (int i = 0; i < 2 * L; ++i) {
      for (int j = 0; j < 2 * L; ++j) {
        const TermList anti = {{1.0, {c(i), cdag(j)}}, {1.0, {cdag(j), c(i)}}};
        const CMatrix m = build_sparse(anti, basis).dense();
        EXPECT_LT((m - (i == j ? 1.0 : 0.0) * id).cwiseAbs().maxCoeff(), 1e-15);
      }
    }
    for (int i = 0; i < 2 * L; ++i) {
      for (int j = 0; j < 2 * L; ++j) {
        // c+_0 c+_1 {c_i, c_j} keeps the particle number.
        const TermList anti = {{1.0, {cdag(0), cdag(1), c(i), c(j)}}, {1.0, {cdag(0), cdag(1), c(j), c(i)}}};
        EXPECT_LT(build_sparse(anti, basis).dense().cwiseAbs().maxCoeff(), 1e-15);
      }
    }
  }
}

TEST(BuildSparse, HoppingIsHermitianAndConservesLegParity) {
  const auto basis = make_ladder_basis(4, 3);
  const auto h = build_sparse(hopping(1.0, 4, Boundary::periodic), basis).dense();
  EXPECT_LT(hermiticity_defect(h), 1e-15);
  const auto p = leg_parity_operator(basis).dense();
  EXPECT_LT((h * p - p * h).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BuildSparse, RejectsTermsLeavingTheSector) {
  const auto basis = make_ladder_basis(3, 2);
  EXPECT_THROW(build_sparse({{1.0, {cdag(0)}}}, basis), std::invalid_argument);
  const auto filtered = make_ladder_basis(3, 2, 1);
  const TermList rung_hop = {{1.0, {cdag(mode_index(Leg::b, 0)), c(mode_index(Leg::a, 0))}}};
  EXPECT_THROW(build_sparse(rung_hop, filtered), std::invalid_argument);
  EXPECT_NO_THROW(build_sparse(rung_hop, basis));
}

TEST(TermAlgebra, ProductMatchesMatrixProduct) {
  const auto basis = make_ladder_basis(3, 3);
  const auto a = hopping(1.0, 3, Boundary::open);
  const auto b = intra_leg_density(3, Boundary::open);
  const CMatrix lhs = build_sparse(product(a, b), basis).dense();
  const CMatrix rhs = build_sparse(a, basis).dense() * build_sparse(b, basis).dense();
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-13);
  const CMatrix adj = build_sparse(adjoint(product(a, b)), basis).dense();
  EXPECT_LT((adj - rhs.adjoint()).cwiseAbs().maxCoeff(), 1e-13);
}
