#include "ladder/models.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ladder/linalg.hpp"

namespace ladder {

namespace {

int ma(int rung) { return mode_index(Leg::a, rung); }
int mb(int rung) { return mode_index(Leg::b, rung); }

FermionTerm term(cplx coefficient, std::vector<FermionOp> factors) { return {coefficient, std::move(factors)}; }

TermList spin(Spin s, int rung) {
  switch (s) {
    case Spin::x: return jx(rung);
    case Spin::y: return jy(rung);
    case Spin::z: return jz(rung);
  }
  return {};
}

template <typename F>
TermList sum_over_bonds(int L, Boundary boundary, F&& per_bond) {
  TermList out;
  for (auto [i, j] : bonds(L, boundary)) out += per_bond(i, j);
  return out;
}

}  // namespace

void validate(const ModelParams& params) {
  if (!(params.tau > 0.0)) throw std::invalid_argument("ModelParams: tau must be positive");
  if (params.L < 1) throw std::invalid_argument("ModelParams: L must be at least 1");
  if (params.boundary == Boundary::periodic && params.L < 3) {
    throw std::invalid_argument("ModelParams: periodic boundary needs L >= 3");
  }
}

std::vector<std::pair<int, int>> bonds(int L, Boundary boundary) {
  std::vector<std::pair<int, int>> out;
  for (int j = 0; j + 1 < L; ++j) out.emplace_back(j, j + 1);
  if (boundary == Boundary::periodic && L >= 3) out.emplace_back(L - 1, 0);
  return out;
}

TermList jx(int rung) {
  return {term(0.5, {cdag(ma(rung)), c(mb(rung))}), term(0.5, {cdag(mb(rung)), c(ma(rung))})};
}

TermList jy(int rung) {
  return {term(cplx(0.0, -0.5), {cdag(ma(rung)), c(mb(rung))}), term(cplx(0.0, 0.5), {cdag(mb(rung)), c(ma(rung))})};
}

TermList jz(int rung) {
  return {term(0.5, {cdag(ma(rung)), c(ma(rung))}), term(-0.5, {cdag(mb(rung)), c(mb(rung))})};
}

TermList rung_number(int rung) {
  return {term(1.0, {cdag(ma(rung)), c(ma(rung))}), term(1.0, {cdag(mb(rung)), c(mb(rung))})};
}

TermList density(Leg leg, int rung) {
  const int m = mode_index(leg, rung);
  return {term(1.0, {cdag(m), c(m)})};
}

namespace {

template <typename F>
TermList sum_over_rungs(int L, F&& per_rung) {
  TermList out;
  for (int j = 0; j < L; ++j) out += per_rung(j);
  return out;
}

}  // namespace

TermList jx_total(int L) { return sum_over_rungs(L, jx); }
TermList jy_total(int L) { return sum_over_rungs(L, jy); }
TermList jz_total(int L) { return sum_over_rungs(L, jz); }
TermList number_total(int L) { return sum_over_rungs(L, rung_number); }

SpinTotals spin_totals(const BasisPtr& basis) {
  const int L = basis->rungs();
  return {build_sparse(jx_total(L), basis), build_sparse(jy_total(L), basis), build_sparse(jz_total(L), basis),
          build_sparse(number_total(L), basis)};
}

TermList hopping(double tau, int L, Boundary boundary) {
  return sum_over_bonds(L, boundary, [tau](int i, int j) {
    TermList t;
    for (auto leg : {Leg::a, Leg::b}) {
      const int mi = mode_index(leg, i);
      const int mj = mode_index(leg, j);
      t.push_back(term(-tau, {cdag(mi), c(mj)}));
      t.push_back(term(-tau, {cdag(mj), c(mi)}));
    }
    return t;
  });
}

TermList intra_leg_density(int L, Boundary boundary) {
  return sum_over_bonds(L, boundary, [](int i, int j) {
    return TermList{term(1.0, {cdag(ma(i)), c(ma(i)), cdag(ma(j)), c(ma(j))}),
                    term(1.0, {cdag(mb(i)), c(mb(i)), cdag(mb(j)), c(mb(j))})};
  });
}

TermList inter_leg_density(int L, Boundary boundary) {
  return sum_over_bonds(L, boundary, [](int i, int j) {
    return TermList{term(1.0, {cdag(ma(i)), c(ma(i)), cdag(mb(j)), c(mb(j))}),
                    term(1.0, {cdag(mb(i)), c(mb(i)), cdag(ma(j)), c(ma(j))})};
  });
}

TermList swap_terms(int L, Boundary boundary) {
  return sum_over_bonds(L, boundary, [](int i, int j) {
    TermList t{term(1.0, {cdag(ma(i)), cdag(mb(j)), c(ma(j)), c(mb(i))})};
    return t + adjoint(t);
  });
}

TermList pair_hopping(int L, Boundary boundary) {
  return sum_over_bonds(L, boundary, [](int i, int j) {
    TermList t{term(1.0, {cdag(ma(i)), cdag(ma(j)), c(mb(j)), c(mb(i))})};
    return t + adjoint(t);
  });
}

TermList bond_spin_product(Spin mu, Spin nu, int L, Boundary boundary) {
  return sum_over_bonds(L, boundary, [mu, nu](int i, int j) { return product(spin(mu, i), spin(nu, j)); });
}

TermList bond_number_product(int L, Boundary boundary) {
  return sum_over_bonds(L, boundary, [](int i, int j) { return product(rung_number(i), rung_number(j)); });
}

TermList h0(const ModelParams& params) {
  validate(params);
  TermList h = hopping(params.tau, params.L, params.boundary);
  h += sum_over_bonds(params.L, params.boundary, [U0 = params.U0](int i, int j) {
    return TermList{term(U0, {cdag(ma(i)), cdag(ma(j)), c(ma(j)), c(ma(i))}),
                    term(U0, {cdag(mb(i)), cdag(mb(j)), c(mb(j)), c(mb(i))})};
  });
  return h;
}

TermList h1_closed_form(const ModelParams& params, double eta) {
  validate(params);
  const int L = params.L;
  const auto bc = params.boundary;
  const double U0 = params.U0;
  const double c2 = std::cos(2 * eta);
  const double s2 = std::sin(2 * eta);
  const TermList zz = bond_spin_product(Spin::z, Spin::z, L, bc);
  const TermList yy = bond_spin_product(Spin::y, Spin::y, L, bc);
  const TermList yz = bond_spin_product(Spin::y, Spin::z, L, bc) + bond_spin_product(Spin::z, Spin::y, L, bc);
  // Interaction = (U0/2) sum (N N + 4 Jz Jz); each Jz Jz rotates as
  // (1/2)cos2eta (ZZ - YY) - (1/2)sin2eta (YZ + ZY) + (1/2)(ZZ + YY).
  TermList h = hopping(params.tau, L, bc);
  h += (0.5 * U0) * bond_number_product(L, bc);
  h += (2.0 * U0) * ((0.5 * c2) * (zz - yy) + (-0.5 * s2) * yz + 0.5 * (zz + yy));
  return h;
}

CMatrix h1_by_conjugation(const ModelParams& params, double eta, const BasisPtr& basis) {
  if (basis->size() > kDenseLimit) throw std::invalid_argument("h1_by_conjugation: sector too large for dense matrices");
  const CMatrix jx_dense = build_sparse(jx_total(basis->rungs()), basis).dense();
  const CMatrix rot = expm_hermitian(jx_dense, eta);  // e^{-i eta Jx}
  const CMatrix h = build_sparse(h0(params), basis).dense();
  return rot * h * rot.adjoint();
}

SparseOperator h1_conjugated(const ModelParams& params, double eta, const BasisPtr& basis) {
  SparseOperator h1 = build_sparse(h1_closed_form(params, eta), basis);
#ifndef NDEBUG
  if (basis->size() <= kDenseLimit && !basis->parity_filter()) {
    const double diff = (h1.dense() - h1_by_conjugation(params, eta, basis)).cwiseAbs().maxCoeff();
    if (diff > 1e-12) {
      throw std::logic_error("h1_conjugated: closed form and conjugation differ by " + std::to_string(diff) +
                             " (sign convention broken)");
    }
  }
#endif
  return h1;
}

TermList h2_closed_form(const ModelParams& params) {
  validate(params);
  const int L = params.L;
  const auto bc = params.boundary;
  TermList h = hopping(params.tau, L, bc);
  h += (-0.5 * params.U0) * (bond_number_product(L, bc) + 4.0 * bond_spin_product(Spin::x, Spin::x, L, bc));
  return h;
}

EffectiveCouplings pulse_couplings(double U0, double alpha) {
  return {0.5 * U0 * (1.0 + alpha), 0.5 * U0 * (1.0 - alpha)};
}

EffectiveCouplings continuous_couplings(double U0, double K0) {
  const double j0 = std::cyl_bessel_j(0.0, 2.0 * K0);
  return {0.25 * U0 * (3.0 + j0), 0.25 * U0 * (1.0 - j0)};
}

namespace {

void validate_alphas4(const std::array<double, 4>& a) {
  const double total = std::accumulate(a.begin(), a.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("two-pulse weights must sum to 1 (got " + std::to_string(total) + ")");
  }
  for (double x : a) {
    if (!(x > 0.0)) throw std::invalid_argument("two-pulse weights must be positive");
  }
}

}  // namespace

PurePairCouplings pure_pair_couplings(double U0, const std::array<double, 4>& alphas4) {
  validate_alphas4(alphas4);
  return {U0 * (alphas4[0] + alphas4[2]), -U0 * alphas4[1]};
}

TermList effective_form(const ModelParams& params, EffectiveCouplings k) {
  validate(params);
  const int L = params.L;
  const auto bc = params.boundary;
  TermList h = hopping(params.tau, L, bc);
  h += k.U1 * intra_leg_density(L, bc);
  h += k.U2 * inter_leg_density(L, bc);
  h += k.U2 * (swap_terms(L, bc) - pair_hopping(L, bc));
  return h;
}

TermList h_eff_pulse(const ModelParams& params, double alpha) {
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("h_eff_pulse: alpha outside [0, 1]");
  return effective_form(params, pulse_couplings(params.U0, alpha));
}

TermList h_eff_trotter(const ModelParams& params, double alpha, double eta) {
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("h_eff_trotter: alpha outside [0, 1]");
  return alpha * h0(params) + (1.0 - alpha) * h1_closed_form(params, eta);
}

TermList h_eff_pure_pair(const ModelParams& params, const std::array<double, 4>& alphas4) {
  validate_alphas4(alphas4);
  return (alphas4[0] + alphas4[2]) * h0(params) + alphas4[1] * h1_closed_form(params, pi / 2) +
         alphas4[3] * h2_closed_form(params);
}

TermList h_eff_continuous(const ModelParams& params, double K0) {
  if (K0 < 0.0) throw std::invalid_argument("h_eff_continuous: K0 must be non-negative");
  return effective_form(params, continuous_couplings(params.U0, K0));
}

double impure_z2_coefficient(double U0, double t_p, double T) { return 4.0 * U0 / (3.0 * pi) * (t_p / T); }

TermList h_eff_impure(const ModelParams& params, const DriveParams& drive) {
  const double T = drive.T;
  const double tp = drive.t_p;
  if (!(T > 0.0)) throw std::invalid_argument("h_eff_impure: period must be positive");
  if (!(tp > 0.0) || tp >= drive.alpha * T || tp >= (1.0 - drive.alpha) * T) {
    throw std::invalid_argument("h_eff_impure: need 0 < t_p < min(alpha T, (1 - alpha) T)");
  }
  const int L = params.L;
  const auto bc = params.boundary;
  const double r = tp / T;
  const TermList zz = bond_spin_product(Spin::z, Spin::z, L, bc);
  const TermList yy = bond_spin_product(Spin::y, Spin::y, L, bc);
  const TermList yz = bond_spin_product(Spin::y, Spin::z, L, bc) + bond_spin_product(Spin::z, Spin::y, L, bc);
  const TermList base = h0(params);
  TermList h = (drive.alpha - r) * base + (1.0 - drive.alpha - r) * h1_closed_form(params, pi / 2);
  h += (2.0 * r) * (base + params.U0 * (yy - zz));
  h += impure_z2_coefficient(params.U0, tp, T) * yz;
  return h;
}

TermList ladder_pairhop_w(double t_hop, double W, int L, Boundary boundary) {
  if (L < 2) throw std::invalid_argument("ladder_pairhop_w: L must be at least 2");
  TermList h = hopping(t_hop, L, boundary);
  h += sum_over_bonds(L, boundary, [W](int i, int j) {
    return TermList{term(W, {cdag(ma(i)), cdag(ma(j)), c(mb(i)), c(mb(j))}),
                    term(W, {cdag(mb(i)), cdag(mb(j)), c(ma(i)), c(ma(j))})};
  });
  return h;
}

PatternAmplitudes decompose_patterns(const SparseOperator& op, Boundary boundary) {
  const auto& basis = op.basis;
  if (basis->kind() != SectorBasis::Kind::fixed_number || basis->parity_filter()) {
    throw std::invalid_argument("decompose_patterns: needs an unfiltered ladder sector");
  }
  const int L = basis->rungs();
  const std::array<SparseMatrix, 5> patterns{
      build_sparse(hopping(1.0, L, boundary), basis).matrix, build_sparse(intra_leg_density(L, boundary), basis).matrix,
      build_sparse(inter_leg_density(L, boundary), basis).matrix, build_sparse(swap_terms(L, boundary), basis).matrix,
      build_sparse(pair_hopping(L, boundary), basis).matrix};
  auto inner = [](const SparseMatrix& a, const SparseMatrix& b) { return a.conjugate().cwiseProduct(b).sum(); };
  CMatrix gram(5, 5);
  CVector rhs(5);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) gram(i, j) = inner(patterns[i], patterns[j]);
    rhs(i) = inner(patterns[i], op.matrix);
  }
  // Patterns that vanish on this sector carry no information; pinv drops them.
  CVector coeff = gram.completeOrthogonalDecomposition().solve(rhs);
  SparseMatrix rest = op.matrix;
  for (int i = 0; i < 5; ++i) rest -= coeff(i) * patterns[i];
  PatternAmplitudes out;
  out.hopping = coeff(0).real();
  out.intra_density = coeff(1).real();
  out.inter_density = coeff(2).real();
  out.swap = coeff(3).real();
  out.pair = coeff(4).real();
  out.residual_norm = rest.norm();
  return out;
}

}  // namespace ladder
