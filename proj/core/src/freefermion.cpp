#include "ladder/freefermion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ladder/linalg.hpp"

namespace ladder {

void validate(const KitaevParams& params) {
  if (params.L < 2) throw std::invalid_argument("KitaevParams: need L >= 2");
  if (params.boundary == Boundary::periodic && params.L < 3) {
    throw std::invalid_argument("KitaevParams: periodic chains need L >= 3");
  }
}

CMatrix kitaev_bdg_matrix(const KitaevParams& p) {
  validate(p);
  const int L = p.L;
  RMatrix A = RMatrix::Zero(L, L);
  RMatrix B = RMatrix::Zero(L, L);
  for (int j = 0; j < L; ++j) A(j, j) = -p.mu;
  for (const auto& [i, j] : bonds(L, p.boundary)) {
    A(i, j) += -p.t;
    A(j, i) += -p.t;
    // -Delta c+_j c+_i = 1/2 (B_ij c+_i c+_j + B_ji c+_j c+_i) with B antisymmetric.
    B(i, j) += p.Delta;
    B(j, i) -= p.Delta;
  }
  CMatrix M(2 * L, 2 * L);
  M.topLeftCorner(L, L) = A.cast<cplx>();
  M.topRightCorner(L, L) = B.cast<cplx>();
  M.bottomLeftCorner(L, L) = -B.cast<cplx>();
  M.bottomRightCorner(L, L) = -A.cast<cplx>();
  return M;
}

BdgSolution kitaev_spectrum(const KitaevParams& p) {
  const CMatrix M = kitaev_bdg_matrix(p);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(M);
  if (es.info() != Eigen::Success) throw std::runtime_error("kitaev_spectrum: eigensolver failed");
  const int n = 2 * p.L;
  BdgSolution sol;
  sol.full_spectrum = es.eigenvalues();
  sol.modes = es.eigenvectors();
  for (int k = 0; k < n; ++k) {
    sol.particle_hole_defect =
        std::max(sol.particle_hole_defect, std::abs(sol.full_spectrum(k) + sol.full_spectrum(n - 1 - k)));
  }
  sol.energies.resize(p.L);
  for (int k = 0; k < p.L; ++k) sol.energies(k) = std::abs(sol.full_spectrum(p.L + k));
  std::sort(sol.energies.begin(), sol.energies.end());
  sol.ground_energy = -0.5 * sol.energies.sum() - 0.5 * p.mu * p.L;
  return sol;
}

std::vector<double> kitaev_periodic_dispersion(const KitaevParams& p) {
  validate(p);
  std::vector<double> out;
  for (int n = 0; n < p.L; ++n) {
    const double k = 2 * pi * n / p.L;
    const double xi = 2 * p.t * std::cos(k) + p.mu;
    out.push_back(std::sqrt(xi * xi + 4 * p.Delta * p.Delta * std::sin(k) * std::sin(k)));
  }
  return out;
}

double kitaev_bulk_gap(const KitaevParams& p, int points) {
  if (points < 2) throw std::invalid_argument("kitaev_bulk_gap: need at least two momenta");
  double gap = 1e300;
  for (int n = 0; n < points; ++n) {
    const double k = pi * n / (points - 1);
    const double xi = 2 * p.t * std::cos(k) + p.mu;
    gap = std::min(gap, std::sqrt(xi * xi + 4 * p.Delta * p.Delta * std::sin(k) * std::sin(k)));
  }
  return gap;
}

const char* to_string(KitaevPhase phase) {
  switch (phase) {
    case KitaevPhase::trivial: return "trivial";
    case KitaevPhase::topological: return "topological";
    case KitaevPhase::critical: return "critical";
  }
  return "?";
}

KitaevPhase phase_classify(const KitaevParams& p, double critical_band) {
  const double d = std::abs(p.mu) - 2 * std::abs(p.t);
  if (std::abs(d) < critical_band) return KitaevPhase::critical;
  return d > 0 ? KitaevPhase::trivial : KitaevPhase::topological;
}

double majorana_splitting(const KitaevParams& p) { return kitaev_spectrum(p).energies(0); }

double exponential_rate(const std::vector<int>& sizes, const std::vector<double>& values) {
  if (sizes.size() != values.size() || sizes.size() < 2) throw std::invalid_argument("exponential_rate: need >= 2 points");
  const auto n = static_cast<Eigen::Index>(sizes.size());
  RMatrix X(n, 2);
  RVector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(values[i] > 0.0)) throw std::invalid_argument("exponential_rate: values must be positive");
    X(i, 0) = 1.0;
    X(i, 1) = sizes[i];
    y(i) = std::log(values[i]);
  }
  const RVector coef = X.colPivHouseholderQr().solve(y);
  return coef(1);
}

namespace {

// Particle-hole conjugation (u, v) -> (v*, u*).
CVector conjugate_partner(const CVector& w, int L) {
  CVector out(2 * L);
  out.head(L) = w.tail(L).conjugate();
  out.tail(L) = w.head(L).conjugate();
  return out;
}

}  // namespace

CMatrix ground_correlation(const KitaevParams& p) {
  const BdgSolution sol = kitaev_spectrum(p);
  const int L = p.L;
  const int n = 2 * L;
  const double zero_tol = 1e-10 * std::max({1.0, std::abs(p.t), std::abs(p.mu), std::abs(p.Delta)});

  std::vector<CVector> positive;
  std::vector<CVector> zero;
  for (int k = 0; k < n; ++k) {
    const double e = sol.full_spectrum(k);
    if (e > zero_tol) positive.push_back(sol.modes.col(k));
    else if (e >= -zero_tol) zero.push_back(sol.modes.col(k));
  }
  if (!zero.empty()) {
    // A real basis under conjugation, r = C r, paired as (r1 + i r2)/sqrt 2.
    std::vector<CVector> real;
    for (const auto& z : zero) {
      for (const CVector& cand : {CVector(z + conjugate_partner(z, L)), CVector(I * (z - conjugate_partner(z, L)))}) {
        CVector r = cand;
        for (const auto& q : real) r -= q * q.dot(r).real();
        if (r.norm() > 1e-6) real.push_back(r / r.norm());
      }
    }
    if (real.size() != zero.size() || real.size() % 2 != 0) {
      throw std::runtime_error("ground_correlation: could not pair the zero modes");
    }
    for (std::size_t k = 0; k < real.size(); k += 2) positive.push_back((real[k] + I * real[k + 1]) / std::sqrt(2.0));
  }
  if (static_cast<int>(positive.size()) != L) throw std::runtime_error("ground_correlation: unbalanced BdG spectrum");
  CMatrix G = CMatrix::Zero(n, n);
  for (const auto& w : positive) G += w * w.adjoint();
  return G;
}

std::vector<EntanglementLevel> correlation_entanglement(const KitaevParams& p, int cut) {
  if (p.boundary != Boundary::open) throw std::invalid_argument("correlation_entanglement: open chains only");
  if (cut < 1 || cut >= p.L) throw std::invalid_argument("correlation_entanglement: need 1 <= cut < L");
  if (cut > 24) throw std::invalid_argument("correlation_entanglement: cut too large to enumerate levels");
  const CMatrix G = ground_correlation(p);
  const int L = p.L;
  std::vector<int> idx;
  for (int j = 0; j < cut; ++j) idx.push_back(j);
  for (int j = 0; j < cut; ++j) idx.push_back(L + j);
  CMatrix GA(2 * cut, 2 * cut);
  for (int a = 0; a < 2 * cut; ++a) {
    for (int b = 0; b < 2 * cut; ++b) GA(a, b) = G(idx[a], idx[b]);
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(GA, Eigen::EigenvaluesOnly);
  // Eigenvalues come in pairs (q, 1 - q); keep the upper half.
  std::vector<double> q;
  // Modes within roundoff of 0 or 1 carry no entanglement.
  for (int k = cut; k < 2 * cut; ++k) {
    double x = std::clamp(es.eigenvalues()(k), 0.0, 1.0);
    if (x < 1e-12) x = 0.0;
    if (x > 1.0 - 1e-12) x = 1.0;
    q.push_back(x);
  }

  std::vector<EntanglementLevel> levels;
  const std::size_t count = std::size_t{1} << cut;
  for (std::size_t mask = 0; mask < count; ++mask) {
    double lambda = 1.0;
    for (int k = 0; k < cut; ++k) lambda *= ((mask >> k) & 1U) ? (1.0 - q[k]) : q[k];
    if (lambda <= 1e-16) continue;
    levels.push_back({-std::log(lambda), lambda, -1, 0});
  }
  std::sort(levels.begin(), levels.end(), [](const auto& a, const auto& b) { return a.xi < b.xi; });
  return levels;
}

TermList kitaev_terms(const KitaevParams& p) {
  validate(p);
  TermList terms;
  for (int j = 0; j < p.L; ++j) terms.push_back({-p.mu, {cdag(j), c(j)}});
  for (const auto& [i, j] : bonds(p.L, p.boundary)) {
    terms.push_back({-p.t, {cdag(i), c(j)}});
    terms.push_back({-p.t, {cdag(j), c(i)}});
    terms.push_back({-p.Delta, {c(i), c(j)}});
    terms.push_back({-p.Delta, {cdag(j), cdag(i)}});
  }
  return terms;
}

ChainGroundState kitaev_ground_state_ed(const KitaevParams& p, int fermion_parity) {
  ChainGroundState out;
  out.basis = make_chain_parity_basis(p.L, fermion_parity);
  const auto h = build_sparse(kitaev_terms(p), out.basis);
  const auto pairs = ground_states(h, 1);
  out.energy = pairs.front().energy;
  out.state = pairs.front().state;
  return out;
}

}  // namespace ladder
