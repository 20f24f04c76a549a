#include "ladder/linalg.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include <spdlog/spdlog.h>

namespace ladder {

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

double hermiticity_defect(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

HermitianExponential::HermitianExponential(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("HermitianExponential: eigensolver failed");
  values_ = es.eigenvalues();
  vectors_ = es.eigenvectors();
}

CMatrix HermitianExponential::unitary(double t) const {
  CVector phases = (values_.cast<cplx>() * cplx(0.0, -t)).array().exp();
  return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

CVector HermitianExponential::apply(const CVector& psi, double t) const {
  CVector coeffs = vectors_.adjoint() * psi;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) coeffs(i) *= std::exp(cplx(0.0, -t * values_(i)));
  return vectors_ * coeffs;
}

CMatrix expm_hermitian(const CMatrix& h, double t) { return HermitianExponential(h).unitary(t); }

namespace {

struct KrylovResult {
  CVector psi;
  double error = 0.0;
};

// One Lanczos projection of exp(-i dt H) applied to psi.
KrylovResult krylov_single(const SparseMatrix& h, const CVector& psi, double dt, int max_dim) {
  const double beta0 = psi.norm();
  if (beta0 == 0.0) return {psi, 0.0};
  const int dim = static_cast<int>(psi.size());
  const int m_max = std::min(max_dim, dim);

  std::vector<CVector> basis;
  basis.reserve(m_max + 1);
  std::vector<double> alpha;
  std::vector<double> beta;
  basis.push_back(psi / beta0);
  double last_beta = 0.0;
  const double scale = std::max(1.0, std::abs(dt));
  for (int j = 0; j < m_max; ++j) {
    CVector w = h * basis[j];
    const double a = basis[j].dot(w).real();
    alpha.push_back(a);
    // Full reorthogonalization keeps the small basis numerically orthonormal.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) w -= q * q.dot(w);
    }
    const double b = w.norm();
    last_beta = b;
    if (j + 1 == m_max || b < 1e-14 * scale) break;
    beta.push_back(b);
    basis.push_back(w / b);
  }

  const int m = static_cast<int>(alpha.size());
  RVector diag = Eigen::Map<RVector>(alpha.data(), m);
  RVector sub = m > 1 ? RVector(Eigen::Map<RVector>(beta.data(), m - 1)) : RVector();
  Eigen::SelfAdjointEigenSolver<RMatrix> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  const RMatrix& v = es.eigenvectors();
  CVector y = CVector::Zero(m);
  for (int k = 0; k < m; ++k) {
    const cplx phase = std::exp(cplx(0.0, -dt * es.eigenvalues()(k)));
    y += v.col(k).cast<cplx>() * (phase * v(0, k));
  }
  CVector out = CVector::Zero(dim);
  for (int k = 0; k < m; ++k) out += basis[k] * y(k);
  out *= beta0;
  const bool exhausted = (m < m_max) || (m == dim) || last_beta < 1e-14 * scale;
  const double err = exhausted ? 0.0 : beta0 * last_beta * std::abs(y(m - 1));
  return {out, err};
}

}  // namespace

CVector krylov_step(const SparseMatrix& h, const CVector& psi, double dt, const KrylovOptions& options) {
  if (dt == 0.0) return psi;
  int substeps = 1;
  while (substeps <= options.max_substeps) {
    const double sub_dt = dt / substeps;
    CVector cur = psi;
    bool ok = true;
    for (int s = 0; s < substeps; ++s) {
      auto r = krylov_single(h, cur, sub_dt, options.dimension);
      if (r.error > options.tolerance / substeps) {
        ok = false;
        break;
      }
      cur = std::move(r.psi);
    }
    if (ok) {
      if (substeps > 1) {
        spdlog::debug("krylov_step: dt={} split into {} substeps", dt, substeps);
      }
      return cur;
    }
    substeps *= 2;
    if (substeps > 8) spdlog::warn("krylov_step: error estimate above tolerance, refining dt={} into {} substeps", dt, substeps);
  }
  throw std::runtime_error("krylov_step: no convergence after " + std::to_string(options.max_substeps) + " substeps");
}

namespace {

void orthogonalize(CVector& w, const std::vector<CVector>& against) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : against) w -= q * q.dot(w);
  }
}

std::vector<EigenPair> dense_lowest(const SparseMatrix& h, int count) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es{CMatrix(h)};
  std::vector<EigenPair> out;
  for (int k = 0; k < count; ++k) {
    CVector v = es.eigenvectors().col(k);
    const double e = es.eigenvalues()(k);
    out.push_back({e, v, (h * v - e * v).norm()});
  }
  return out;
}

}  // namespace

std::vector<EigenPair> lanczos_lowest(const SparseMatrix& h, int count, const LanczosOptions& options) {
  const auto dim = static_cast<int>(h.rows());
  if (count < 1) return {};
  if (count > dim) throw std::invalid_argument("lanczos_lowest: more eigenpairs requested than the dimension");
  // The Krylov space of a tiny matrix is the whole space anyway.
  if (dim <= 32) return dense_lowest(h, count);

  constexpr int kRestartSize = 150;
  std::mt19937 rng(options.seed);
  std::normal_distribution<double> gauss;

  std::vector<EigenPair> found;
  std::vector<CVector> locked;
  int iterations = 0;
  for (int target = 0; target < count; ++target) {
    CVector start(dim);
    for (int i = 0; i < dim; ++i) start(i) = cplx(gauss(rng), gauss(rng));
    orthogonalize(start, locked);
    start.normalize();

    bool converged = false;
    double best_residual = 1e300;
    EigenPair candidate;
    while (!converged) {
      std::vector<CVector> basis{start};
      std::vector<double> alpha;
      std::vector<double> beta;
      const int room = dim - static_cast<int>(locked.size());
      const int m_cap = std::min(kRestartSize, room);
      for (int j = 0; j < m_cap; ++j) {
        CVector w = h * basis[j];
        ++iterations;
        alpha.push_back(basis[j].dot(w).real());
        orthogonalize(w, locked);
        orthogonalize(w, basis);
        const double b = w.norm();
        const int m = j + 1;
        const bool exhausted = b < 1e-12 || m == m_cap;
        if (m % 5 == 0 || exhausted) {
          RVector diag = Eigen::Map<RVector>(alpha.data(), m);
          RVector sub = m > 1 ? RVector(Eigen::Map<RVector>(beta.data(), m - 1)) : RVector();
          Eigen::SelfAdjointEigenSolver<RMatrix> es;
          es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
          const double estimate = b * std::abs(es.eigenvectors()(m - 1, 0));
          if (estimate < options.residual_tolerance || exhausted) {
            CVector x = CVector::Zero(dim);
            for (int k = 0; k < m; ++k) x += basis[k] * es.eigenvectors()(k, 0);
            orthogonalize(x, locked);
            x.normalize();
            const double energy = x.dot(h * x).real();
            const double residual = (h * x - energy * x).norm();
            candidate = {energy, x, residual};
            best_residual = std::min(best_residual, residual);
            if (residual < options.residual_tolerance) {
              converged = true;
              break;
            }
            if (exhausted) {
              start = x;
              break;
            }
          }
        }
        if (iterations >= options.max_iterations) break;
        beta.push_back(b);
        basis.push_back(w / b);
      }
      if (!converged && iterations >= options.max_iterations) {
        throw std::runtime_error("lanczos_lowest: no convergence after " + std::to_string(iterations) +
                                 " iterations, residual " + std::to_string(best_residual));
      }
    }
    locked.push_back(candidate.state);
    found.push_back(std::move(candidate));
  }
  std::sort(found.begin(), found.end(), [](const EigenPair& a, const EigenPair& b) { return a.energy < b.energy; });
  return found;
}

}  // namespace ladder
