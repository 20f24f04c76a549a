#pragma once

// Dense and Krylov-space linear algebra shared by the propagation and
// ground-state code.

#include <vector>

#include "ladder/types.hpp"

namespace ladder {

// Spectral (largest singular value) norm.
double spectral_norm(const CMatrix& m);

// ||A - A^dagger||_max.
double hermiticity_defect(const CMatrix& m);

CMatrix commutator(const CMatrix& a, const CMatrix& b);

// exp(-i t H) for Hermitian H, via eigendecomposition.
CMatrix expm_hermitian(const CMatrix& h, double t);

// Cached eigendecomposition of a Hermitian matrix for repeated exp(-i t H) v.
class HermitianExponential {
 public:
  explicit HermitianExponential(const CMatrix& h);

  CMatrix unitary(double t) const;
  CVector apply(const CVector& psi, double t) const;
  const RVector& eigenvalues() const { return values_; }

 private:
  RVector values_;
  CMatrix vectors_;
};

struct KrylovOptions {
  int dimension = 30;
  double tolerance = 1e-12;
  int max_substeps = 1 << 16;
};

// psi -> exp(-i dt H) psi with a Lanczos basis of at most `dimension` vectors.
// The step is split into equal substeps until the a-posteriori error estimate
// falls below `tolerance`.
CVector krylov_step(const SparseMatrix& h, const CVector& psi, double dt, const KrylovOptions& options = {});

struct EigenPair {
  double energy = 0.0;
  CVector state;
  double residual = 0.0;
};

struct LanczosOptions {
  int max_iterations = 2000;
  double residual_tolerance = 1e-9;
  unsigned seed = 12345;
};

// Lowest `count` eigenpairs of a Hermitian sparse matrix by Lanczos with full
// reorthogonalization. Converged vectors are deflated one at a time so exactly
// degenerate levels are resolved. Energies come back ascending.
std::vector<EigenPair> lanczos_lowest(const SparseMatrix& h, int count, const LanczosOptions& options = {});

}  // namespace ladder
