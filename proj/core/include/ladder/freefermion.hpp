#pragma once

// Kitaev chain through its Bogoliubov-de Gennes matrix:
//   H = -t sum (c+_j c_{j+1} + h.c.) - mu sum n_j - Delta sum (c_j c_{j+1} + c+_{j+1} c+_j)
// written as H = 1/2 Psi+ M Psi + tr(A)/2 with Psi = (c_1..c_L, c+_1..c+_L).

#include <string>
#include <vector>

#include "ladder/fockspace.hpp"
#include "ladder/models.hpp"
#include "ladder/observables.hpp"

namespace ladder {

struct KitaevParams {
  double t = 1.0;
  double mu = 0.0;
  double Delta = 1.0;
  int L = 8;
  Boundary boundary = Boundary::open;
};

void validate(const KitaevParams& params);

// 2L x 2L BdG matrix M.
CMatrix kitaev_bdg_matrix(const KitaevParams& params);

struct BdgSolution {
  RVector energies;       // L quasiparticle energies, ascending, >= 0
  RVector full_spectrum;  // all 2L eigenvalues of M, ascending
  CMatrix modes;          // columns: eigenvectors of M in full_spectrum order
  double particle_hole_defect = 0.0;  // max |e_k + e_{2L-1-k}|
  double ground_energy = 0.0;         // many-body ground energy, -sum(e)/2 + tr(A)/2
};

BdgSolution kitaev_spectrum(const KitaevParams& params);

// sqrt((2t cos k + mu)^2 + 4 Delta^2 sin^2 k) on k = 2 pi n / L, n = 0..L-1.
std::vector<double> kitaev_periodic_dispersion(const KitaevParams& params);

// Minimum of the bulk dispersion over `points` momenta in [0, pi].
double kitaev_bulk_gap(const KitaevParams& params, int points = 100001);

enum class KitaevPhase { trivial, topological, critical };

const char* to_string(KitaevPhase phase);

// |mu| against 2t, with |(|mu| - 2|t|)| < critical_band counted as critical.
KitaevPhase phase_classify(const KitaevParams& params, double critical_band = 1e-9);

// Energy difference between the two fermion-parity ground states of the open
// chain: the lowest quasiparticle energy.
double majorana_splitting(const KitaevParams& params);

// Slope of log(values) against sizes by least squares.
double exponential_rate(const std::vector<int>& sizes, const std::vector<double>& values);

// Ground-state correlation matrix <Psi Psi+> (2L x 2L). Zero modes are split
// into particle-hole conjugate pairs so the result is a valid Gaussian state.
CMatrix ground_correlation(const KitaevParams& params);

// Entanglement levels of sites [0, cut) from the restricted correlation matrix.
// Levels ascending in xi; labels are not resolved (charge -1, parity 0).
std::vector<EntanglementLevel> correlation_entanglement(const KitaevParams& params, int cut);

// Many-body Kitaev Hamiltonian as a term list on a chain of L modes.
TermList kitaev_terms(const KitaevParams& params);

// Lowest many-body state in a fixed fermion-parity sector by exact diagonalization.
struct ChainGroundState {
  BasisPtr basis;
  double energy = 0.0;
  CVector state;
};
ChainGroundState kitaev_ground_state_ed(const KitaevParams& params, int fermion_parity);

}  // namespace ladder
