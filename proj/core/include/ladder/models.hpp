#pragma once

// Hamiltonians of the driven two-leg ladder as fermionic term lists.
//
// Builders return TermLists; build_sparse() turns them into a matrix on any
// sector. Conventions: lattice spacing 1, rungs are 0-based, open boundary
// bonds are (j, j+1) for j = 0..L-2.

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "ladder/fockspace.hpp"

namespace ladder {

enum class Boundary { open, periodic };

struct ModelParams {
  double tau = 1.0;
  double U0 = 0.0;
  int L = 2;
  Boundary boundary = Boundary::open;
};

void validate(const ModelParams& params);

// Nearest-neighbour rung pairs.
std::vector<std::pair<int, int>> bonds(int L, Boundary boundary);

struct DriveParams {
  double alpha = 0.5;
  double eta = pi / 2;
  double T = 0.2;
  double t_p = 0.0;
  double K0 = 0.0;
  std::array<double, 4> alphas4{0.25, 0.25, 0.25, 0.25};

  double omega() const { return 2 * pi / T; }
  double epsilon() const { return eta - pi / 2; }
  // Square-drive amplitude fixed by A * t_p = eta.
  double square_amplitude() const { return eta / t_p; }
  // Cosine-drive amplitude A = K0 * omega.
  double cosine_amplitude() const { return K0 * omega(); }
};

// ---- single-rung spin operators -------------------------------------------

TermList jx(int rung);
TermList jy(int rung);
TermList jz(int rung);
TermList rung_number(int rung);
TermList density(Leg leg, int rung);

// Totals summed over rungs.
TermList jx_total(int L);
TermList jy_total(int L);
TermList jz_total(int L);
TermList number_total(int L);

struct SpinTotals {
  SparseOperator Jx, Jy, Jz, N;
};

// Requires a basis without a leg-parity filter (Jx and Jy flip leg parity).
SpinTotals spin_totals(const BasisPtr& basis);

// ---- building blocks -------------------------------------------------------

// -tau sum_j (a+_j a_{j+1} + b+_j b_{j+1} + h.c.)
TermList hopping(double tau, int L, Boundary boundary);

// sum_j (n^a_j n^a_{j+1} + n^b_j n^b_{j+1})
TermList intra_leg_density(int L, Boundary boundary);
// sum_j (n^a_j n^b_{j+1} + n^b_j n^a_{j+1})
TermList inter_leg_density(int L, Boundary boundary);
// sum_j (a+_j b+_{j+1} a_{j+1} b_j + h.c.)
TermList swap_terms(int L, Boundary boundary);
// sum_j (a+_j a+_{j+1} b_{j+1} b_j + h.c.)
TermList pair_hopping(int L, Boundary boundary);

// sum over bonds of S^j_mu S^{j+1}_nu for two spin components.
enum class Spin { x, y, z };
TermList bond_spin_product(Spin mu, Spin nu, int L, Boundary boundary);
// sum_j N^j N^{j+1}
TermList bond_number_product(int L, Boundary boundary);

// ---- Hamiltonians ----------------------------------------------------------

// Two decoupled chains with intra-leg nearest-neighbour interaction U0.
TermList h0(const ModelParams& params);

// e^{-i eta Jx} H0 e^{i eta Jx} in closed form (hopping is invariant; the
// interaction rotates through the cos 2eta / sin 2eta combination).
TermList h1_closed_form(const ModelParams& params, double eta);

// The same operator by explicit dense conjugation on a sector.
CMatrix h1_by_conjugation(const ModelParams& params, double eta, const BasisPtr& basis);

// Closed form; in builds without NDEBUG the conjugation route is evaluated as
// well for sectors up to kDenseLimit and a mismatch above 1e-12 throws.
SparseOperator h1_conjugated(const ModelParams& params, double eta, const BasisPtr& basis);

// e^{-i pi/2 Jy} H0' e^{i pi/2 Jy} with H0' the sign-flipped-interaction ladder.
TermList h2_closed_form(const ModelParams& params);

struct EffectiveCouplings {
  double U1 = 0.0;
  double U2 = 0.0;
};

EffectiveCouplings pulse_couplings(double U0, double alpha);
EffectiveCouplings continuous_couplings(double U0, double K0);

struct PurePairCouplings {
  double Un = 0.0;
  double Up = 0.0;
};

PurePairCouplings pure_pair_couplings(double U0, const std::array<double, 4>& alphas4);

// hopping + U1 intra-leg densities + U2 (inter-leg densities + swaps - pair hopping)
TermList effective_form(const ModelParams& params, EffectiveCouplings couplings);

// Instantaneous-pulse effective Hamiltonian at eta = pi/2.
TermList h_eff_pulse(const ModelParams& params, double alpha);

// alpha H0 + (1 - alpha) H1(eta): the lowest-order Trotter Hamiltonian for any eta.
TermList h_eff_trotter(const ModelParams& params, double alpha, double eta);

// (a1 + a3) H0 + a2 H1(pi/2) + a4 H2. With a2 == a4 this reduces to hopping,
// Un intra-leg densities and Up pair hopping.
TermList h_eff_pure_pair(const ModelParams& params, const std::array<double, 4>& alphas4);

// Bessel-renormalized moving-frame average for the cosine drive.
TermList h_eff_continuous(const ModelParams& params, double K0);

// Coefficient of sum_j (Jy_j Jz_{j+1} + Jz_j Jy_{j+1}) generated by finite,
// impure square pulses: 4 U0 t_p / (3 pi T).
double impure_z2_coefficient(double U0, double t_p, double T);

// Finite-duration impure square pulses at eta = pi/2.
TermList h_eff_impure(const ModelParams& params, const DriveParams& drive);

// -t hopping on both legs plus W (a+_j a+_{j+1} b_j b_{j+1} + b+_j b+_{j+1} a_j a_{j+1}).
TermList ladder_pairhop_w(double t_hop, double W, int L, Boundary boundary = Boundary::open);

// ---- decomposition into the effective-Hamiltonian operator patterns --------

struct PatternAmplitudes {
  double hopping = 0.0;         // coefficient of -sum (a+a + b+b + h.c.)
  double intra_density = 0.0;   // U1 or Un
  double inter_density = 0.0;   // n^a n^b'
  double swap = 0.0;            // a+_j b+_{j+1} a_{j+1} b_j + h.c.
  double pair = 0.0;            // a+_j a+_{j+1} b_{j+1} b_j + h.c.
  double residual_norm = 0.0;   // Frobenius norm of whatever the patterns miss
};

// Least-squares projection of `op` (given on an unfiltered ladder sector) onto
// the pattern operators above.
PatternAmplitudes decompose_patterns(const SparseOperator& op, Boundary boundary = Boundary::open);

}  // namespace ladder
