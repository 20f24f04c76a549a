#pragma once

// Measurements on ladder states: parity-change probabilities, populations,
// ground states, charge gaps, correlations and entanglement spectra.

#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "ladder/floquet.hpp"
#include "ladder/fockspace.hpp"
#include "ladder/linalg.hpp"

namespace ladder {

struct ParityChangeSeries {
  std::vector<double> times;
  std::vector<double> mean_probability;
  std::vector<bool> stroboscopic;
};

// For every basis state |s>, the weight of U(t)|s> on states of opposite leg
// parity, averaged over s. Sampled on the plan's grid.
ParityChangeSeries parity_change_probability(const PropagationPlan& plan, const BasisPtr& basis);

// |<s|psi>|^2 for the basis state s.
double population(const CVector& psi, const BasisPtr& basis, FockState s);

// Period of an oscillating signal from its crossings of `level`, with linear
// interpolation between samples. Consecutive crossings are half a period apart.
// Returns nullopt with fewer than three crossings.
std::optional<double> oscillation_period(const std::vector<double>& times, const std::vector<double>& values,
                                         double level = 0.5);

// Lowest k eigenpairs; throws if any residual exceeds the Lanczos tolerance.
std::vector<EigenPair> ground_states(const SparseOperator& h, int k, const LanczosOptions& options = {});

struct GapReport {
  int L = 0;
  int N = 0;
  bool parity_resolved = false;
  // Lowest energy per (particle number, leg parity); parity 0 when unresolved.
  std::map<std::pair<int, int>, double> E0;
  double Delta_Qplus = 0.0;   // E0(N+1) - E0(N)
  double Delta_Qminus = 0.0;  // E0(N-1) - E0(N)
  double Delta_topo = 0.0;    // (Delta_Qplus + Delta_Qminus) / 2
  double Delta_Q0 = 0.0;      // second-lowest minus lowest level at N
  // With parity resolved: |E0(N,+) - E0(N,-)| and the smaller of the two
  // within-sector gaps E1(N,p) - E0(N,p).
  double parity_splitting = 0.0;
  double bulk_gap = 0.0;
};

// Charge gaps of a number-conserving ladder Hamiltonian around N particles.
// With resolve_parity the N sector is split by leg parity, which requires the
// Hamiltonian to conserve it.
GapReport charge_gaps(const TermList& h, int L, int N, bool resolve_parity = true);

// <psi| c+_i c_j |psi> on one leg.
cplx two_point(const CVector& psi, const BasisPtr& basis, Leg leg, int i, int j);

struct EntanglementLevel {
  double xi = 0.0;      // -log(lambda)
  double lambda = 0.0;  // Schmidt weight
  int charge = -1;      // particles on the left block, -1 if not conserved
  int parity = 0;       // parity label of the left block, 0 if psi mixes parities
};

// Schmidt spectrum for the bipartition into modes [0, left_modes) and the rest.
// Blocks are labeled by the left particle number (fixed-number sectors) and by
// the left parity: leg parity for ladders, fermion parity for chains. Levels
// ascending in xi.
std::vector<EntanglementLevel> entanglement_spectrum_modes(const CVector& psi, const BasisPtr& basis, int left_modes);

// Rung cut: rungs [0, cut_rung) on the left, both legs.
std::vector<EntanglementLevel> entanglement_spectrum(const CVector& psi, const BasisPtr& basis, int cut_rung);

struct PairingCheck {
  bool paired = false;
  double max_pair_splitting = 0.0;
  double mean_spacing = 0.0;
  double tolerance = 0.0;
};

// Groups the lowest `count` levels into consecutive pairs and requires each
// pair's splitting to stay below `fraction` of the mean spacing among them.
PairingCheck check_level_pairing(const std::vector<EntanglementLevel>& levels, int count = 8, double fraction = 0.1);

// <psi| b+_j a_j |psi>, evaluated as a literal sum of matrix elements; images
// outside the basis contribute nothing.
cplx order_parameter(const CVector& psi, const BasisPtr& basis, int rung);

}  // namespace ladder
