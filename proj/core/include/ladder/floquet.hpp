#pragma once

// Time evolution of the driven ladder: instantaneous pulse sequences,
// finite square pulses, the cosine drive and static effective Hamiltonians,
// sampled stroboscopically and inside the period.

#include <memory>
#include <vector>

#include "ladder/fockspace.hpp"
#include "ladder/models.hpp"

namespace ladder {

enum class Scheme { pulse_sequence, two_pulse_sequence, square_drive, cosine_drive, effective_static };

// Which effective Hamiltonian an effective_static plan propagates with.
enum class EffectiveModel {
  trotter,     // alpha H0 + (1 - alpha) H1(eta)
  pulse,       // closed form at eta = pi/2
  pure_pair,   // two-pulse sequence
  continuous,  // cosine drive, Bessel-renormalized
  impure,      // finite square pulses
};

struct PropagationPlan {
  Scheme scheme = Scheme::pulse_sequence;
  DriveParams drive;
  ModelParams model;
  int n_periods = 1;
  int samples_per_period = 32;
  EffectiveModel effective = EffectiveModel::trotter;
  // Integrator steps per period for the cosine drive.
  int cosine_steps = 1024;
};

void validate(const PropagationPlan& plan);

const char* to_string(Scheme scheme);
const char* to_string(EffectiveModel model);

TermList effective_hamiltonian(EffectiveModel model, const ModelParams& params, const DriveParams& drive);

// The effective Hamiltonian matching a drive scheme.
EffectiveModel natural_effective_model(Scheme scheme);

// P = e^{i eta Jx} on an unfiltered ladder sector.
CMatrix pulse_unitary(double eta, const BasisPtr& basis);

struct Trajectory {
  std::vector<double> times;
  std::vector<CVector> states;
  std::vector<bool> stroboscopic;
};

// Propagates blocks of column states through one period of a plan, one
// sampling interval at a time. Sectors up to kDensePropagation use cached
// dense interval unitaries; larger ones go through Krylov steps.
class FloquetPropagator {
 public:
  static constexpr std::size_t kDensePropagation = 512;

  FloquetPropagator(const PropagationPlan& plan, BasisPtr basis);
  ~FloquetPropagator();
  FloquetPropagator(FloquetPropagator&&) noexcept;
  FloquetPropagator& operator=(FloquetPropagator&&) noexcept;

  // Advances `block` across the sampling interval [k T/s, (k+1) T/s].
  void step_interval(CMatrix& block, int k) const;
  // Advances `block` from t_from to t_to with 0 <= t_from <= t_to <= T.
  void advance(CMatrix& block, double t_from, double t_to) const;

  CMatrix period_unitary() const;

  const BasisPtr& basis() const;
  double period() const;
  int samples_per_period() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-period propagator as a dense matrix.
CMatrix period_unitary(const PropagationPlan& plan, const BasisPtr& basis);

// States on the grid t = n T + k T / s, n < n_periods, plus the final time
// n_periods T. Throws std::runtime_error if the norm drifts by more than 1e-8.
Trajectory evolve(const PropagationPlan& plan, const BasisPtr& basis, const CVector& psi0);

// ---- moving-frame analysis of the cosine drive -----------------------------

struct MovingFrameFourier {
  CMatrix average;                 // (1/T) int R H0 R^dagger dt
  std::vector<CMatrix> positive;   // V_j,  j = 1..harmonics
  std::vector<CMatrix> negative;   // V_-j
  double first_order_norm = 0.0;   // || sum_j (1/j) [V_j, V_-j] ||
  double tail_norm = 0.0;          // max(||V_j||, ||V_-j||) at j = harmonics
};

// Fourier components of R(t) H0 R^dagger(t) with R(t) = e^{i K0 sin(wt) Jx},
// by the periodic trapezoid rule on `points` nodes.
MovingFrameFourier moving_frame_fourier(const ModelParams& params, double K0, const BasisPtr& basis, int points = 4096,
                                        int harmonics = 8);

// Largest deviation between the exact lab-frame cosine-drive state and the
// lowest-order micromotion prediction R^dagger(t) e^{-i t H_eff} psi0 over the
// plan's sample grid.
double kick_operator_residual(const PropagationPlan& plan, const BasisPtr& basis, const CVector& psi0);

}  // namespace ladder
