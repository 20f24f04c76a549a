#pragma once

// Bosonized description of the effective ladder: bare Luttinger parameters of
// the antisymmetric sector, sine-Gordon couplings and their first-order RG flow.

#include <optional>
#include <string>
#include <vector>

namespace ladder {

enum class VelocityConvention {
  tight_binding,  // v_F = 2 tau sin(pi nu), lattice spacing 1
  custom,         // v_F supplied by the caller
};

struct BareCouplings {
  double U0 = 0.0;
  double alpha = 0.0;
  double nu = 0.0;
  double kF = 0.0;
  double vF = 0.0;
  double U1 = 0.0;
  double U2 = 0.0;
  double K_minus = 1.0;
  double v_minus = 0.0;
  double g_p = 0.0;
  double g_bs = 0.0;
  double y_minus = 0.0;  // 2 (K_minus - 1)
  double y_p = 0.0;      // g_p / (pi v_minus)
  double y_bs = 0.0;     // g_bs / (pi v_minus)

  // |K_minus - 1|: how far the point sits from the K ~ 1 regime the flow assumes.
  double marginality() const;
};

struct VelocityChoice {
  VelocityConvention convention = VelocityConvention::tight_binding;
  double custom_vF = 0.0;
};

// Throws std::invalid_argument for nu outside (0, 1/2) and std::domain_error
// when the antisymmetric-sector velocity is not positive.
BareCouplings bare_couplings(double U0, double alpha, double nu, double tau = 1.0, VelocityChoice velocity = {});

enum class FlowOutcome { pair_dominant, backscatter_dominant, gapless };

const char* to_string(FlowOutcome outcome);

struct FlowSample {
  double l = 0.0;
  double y_minus = 0.0;
  double y_p = 0.0;
  double y_bs = 0.0;
};

struct FlowOptions {
  double threshold = 9.0;
  double dl = 1e-4;
  double l_max = 50.0;
  // Keep every n-th step in the trace (the first and last are always kept).
  int trace_stride = 100;
};

struct FlowResult {
  FlowOutcome outcome = FlowOutcome::gapless;
  double l_star = 0.0;  // l_max when gapless
  double xi_inv = 0.0;  // e^{-l_star}, 0 when gapless
  int step_halvings = 0;
  std::vector<FlowSample> trace;
};

// dy-/dl = 2 (y_p^2 - y_bs^2), dy_p/dl = y- y_p, dy_bs/dl = -y- y_bs by RK4.
// Stops where |y_p| or |y_bs| first reaches the threshold (located by linear
// interpolation inside the last step). A step that moves any coupling by more
// than a tenth of the threshold is retried with half the step.
FlowResult integrate_flow(const FlowSample& start, const FlowOptions& options = {});
FlowResult integrate_flow(const BareCouplings& bare, const FlowOptions& options = {});

struct ScanPoint {
  double U0 = 0.0;
  double alpha = 0.0;
  double nu = 0.0;
  std::optional<BareCouplings> bare;
  std::optional<FlowResult> flow;
  std::string error;  // non-empty when the point failed
};

struct ScanRequest {
  std::vector<double> U0;
  std::vector<double> alpha;
  double nu = 1.0 / 3.0;
  double tau = 1.0;
  VelocityChoice velocity;
  FlowOptions flow;
  bool keep_trace = false;
};

// Classification of one point. At alpha = 0 or 1 the effective ladder is a
// unitary rotation of two decoupled chains and at U0 = 0 it is free, so these
// are gapless without integrating.
ScanPoint scan_point(double U0, double alpha, const ScanRequest& request);

// Row-major table (U0 outer, alpha inner) computed on `threads` workers.
// Per-point failures are recorded in ScanPoint::error.
std::vector<ScanPoint> phase_scan(const ScanRequest& request, int threads = 1);

struct PowerLawFit {
  double kappa = 0.0;
  double prefactor = 0.0;
  double rms = 0.0;
};

// Least-squares fit of xi_inv ~ C (1 - alpha^kappa) over the given points.
PowerLawFit fit_power_law(const std::vector<double>& alpha, const std::vector<double>& xi_inv);

}  // namespace ladder
