#include "ladder/rgflow.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include <boost/math/tools/minima.hpp>

#include "ladder/models.hpp"

namespace ladder {

double BareCouplings::marginality() const { return std::abs(K_minus - 1.0); }

BareCouplings bare_couplings(double U0, double alpha, double nu, double tau, VelocityChoice velocity) {
  if (!(nu > 0.0 && nu < 0.5)) throw std::invalid_argument("bare_couplings: filling must lie in (0, 1/2)");
  if (!(tau > 0.0)) throw std::invalid_argument("bare_couplings: tau must be positive");
  BareCouplings b;
  b.U0 = U0;
  b.alpha = alpha;
  b.nu = nu;
  b.kF = pi * nu;
  if (velocity.convention == VelocityConvention::tight_binding) {
    b.vF = 2.0 * tau * std::sin(pi * nu);
  } else {
    if (!(velocity.custom_vF > 0.0)) throw std::invalid_argument("bare_couplings: custom v_F must be positive");
    b.vF = velocity.custom_vF;
  }
  const auto eff = pulse_couplings(U0, alpha);
  b.U1 = eff.U1;
  b.U2 = eff.U2;

  const double s2 = std::sin(b.kF) * std::sin(b.kF);
  const double c2 = std::cos(b.kF) * std::cos(b.kF);
  const double cos2k = std::cos(2.0 * b.kF);
  const double num = b.vF * pi + b.U1 * cos2k + 2.0 * b.U2 * s2;
  const double den = b.vF * pi + b.U1 * (2.0 - cos2k) - 2.0 * b.U2 * s2;
  if (!(num > 0.0 && den > 0.0)) {
    throw std::domain_error("bare_couplings: U0=" + std::to_string(U0) + ", alpha=" + std::to_string(alpha) +
                            " is outside the perturbative window (non-positive velocity)");
  }
  b.K_minus = std::sqrt(num / den);
  b.v_minus = std::sqrt(num * den) / pi;
  b.g_p = -4.0 * b.U2 * s2;
  b.g_bs = -4.0 * b.U2 * c2;
  b.y_minus = 2.0 * (b.K_minus - 1.0);
  b.y_p = b.g_p / (pi * b.v_minus);
  b.y_bs = b.g_bs / (pi * b.v_minus);
  return b;
}

const char* to_string(FlowOutcome outcome) {
  switch (outcome) {
    case FlowOutcome::pair_dominant: return "pair_dominant";
    case FlowOutcome::backscatter_dominant: return "backscatter_dominant";
    case FlowOutcome::gapless: return "gapless";
  }
  return "?";
}

namespace {

struct Y {
  double m, p, bs;
};

Y rhs(const Y& y) { return {2.0 * (y.p * y.p - y.bs * y.bs), y.m * y.p, -y.m * y.bs}; }

Y axpy(const Y& y, double h, const Y& k) { return {y.m + h * k.m, y.p + h * k.p, y.bs + h * k.bs}; }

Y rk4(const Y& y, double h) {
  const Y k1 = rhs(y);
  const Y k2 = rhs(axpy(y, h / 2, k1));
  const Y k3 = rhs(axpy(y, h / 2, k2));
  const Y k4 = rhs(axpy(y, h, k3));
  return {y.m + h / 6 * (k1.m + 2 * k2.m + 2 * k3.m + k4.m), y.p + h / 6 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p),
          y.bs + h / 6 * (k1.bs + 2 * k2.bs + 2 * k3.bs + k4.bs)};
}

// Fraction of the step at which |x| reaches the threshold, linear in x.
double crossing_fraction(double before, double after, double threshold) {
  const double a = std::abs(before);
  const double b = std::abs(after);
  if (b < threshold) return 2.0;
  if (a >= threshold) return 0.0;
  return (threshold - a) / (b - a);
}

}  // namespace

FlowResult integrate_flow(const FlowSample& start, const FlowOptions& options) {
  if (!(options.threshold >= 1.0)) throw std::invalid_argument("integrate_flow: threshold must be >= 1");
  if (!(options.dl > 0.0)) throw std::invalid_argument("integrate_flow: dl must be positive");
  if (!(options.l_max > 0.0)) throw std::invalid_argument("integrate_flow: l_max must be positive");
  const int stride = std::max(1, options.trace_stride);

  FlowResult res;
  Y y{start.y_minus, start.y_p, start.y_bs};
  double l = start.l;
  res.trace.push_back({l, y.m, y.p, y.bs});
  if (y.p == 0.0 && y.bs == 0.0) {
    res.outcome = FlowOutcome::gapless;
    res.l_star = options.l_max;
    return res;
  }

  double dl = options.dl;
  const double guard = 0.1 * options.threshold;
  long step = 0;
  while (l < options.l_max) {
    const double h = std::min(dl, options.l_max - l);
    const Y next = rk4(y, h);
    if (!std::isfinite(next.m) || !std::isfinite(next.p) || !std::isfinite(next.bs)) {
      throw std::runtime_error("integrate_flow: non-finite couplings at l=" + std::to_string(l));
    }
    const double jump = std::max({std::abs(next.m - y.m), std::abs(next.p - y.p), std::abs(next.bs - y.bs)});
    if (jump > guard) {
      dl /= 2;
      ++res.step_halvings;
      if (dl < 1e-14) throw std::runtime_error("integrate_flow: step size underflow near l=" + std::to_string(l));
      continue;
    }
    const double fp = crossing_fraction(y.p, next.p, options.threshold);
    const double fbs = crossing_fraction(y.bs, next.bs, options.threshold);
    if (fp <= 1.0 || fbs <= 1.0) {
      const bool pair = fp <= fbs;
      const double f = pair ? fp : fbs;
      res.outcome = pair ? FlowOutcome::pair_dominant : FlowOutcome::backscatter_dominant;
      res.l_star = l + f * h;
      res.xi_inv = std::exp(-res.l_star);
      const Y at = axpy(y, f, {next.m - y.m, next.p - y.p, next.bs - y.bs});
      res.trace.push_back({res.l_star, at.m, at.p, at.bs});
      return res;
    }
    y = next;
    l += h;
    if (++step % stride == 0) res.trace.push_back({l, y.m, y.p, y.bs});
  }
  res.outcome = FlowOutcome::gapless;
  res.l_star = options.l_max;
  res.xi_inv = 0.0;
  if (res.trace.back().l != l) res.trace.push_back({l, y.m, y.p, y.bs});
  return res;
}

FlowResult integrate_flow(const BareCouplings& bare, const FlowOptions& options) {
  return integrate_flow(FlowSample{0.0, bare.y_minus, bare.y_p, bare.y_bs}, options);
}

ScanPoint scan_point(double U0, double alpha, const ScanRequest& request) {
  ScanPoint pt;
  pt.U0 = U0;
  pt.alpha = alpha;
  pt.nu = request.nu;
  try {
    pt.bare = bare_couplings(U0, alpha, request.nu, request.tau, request.velocity);
    if (U0 == 0.0 || alpha == 0.0 || alpha == 1.0) {
      FlowResult gapless;
      gapless.l_star = request.flow.l_max;
      gapless.trace.push_back({0.0, pt.bare->y_minus, pt.bare->y_p, pt.bare->y_bs});
      pt.flow = std::move(gapless);
    } else {
      pt.flow = integrate_flow(*pt.bare, request.flow);
    }
    if (!request.keep_trace) pt.flow->trace.clear();
  } catch (const std::exception& e) {
    pt.error = e.what();
  }
  return pt;
}

std::vector<ScanPoint> phase_scan(const ScanRequest& request, int threads) {
  if (request.U0.empty() || request.alpha.empty()) throw std::invalid_argument("phase_scan: empty grid");
  for (double a : request.alpha) {
    if (a < 0.0 || a > 1.0) throw std::invalid_argument("phase_scan: alpha outside [0, 1]");
  }
  const std::size_t na = request.alpha.size();
  const std::size_t total = request.U0.size() * na;
  std::vector<ScanPoint> table(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      table[i] = scan_point(request.U0[i / na], request.alpha[i % na], request);
    }
  };
  const int n = std::clamp(threads, 1, static_cast<int>(std::min<std::size_t>(total, 256)));
  std::vector<std::jthread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  return table;
}

PowerLawFit fit_power_law(const std::vector<double>& alpha, const std::vector<double>& xi_inv) {
  if (alpha.size() != xi_inv.size() || alpha.size() < 2) throw std::invalid_argument("fit_power_law: need >= 2 points");
  for (double a : alpha) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("fit_power_law: alpha must lie in (0, 1)");
  }
  // For fixed kappa the prefactor is linear least squares.
  auto solve = [&](double log_kappa) {
    const double kappa = std::exp(log_kappa);
    double gg = 0.0;
    double gx = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      const double g = 1.0 - std::pow(alpha[i], kappa);
      gg += g * g;
      gx += g * xi_inv[i];
    }
    const double c = gg > 0.0 ? gx / gg : 0.0;
    double ss = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      const double r = xi_inv[i] - c * (1.0 - std::pow(alpha[i], kappa));
      ss += r * r;
    }
    return std::pair{c, std::sqrt(ss / alpha.size())};
  };
  // Coarse bracket, then Brent on log(kappa).
  double best = 0.0;
  double best_rms = 1e300;
  for (double lk = std::log(1e-2); lk <= std::log(1e3); lk += 0.05) {
    const double r = solve(lk).second;
    if (r < best_rms) {
      best_rms = r;
      best = lk;
    }
  }
  const auto [lk, rms] =
      boost::math::tools::brent_find_minima([&](double x) { return solve(x).second; }, best - 0.05, best + 0.05, 52);
  PowerLawFit fit;
  fit.kappa = std::exp(lk);
  fit.prefactor = solve(lk).first;
  fit.rms = rms;
  return fit;
}

}  // namespace ladder
