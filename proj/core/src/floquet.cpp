#include "ladder/floquet.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "ladder/linalg.hpp"

namespace ladder {

namespace {

// Fourth-order commutator-free Magnus weights (two exponentials per step).
const double kCf4Low = (3.0 - 2.0 * std::sqrt(3.0)) / 12.0;
const double kCf4High = (3.0 + 2.0 * std::sqrt(3.0)) / 12.0;
const double kGaussOffset = std::sqrt(3.0) / 6.0;

// exp(-i dt G) on blocks of column vectors.
struct Generator {
  std::optional<HermitianExponential> dense;
  SparseMatrix sparse;

  Generator(const SparseMatrix& g, bool use_dense) : sparse(g) {
    if (use_dense) dense.emplace(CMatrix(g));
  }

  void apply(CMatrix& block, double dt) const {
    if (dt == 0.0) return;
    if (dense) {
      block = dense->unitary(dt) * block;
      return;
    }
    for (Eigen::Index col = 0; col < block.cols(); ++col) block.col(col) = krylov_step(sparse, block.col(col), dt);
  }
};

struct Segment {
  enum class Kind { evolve, kick, cosine };
  Kind kind = Kind::evolve;
  double start = 0.0;
  double end = 0.0;
  int generator = -1;
  // For kicks: the generator is applied for this "time", i.e. exp(-i kick_dt G).
  double kick_dt = 0.0;
};

}  // namespace

void validate(const PropagationPlan& plan) {
  validate(plan.model);
  if (plan.n_periods < 1) throw std::invalid_argument("PropagationPlan: n_periods must be >= 1");
  if (plan.samples_per_period < 1) throw std::invalid_argument("PropagationPlan: samples_per_period must be >= 1");
  if (!(plan.drive.T > 0.0)) throw std::invalid_argument("PropagationPlan: period T must be positive");
  if (plan.cosine_steps < 1) throw std::invalid_argument("PropagationPlan: cosine_steps must be >= 1");
  const auto& d = plan.drive;
  switch (plan.scheme) {
    case Scheme::pulse_sequence:
      if (d.alpha < 0.0 || d.alpha > 1.0) throw std::invalid_argument("pulse_sequence: alpha outside [0, 1]");
      break;
    case Scheme::two_pulse_sequence:
      pure_pair_couplings(plan.model.U0, d.alphas4);
      break;
    case Scheme::square_drive:
      if (!(d.t_p > 0.0)) throw std::invalid_argument("square_drive: pulse duration must be positive");
      if (d.alpha * d.T - d.t_p < 0.0 || (1.0 - d.alpha) * d.T - d.t_p < 0.0) {
        throw std::invalid_argument("square_drive: segment durations negative (t_p too long for alpha and T)");
      }
      break;
    case Scheme::cosine_drive:
      if (d.K0 < 0.0) throw std::invalid_argument("cosine_drive: K0 must be non-negative");
      break;
    case Scheme::effective_static:
      break;
  }
}

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::pulse_sequence: return "pulse_sequence";
    case Scheme::two_pulse_sequence: return "two_pulse_sequence";
    case Scheme::square_drive: return "square_drive";
    case Scheme::cosine_drive: return "cosine_drive";
    case Scheme::effective_static: return "effective_static";
  }
  return "?";
}

const char* to_string(EffectiveModel model) {
  switch (model) {
    case EffectiveModel::trotter: return "trotter";
    case EffectiveModel::pulse: return "pulse";
    case EffectiveModel::pure_pair: return "pure_pair";
    case EffectiveModel::continuous: return "continuous";
    case EffectiveModel::impure: return "impure";
  }
  return "?";
}

TermList effective_hamiltonian(EffectiveModel model, const ModelParams& params, const DriveParams& drive) {
  switch (model) {
    case EffectiveModel::trotter: return h_eff_trotter(params, drive.alpha, drive.eta);
    case EffectiveModel::pulse: return h_eff_pulse(params, drive.alpha);
    case EffectiveModel::pure_pair: return h_eff_pure_pair(params, drive.alphas4);
    case EffectiveModel::continuous: return h_eff_continuous(params, drive.K0);
    case EffectiveModel::impure: return h_eff_impure(params, drive);
  }
  throw std::invalid_argument("effective_hamiltonian: unknown model");
}

EffectiveModel natural_effective_model(Scheme scheme) {
  switch (scheme) {
    case Scheme::pulse_sequence: return EffectiveModel::trotter;
    case Scheme::two_pulse_sequence: return EffectiveModel::pure_pair;
    case Scheme::square_drive: return EffectiveModel::impure;
    case Scheme::cosine_drive: return EffectiveModel::continuous;
    case Scheme::effective_static: return EffectiveModel::trotter;
  }
  return EffectiveModel::trotter;
}

CMatrix pulse_unitary(double eta, const BasisPtr& basis) {
  if (basis->size() > kDenseLimit) throw std::invalid_argument("pulse_unitary: sector too large for dense matrices");
  const CMatrix jx_dense = build_sparse(jx_total(basis->rungs()), basis).dense();
  return expm_hermitian(jx_dense, -eta);
}

struct FloquetPropagator::Impl {
  PropagationPlan plan;
  BasisPtr basis;
  bool dense = false;
  std::vector<Generator> generators;
  std::vector<Segment> segments;
  SparseMatrix h0_sparse;
  SparseMatrix jx_sparse;
  std::vector<CMatrix> interval_unitaries;

  int add_generator(const SparseMatrix& g) {
    generators.emplace_back(g, dense);
    return static_cast<int>(generators.size()) - 1;
  }

  void add_evolve(int gen, double start, double duration) {
    if (duration < -1e-15) {
      throw std::invalid_argument("FloquetPropagator: negative segment duration " + std::to_string(duration));
    }
    segments.push_back({Segment::Kind::evolve, start, start + std::max(duration, 0.0), gen, 0.0});
  }

  void add_kick(int gen, double time, double kick_dt) { segments.push_back({Segment::Kind::kick, time, time, gen, kick_dt}); }

  double drive_amplitude(double t) const {
    const auto& d = plan.drive;
    return d.cosine_amplitude() * std::cos(d.omega() * t);
  }

  // exp(-i h (w0 H0 + wx Jx)) on a block.
  void apply_combination(CMatrix& block, double h, double w0, double wx) const {
    SparseMatrix g = w0 * h0_sparse + wx * jx_sparse;
    if (dense) {
      block = expm_hermitian(CMatrix(g), h) * block;
    } else {
      for (Eigen::Index col = 0; col < block.cols(); ++col) block.col(col) = krylov_step(g, block.col(col), h);
    }
  }

  void cosine_step(CMatrix& block, double t, double h) const {
    const double f1 = drive_amplitude(t + (0.5 - kGaussOffset) * h);
    const double f2 = drive_amplitude(t + (0.5 + kGaussOffset) * h);
    apply_combination(block, h, 0.5, kCf4High * f1 + kCf4Low * f2);
    apply_combination(block, h, 0.5, kCf4Low * f1 + kCf4High * f2);
  }

  void advance(CMatrix& block, double from, double to) const {
    const double T = plan.drive.T;
    const double eps = 1e-12 * T;
    for (const auto& seg : segments) {
      switch (seg.kind) {
        case Segment::Kind::kick:
          if (seg.start > from + eps && seg.start <= to + eps) generators[seg.generator].apply(block, seg.kick_dt);
          break;
        case Segment::Kind::evolve: {
          const double u = std::max(from, seg.start);
          const double v = std::min(to, seg.end);
          if (v > u) generators[seg.generator].apply(block, v - u);
          break;
        }
        case Segment::Kind::cosine: {
          const double u = std::max(from, seg.start);
          const double v = std::min(to, seg.end);
          if (v <= u) break;
          const double nominal = T / plan.cosine_steps;
          const int n = std::max(1, static_cast<int>(std::ceil((v - u) / nominal - 1e-9)));
          const double h = (v - u) / n;
          for (int i = 0; i < n; ++i) cosine_step(block, u + i * h, h);
          break;
        }
      }
    }
  }
};

FloquetPropagator::FloquetPropagator(const PropagationPlan& plan, BasisPtr basis) : impl_(std::make_unique<Impl>()) {
  validate(plan);
  if (!basis) throw std::invalid_argument("FloquetPropagator: null basis");
  if (basis->rungs() != plan.model.L) throw std::invalid_argument("FloquetPropagator: basis and model disagree on L");
  auto& im = *impl_;
  im.plan = plan;
  im.basis = basis;
  im.dense = basis->size() <= kDensePropagation;

  const auto& d = plan.drive;
  const double T = d.T;
  const int L = plan.model.L;
  const bool needs_spin = plan.scheme != Scheme::effective_static;
  if (needs_spin && basis->parity_filter()) {
    throw std::invalid_argument("FloquetPropagator: drive schemes rotate between legs; use an unfiltered sector");
  }

  im.h0_sparse = build_sparse(h0(plan.model), basis).matrix;
  if (needs_spin) im.jx_sparse = build_sparse(jx_total(L), basis).matrix;

  switch (plan.scheme) {
    case Scheme::pulse_sequence: {
      const int g0 = im.add_generator(im.h0_sparse);
      const int gx = im.add_generator(im.jx_sparse);
      im.add_evolve(g0, 0.0, d.alpha * T);
      im.add_kick(gx, d.alpha * T, -d.eta);  // P = e^{i eta Jx}
      im.add_evolve(g0, d.alpha * T, (1.0 - d.alpha) * T);
      im.add_kick(gx, T, d.eta);  // P^dagger
      break;
    }
    case Scheme::two_pulse_sequence: {
      const auto& a = d.alphas4;
      ModelParams flipped = plan.model;
      flipped.U0 = -plan.model.U0;
      const int g0 = im.add_generator(im.h0_sparse);
      const int g0f = im.add_generator(build_sparse(h0(flipped), basis).matrix);
      const int gx = im.add_generator(im.jx_sparse);
      const int gy = im.add_generator(build_sparse(jy_total(L), basis).matrix);
      double t = 0.0;
      im.add_evolve(g0, t, a[0] * T);
      t += a[0] * T;
      im.add_kick(gx, t, -d.eta);
      im.add_evolve(g0, t, a[1] * T);
      t += a[1] * T;
      im.add_kick(gx, t, d.eta);
      im.add_evolve(g0, t, a[2] * T);
      t += a[2] * T;
      im.add_kick(gy, t, -d.eta);  // W = e^{i xi Jy}, xi = eta
      im.add_evolve(g0f, t, a[3] * T);
      im.add_kick(gy, T, d.eta);
      break;
    }
    case Scheme::square_drive: {
      const double A = d.square_amplitude();
      const int g0 = im.add_generator(im.h0_sparse);
      const int g1 = im.add_generator(SparseMatrix(im.h0_sparse + A * im.jx_sparse));
      const int g3 = im.add_generator(SparseMatrix(im.h0_sparse + 3.0 * A * im.jx_sparse));
      const double first_end = d.alpha * T - d.t_p;
      const double second_end = T - d.t_p;
      im.add_evolve(g0, 0.0, first_end);
      im.add_evolve(g1, first_end, d.t_p);
      im.add_evolve(g0, d.alpha * T, second_end - d.alpha * T);
      im.add_evolve(g3, second_end, d.t_p);
      break;
    }
    case Scheme::cosine_drive:
      im.segments.push_back({Segment::Kind::cosine, 0.0, T, -1, 0.0});
      break;
    case Scheme::effective_static: {
      const int g = im.add_generator(build_sparse(effective_hamiltonian(plan.effective, plan.model, d), basis).matrix);
      im.add_evolve(g, 0.0, T);
      break;
    }
  }

  if (im.dense) {
    const int s = plan.samples_per_period;
    const auto n = static_cast<Eigen::Index>(basis->size());
    im.interval_unitaries.reserve(s);
    for (int k = 0; k < s; ++k) {
      CMatrix u = CMatrix::Identity(n, n);
      im.advance(u, T * k / s, T * (k + 1) / s);
      im.interval_unitaries.push_back(std::move(u));
    }
  }
}

FloquetPropagator::~FloquetPropagator() = default;
FloquetPropagator::FloquetPropagator(FloquetPropagator&&) noexcept = default;
FloquetPropagator& FloquetPropagator::operator=(FloquetPropagator&&) noexcept = default;

void FloquetPropagator::step_interval(CMatrix& block, int k) const {
  const auto& im = *impl_;
  if (im.dense) {
    block = im.interval_unitaries.at(k) * block;
    return;
  }
  const int s = im.plan.samples_per_period;
  const double T = im.plan.drive.T;
  im.advance(block, T * k / s, T * (k + 1) / s);
}

void FloquetPropagator::advance(CMatrix& block, double t_from, double t_to) const {
  if (t_from < 0.0 || t_to < t_from || t_to > period() * (1 + 1e-12)) {
    throw std::invalid_argument("FloquetPropagator::advance: need 0 <= t_from <= t_to <= T");
  }
  impl_->advance(block, t_from, t_to);
}

CMatrix FloquetPropagator::period_unitary() const {
  const auto& im = *impl_;
  const auto n = static_cast<Eigen::Index>(im.basis->size());
  if (im.basis->size() > kDenseLimit) throw std::invalid_argument("period_unitary: sector too large for dense matrices");
  CMatrix u = CMatrix::Identity(n, n);
  if (im.dense) {
    for (const auto& step : im.interval_unitaries) u = step * u;
  } else {
    im.advance(u, 0.0, im.plan.drive.T);
  }
  return u;
}

const BasisPtr& FloquetPropagator::basis() const { return impl_->basis; }
double FloquetPropagator::period() const { return impl_->plan.drive.T; }
int FloquetPropagator::samples_per_period() const { return impl_->plan.samples_per_period; }

CMatrix period_unitary(const PropagationPlan& plan, const BasisPtr& basis) {
  PropagationPlan one = plan;
  one.samples_per_period = 1;
  return FloquetPropagator(one, basis).period_unitary();
}

Trajectory evolve(const PropagationPlan& plan, const BasisPtr& basis, const CVector& psi0) {
  if (psi0.size() != static_cast<Eigen::Index>(basis->size())) {
    throw std::invalid_argument("evolve: initial state does not match the sector dimension");
  }
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw std::invalid_argument("evolve: initial state is not normalized");
  FloquetPropagator prop(plan, basis);
  if (plan.scheme == Scheme::cosine_drive) {
    // Accept the step size only if halving it leaves one period unchanged.
    PropagationPlan fine = plan;
    fine.cosine_steps *= 2;
    fine.samples_per_period = 1;
    CMatrix coarse_state = psi0;
    CMatrix fine_state = psi0;
    prop.advance(coarse_state, 0.0, plan.drive.T);
    FloquetPropagator(fine, basis).advance(fine_state, 0.0, plan.drive.T);
    const double change = (coarse_state - fine_state).norm();
    if (change > 1e-8) {
      throw std::runtime_error("evolve: cosine drive not converged, halving the step changes the state by " +
                               std::to_string(change) + "; raise cosine_steps");
    }
  }
  const int s = plan.samples_per_period;
  const double T = plan.drive.T;

  Trajectory traj;
  const std::size_t total = static_cast<std::size_t>(plan.n_periods) * s + 1;
  traj.times.reserve(total);
  traj.states.reserve(total);
  traj.stroboscopic.reserve(total);

  CMatrix block = psi0;
  auto record = [&](double t, bool strobe) {
    const double drift = std::abs(block.col(0).norm() - 1.0);
    if (drift > 1e-8) {
      throw std::runtime_error("evolve: norm drift " + std::to_string(drift) + " at t=" + std::to_string(t) +
                               " (scheme " + to_string(plan.scheme) + ")");
    }
    traj.times.push_back(t);
    traj.states.push_back(block.col(0));
    traj.stroboscopic.push_back(strobe);
  };
  for (int n = 0; n < plan.n_periods; ++n) {
    for (int k = 0; k < s; ++k) {
      record(n * T + k * T / s, k == 0);
      prop.step_interval(block, k);
    }
  }
  record(plan.n_periods * T, true);
  return traj;
}

MovingFrameFourier moving_frame_fourier(const ModelParams& params, double K0, const BasisPtr& basis, int points,
                                        int harmonics) {
  if (basis->size() > kDenseLimit) throw std::invalid_argument("moving_frame_fourier: sector too large");
  if (points < 2 * harmonics + 1) throw std::invalid_argument("moving_frame_fourier: too few quadrature points");
  const CMatrix h = build_sparse(h0(params), basis).dense();
  const HermitianExponential jx(build_sparse(jx_total(basis->rungs()), basis).dense());
  const auto n = h.rows();

  MovingFrameFourier out;
  out.average = CMatrix::Zero(n, n);
  out.positive.assign(harmonics, CMatrix::Zero(n, n));
  out.negative.assign(harmonics, CMatrix::Zero(n, n));
  // Period set to 1: the components do not depend on T.
  for (int p = 0; p < points; ++p) {
    const double phase = 2 * pi * p / points;
    const CMatrix r = jx.unitary(-K0 * std::sin(phase));  // e^{i K0 sin(wt) Jx}
    const CMatrix v = r * h * r.adjoint();
    out.average += v;
    for (int j = 1; j <= harmonics; ++j) {
      out.positive[j - 1] += v * std::exp(cplx(0.0, -j * phase));
      out.negative[j - 1] += v * std::exp(cplx(0.0, j * phase));
    }
  }
  out.average /= points;
  CMatrix first = CMatrix::Zero(n, n);
  for (int j = 1; j <= harmonics; ++j) {
    out.positive[j - 1] /= points;
    out.negative[j - 1] /= points;
    first += commutator(out.positive[j - 1], out.negative[j - 1]) / double(j);
  }
  out.first_order_norm = spectral_norm(first);
  out.tail_norm = std::max(spectral_norm(out.positive.back()), spectral_norm(out.negative.back()));
  return out;
}

double kick_operator_residual(const PropagationPlan& plan, const BasisPtr& basis, const CVector& psi0) {
  if (plan.scheme != Scheme::cosine_drive) throw std::invalid_argument("kick_operator_residual: needs a cosine drive");
  if (basis->size() > kDenseLimit) throw std::invalid_argument("kick_operator_residual: sector too large");
  const Trajectory traj = evolve(plan, basis, psi0);
  const HermitianExponential heff(build_sparse(h_eff_continuous(plan.model, plan.drive.K0), basis).dense());
  const HermitianExponential jx(build_sparse(jx_total(basis->rungs()), basis).dense());
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    const CVector predicted = jx.apply(heff.apply(psi0, t), plan.drive.K0 * std::sin(plan.drive.omega() * t));
    worst = std::max(worst, (traj.states[i] - predicted).norm());
  }
  return worst;
}

}  // namespace ladder
