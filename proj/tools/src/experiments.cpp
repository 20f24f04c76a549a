#include "ladder/cli/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include "ladder/cli/acceptance.hpp"
#include "ladder/floquet.hpp"
#include "ladder/freefermion.hpp"
#include "ladder/models.hpp"
#include "ladder/observables.hpp"
#include "ladder/rgflow.hpp"

namespace ladder::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<ParamSpec> join(std::initializer_list<std::vector<ParamSpec>> parts) {
  std::vector<ParamSpec> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::vector<ParamSpec> model_schema(const std::string& U0, const std::string& L, const std::string& N) {
  return {{"model.tau", "1", "hopping amplitude"},
          {"model.U0", U0, "intra-leg nearest-neighbour interaction"},
          {"model.L", L, "rungs"},
          {"model.N", N, "particles"},
          {"model.boundary", "open", "open or periodic"}};
}

std::vector<ParamSpec> drive_schema(const std::string& alpha, const std::string& T) {
  return {{"drive.alpha", alpha, "fraction of the period spent under H0"},
          {"drive.eta", "pi/2", "pulse angle"},
          {"drive.T", T, "drive period"},
          {"drive.tp", "0", "square-pulse duration"},
          {"drive.K0", "0", "cosine-drive strength A/omega"},
          {"drive.alphas", "0.25,0.25,0.25,0.25", "segment fractions of the two-pulse sequence"}};
}

std::vector<ParamSpec> scheme_schema(const std::string& scheme) {
  return {{"drive.scheme", scheme, "pulse, two-pulse, square, cosine or effective"},
          {"drive.effective", "natural", "effective Hamiltonian: natural, trotter, pulse, pure-pair, continuous, impure"}};
}

std::vector<ParamSpec> run_schema(const std::string& periods, const std::string& samples) {
  return {{"run.periods", periods, "number of drive periods"},
          {"run.samples", samples, "samples per period"},
          {"run.cosine_steps", "1024", "integrator steps per period for the cosine drive"}};
}

Boundary read_boundary(const RunConfig& cfg) {
  const auto& s = cfg.get_string("model.boundary");
  if (s == "open") return Boundary::open;
  if (s == "periodic") return Boundary::periodic;
  throw ConfigError("model.boundary: expected open or periodic, got " + s);
}

ModelParams read_model(const RunConfig& cfg) {
  ModelParams m;
  m.tau = cfg.get_double("model.tau");
  m.U0 = cfg.get_double("model.U0");
  m.L = cfg.get_int("model.L");
  m.boundary = read_boundary(cfg);
  if (2 * m.L > kMaxModes) {
    throw InfeasibleError("model.L = " + std::to_string(m.L) + ": at most " + std::to_string(kMaxModes / 2) +
                          " rungs fit the bit encoding");
  }
  validate(m);
  return m;
}

int read_particles(const RunConfig& cfg, const ModelParams& m) {
  const int N = cfg.get_int("model.N");
  if (N < 0 || N > 2 * m.L) throw ConfigError("model.N must lie in [0, 2L]");
  return N;
}

DriveParams read_drive(const RunConfig& cfg) {
  DriveParams d;
  d.alpha = cfg.get_double("drive.alpha");
  d.eta = cfg.get_double("drive.eta");
  d.T = cfg.get_double("drive.T");
  d.t_p = cfg.get_double("drive.tp");
  d.K0 = cfg.get_double("drive.K0");
  const auto a = cfg.get_list("drive.alphas");
  if (a.size() != 4) throw ConfigError("drive.alphas: expected four fractions");
  std::copy(a.begin(), a.end(), d.alphas4.begin());
  return d;
}

Scheme read_scheme(const std::string& s) {
  if (s == "pulse") return Scheme::pulse_sequence;
  if (s == "two-pulse") return Scheme::two_pulse_sequence;
  if (s == "square") return Scheme::square_drive;
  if (s == "cosine") return Scheme::cosine_drive;
  if (s == "effective") return Scheme::effective_static;
  throw ConfigError("drive.scheme: unknown scheme '" + s + "'");
}

EffectiveModel read_effective(const std::string& s) {
  if (s == "trotter") return EffectiveModel::trotter;
  if (s == "pulse") return EffectiveModel::pulse;
  if (s == "pure-pair") return EffectiveModel::pure_pair;
  if (s == "continuous") return EffectiveModel::continuous;
  if (s == "impure") return EffectiveModel::impure;
  throw ConfigError("unknown effective Hamiltonian '" + s + "'");
}

PropagationPlan read_plan(const RunConfig& cfg) {
  PropagationPlan plan;
  plan.model = read_model(cfg);
  plan.drive = read_drive(cfg);
  plan.scheme = read_scheme(cfg.get_string("drive.scheme"));
  const auto& eff = cfg.get_string("drive.effective");
  plan.effective = eff == "natural" ? natural_effective_model(plan.scheme) : read_effective(eff);
  plan.n_periods = cfg.get_int("run.periods");
  plan.samples_per_period = cfg.get_int("run.samples");
  plan.cosine_steps = cfg.get_int("run.cosine_steps");
  validate(plan);
  return plan;
}

TermList read_hamiltonian(const RunConfig& cfg, const ModelParams& m, const DriveParams& d) {
  const auto& name = cfg.get_string("drive.effective");
  if (name == "bare") return h0(m);
  if (name == "natural") throw ConfigError("drive.effective: name a Hamiltonian (bare, pulse, trotter, ...)");
  return effective_hamiltonian(read_effective(name), m, d);
}

void require_feasible(int L, int N, double limit, const std::string& method) {
  const double dim = ladder_dimension(L, N);
  if (dim > limit) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "L = %d, N = %d: estimated sector dimension %.0f exceeds the %s limit of %.0f", L, N,
                  dim, method.c_str(), limit);
    throw InfeasibleError(buf);
  }
}

FockState read_state(const RunConfig& cfg, const std::string& key, int modes) {
  FockState s;
  for (double x : cfg.get_list(key)) {
    const int m = static_cast<int>(x);
    if (m != x || m < 0 || m >= modes) {
      throw ConfigError(key + ": mode " + format_number(x) + " outside 0.." + std::to_string(modes - 1));
    }
    if (s.occupied(m)) throw ConfigError(key + ": mode " + std::to_string(m) + " listed twice");
    s.bits |= Bits{1} << m;
  }
  return s;
}

CVector basis_vector(const BasisPtr& basis, FockState s, const std::string& key) {
  const auto idx = basis->index_of(s);
  if (!idx) throw ConfigError(key + " is not a state of " + basis->describe());
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(basis->size()));
  psi(static_cast<Eigen::Index>(*idx)) = 1.0;
  return psi;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw ConfigError("grid needs at least one point");
  if (n == 1) return {lo};
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  out.back() = hi;
  return out;
}

// Leading columns that make each row self-describing.
struct Params {
  std::vector<std::string> names;
  std::vector<Cell> values;

  Table table(std::vector<std::string> cols) const {
    auto all = names;
    all.insert(all.end(), cols.begin(), cols.end());
    return Table(all);
  }
  void add(Table& t, std::vector<Cell> row) const {
    auto all = values;
    all.insert(all.end(), row.begin(), row.end());
    t.add_row(std::move(all));
  }
};

Params drive_params(const PropagationPlan& p, int N) {
  return {{"L", "N", "U0", "alpha", "eta", "T", "tp", "K0", "scheme"},
          {(long long)p.model.L, (long long)N, p.model.U0, p.drive.alpha, p.drive.eta, p.drive.T, p.drive.t_p, p.drive.K0,
           std::string(to_string(p.scheme))}};
}

Params static_params(const ModelParams& m, int N, const DriveParams& d, const std::string& hamiltonian) {
  return {{"L", "N", "U0", "alpha", "hamiltonian"},
          {(long long)m.L, (long long)N, m.U0, d.alpha, hamiltonian}};
}

double tolerance(const RunConfig& cfg, const RunContext& ctx, const std::string& key) {
  return ctx.tolerance.value_or(cfg.get_double(key));
}

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

// ---- rabi ------------------------------------------------------------------

ExperimentOutput run_rabi(const RunConfig& cfg, const RunContext& ctx) {
  const auto plan = read_plan(cfg);
  const int N = read_particles(cfg, plan.model);
  require_feasible(plan.model.L, N, kStatePropagationLimit, "state propagation");
  const auto basis = make_ladder_basis(plan.model.L, N);
  const auto from = read_state(cfg, "state.initial", basis->modes());
  const auto to = read_state(cfg, "state.target", basis->modes());
  const CVector psi0 = basis_vector(basis, from, "state.initial");
  basis_vector(basis, to, "state.target");

  const auto exact = evolve(plan, basis, psi0);
  auto eff_plan = plan;
  eff_plan.scheme = Scheme::effective_static;
  const auto eff = evolve(eff_plan, basis, psi0);

  const auto params = drive_params(plan, N);
  Table table = params.table({"t", "stroboscopic", "population_initial", "population_target", "population_target_effective"});
  std::vector<double> ts;
  std::vector<double> ps;
  for (std::size_t i = 0; i < exact.times.size(); ++i) {
    const double p_target = population(exact.states[i], basis, to);
    params.add(table, {exact.times[i], (long long)exact.stroboscopic[i], population(exact.states[i], basis, from),
                       p_target, population(eff.states[i], basis, to)});
    if (exact.stroboscopic[i]) {
      ts.push_back(exact.times[i]);
      ps.push_back(p_target);
    }
  }

  ExperimentOutput out;
  const auto period = oscillation_period(ts, ps);
  out.summary["rabi_period"] = optional_json(period);
  // The closed-form period refers to the two-particle plaquette.
  if (plan.scheme == Scheme::pulse_sequence && plan.model.L == 2 && N == 2) {
    const double expected = 2 * pi / std::abs(plan.model.U0 * (1 - plan.drive.alpha));
    const double tol = tolerance(cfg, ctx, "check.tolerance");
    out.summary["expected_period"] = expected;
    out.summary["tolerance"] = tol;
    if (period) out.summary["relative_error"] = std::abs(*period - expected) / expected;
    if (!period || std::abs(*period - expected) / expected > tol) {
      out.ok = false;
      out.failure = period ? "Rabi period off by more than the tolerance" : "no Rabi oscillation resolved";
    }
  }
  out.tables.emplace_back("rabi", std::move(table));
  return out;
}

// ---- parity ----------------------------------------------------------------

ExperimentOutput run_parity(const RunConfig& cfg, const RunContext& ctx) {
  const auto plan = read_plan(cfg);
  const int N = read_particles(cfg, plan.model);
  require_feasible(plan.model.L, N, kBlockPropagationLimit, "all-states propagation");
  const auto basis = make_ladder_basis(plan.model.L, N);

  const auto exact = parity_change_probability(plan, basis);
  auto eff_plan = plan;
  eff_plan.scheme = Scheme::effective_static;
  const auto eff = parity_change_probability(eff_plan, basis);

  const auto params = drive_params(plan, N);
  Table table = params.table({"t", "stroboscopic", "P_exact", "P_effective"});
  double strobe = 0.0;
  double inside = 0.0;
  double eff_max = 0.0;
  std::optional<double> first_above;
  const double level = cfg.get_double("parity.level");
  for (std::size_t i = 0; i < exact.times.size(); ++i) {
    const double p = exact.mean_probability[i];
    params.add(table, {exact.times[i], (long long)exact.stroboscopic[i], p, eff.mean_probability[i]});
    double& peak = exact.stroboscopic[i] ? strobe : inside;
    peak = std::max(peak, p);
    eff_max = std::max(eff_max, eff.mean_probability[i]);
    if (exact.stroboscopic[i] && p > level && !first_above) first_above = exact.times[i];
  }

  ExperimentOutput out;
  out.summary = {{"max_stroboscopic_exact", strobe},
                 {"max_within_period_exact", inside},
                 {"max_effective", eff_max},
                 {"level", level},
                 {"first_stroboscopic_time_above_level", optional_json(first_above)}};
  if (ctx.tolerance) {
    out.summary["tolerance"] = *ctx.tolerance;
    if (strobe >= *ctx.tolerance) {
      out.ok = false;
      out.failure = "stroboscopic parity-change probability reached the tolerance";
    }
  }
  out.tables.emplace_back("parity", std::move(table));
  return out;
}

// ---- micromotion -----------------------------------------------------------

ExperimentOutput run_micromotion(const RunConfig& cfg, const RunContext& ctx) {
  const auto plan = read_plan(cfg);
  const int N = read_particles(cfg, plan.model);
  require_feasible(plan.model.L, N, kBlockPropagationLimit, "all-states propagation");
  const auto basis = make_ladder_basis(plan.model.L, N);
  const CVector psi0 = basis_vector(basis, read_state(cfg, "state.initial", basis->modes()), "state.initial");

  const auto mean = parity_change_probability(plan, basis);
  const auto traj = evolve(plan, basis, psi0);
  const auto parity_op = leg_parity_operator(basis);

  const auto params = drive_params(plan, N);
  Table table = params.table({"t", "phase", "stroboscopic", "P_mean", "leg_parity_initial_state"});
  double strobe = 0.0;
  double inside = 0.0;
  for (std::size_t i = 0; i < mean.times.size(); ++i) {
    const double t = mean.times[i];
    const double phase = t / plan.drive.T - std::floor(t / plan.drive.T + 1e-9);
    const double p = mean.mean_probability[i];
    params.add(table, {t, std::max(phase, 0.0), (long long)mean.stroboscopic[i], p,
                       parity_op.expectation(traj.states[i]).real()});
    if (mean.stroboscopic[i]) {
      strobe = std::max(strobe, p);
    } else {
      inside = std::max(inside, p);
    }
  }

  ExperimentOutput out;
  out.summary = {{"max_stroboscopic", strobe}, {"max_within_period", inside}};
  if (plan.scheme == Scheme::cosine_drive) {
    const double residual = kick_operator_residual(plan, basis, psi0);
    out.summary["kick_operator_residual"] = residual;
    if (ctx.tolerance && residual >= *ctx.tolerance) {
      out.ok = false;
      out.failure = "micromotion prediction deviates beyond the tolerance";
    }
  }
  out.tables.emplace_back("micromotion", std::move(table));
  return out;
}

// ---- rgscan ----------------------------------------------------------------

ExperimentOutput run_rgscan(const RunConfig& cfg, const RunContext& ctx) {
  ScanRequest rq;
  rq.U0 = linspace(cfg.get_double("rg.U0_min"), cfg.get_double("rg.U0_max"), cfg.get_int("rg.U0_points"));
  rq.alpha = linspace(cfg.get_double("rg.alpha_min"), cfg.get_double("rg.alpha_max"), cfg.get_int("rg.alpha_points"));
  rq.nu = cfg.get_double("rg.nu");
  rq.tau = cfg.get_double("rg.tau");
  const auto& velocity = cfg.get_string("rg.velocity");
  if (velocity == "custom") {
    rq.velocity = {VelocityConvention::custom, cfg.get_double("rg.vF")};
  } else if (velocity != "tight_binding") {
    throw ConfigError("rg.velocity: expected tight_binding or custom");
  }
  rq.flow.threshold = ctx.threshold.value_or(cfg.get_double("rg.threshold"));
  rq.flow.dl = cfg.get_double("rg.dl");
  rq.flow.l_max = cfg.get_double("rg.l_max");
  if (!(rq.flow.threshold > 0) || !(rq.flow.dl > 0) || !(rq.flow.l_max > 0)) {
    throw ConfigError("rg.threshold, rg.dl and rg.l_max must be positive");
  }

  const auto points = phase_scan(rq, ctx.threads);

  Table table({"U0", "alpha", "nu", "threshold", "l_max", "outcome", "l_star", "xi_inv", "K_minus_bare", "v_minus",
               "y_minus", "y_p", "y_bs", "marginality", "error"});
  std::map<std::string, long long> counts;
  long long errors = 0;
  for (const auto& p : points) {
    const auto& b = p.bare;
    const auto& f = p.flow;
    const std::string outcome = f ? to_string(f->outcome) : "error";
    if (p.error.empty()) ++counts[outcome];
    else ++errors;
    table.add_row({p.U0, p.alpha, p.nu, rq.flow.threshold, rq.flow.l_max, outcome, f ? f->l_star : kNaN,
                   f ? f->xi_inv : kNaN, b ? b->K_minus : kNaN, b ? b->v_minus : kNaN, b ? b->y_minus : kNaN,
                   b ? b->y_p : kNaN, b ? b->y_bs : kNaN, b ? b->marginality() : kNaN, p.error});
  }

  // xi_inv ~ C (1 - alpha^kappa) along each U0 row, over its pair-dominant points.
  Table fits({"U0", "nu", "threshold", "points", "kappa", "prefactor", "rms", "error"});
  const std::size_t na = rq.alpha.size();
  for (std::size_t i = 0; i < rq.U0.size(); ++i) {
    std::vector<double> a;
    std::vector<double> x;
    for (std::size_t j = 0; j < na; ++j) {
      const auto& p = points[i * na + j];
      if (p.flow && p.flow->outcome == FlowOutcome::pair_dominant && p.flow->xi_inv > 0) {
        a.push_back(p.alpha);
        x.push_back(p.flow->xi_inv);
      }
    }
    if (a.size() < 3) {
      fits.add_row({rq.U0[i], rq.nu, rq.flow.threshold, (long long)a.size(), kNaN, kNaN, kNaN,
                    std::string("fewer than 3 pair-dominant points")});
      continue;
    }
    try {
      const auto fit = fit_power_law(a, x);
      fits.add_row({rq.U0[i], rq.nu, rq.flow.threshold, (long long)a.size(), fit.kappa, fit.prefactor, fit.rms,
                    std::string()});
    } catch (const std::exception& e) {
      fits.add_row({rq.U0[i], rq.nu, rq.flow.threshold, (long long)a.size(), kNaN, kNaN, kNaN, std::string(e.what())});
    }
  }

  ExperimentOutput out;
  out.summary["outcomes"] = counts;
  out.summary["errors"] = errors;
  out.summary["threshold"] = rq.flow.threshold;
  out.tables.emplace_back("rgscan", std::move(table));
  out.tables.emplace_back("rgfit", std::move(fits));
  return out;
}

// ---- gaps ------------------------------------------------------------------

ExperimentOutput run_gaps(const RunConfig& cfg, const RunContext&) {
  const auto model = read_model(cfg);
  const int N = read_particles(cfg, model);
  const auto drive = read_drive(cfg);
  // Report the largest of the three sectors.
  int widest = N;
  for (int n : {N - 1, N + 1}) {
    if (ladder_dimension(model.L, n) > ladder_dimension(model.L, widest)) widest = n;
  }
  require_feasible(model.L, widest, kDiagonalizationLimit, "exact-diagonalization");
  const auto h = read_hamiltonian(cfg, model, drive);
  const auto rep = charge_gaps(h, model.L, N, cfg.get_bool("gaps.resolve_parity"));

  const auto params = static_params(model, N, drive, cfg.get_string("drive.effective"));
  Table table = params.table({"n", "leg_parity", "E0"});
  for (const auto& [key, e] : rep.E0) params.add(table, {(long long)key.first, (long long)key.second, e});

  ExperimentOutput out;
  out.summary = {{"Delta_Qplus", rep.Delta_Qplus}, {"Delta_Qminus", rep.Delta_Qminus},
                 {"Delta_topo", rep.Delta_topo},   {"Delta_Q0", rep.Delta_Q0},
                 {"parity_resolved", rep.parity_resolved}};
  if (rep.parity_resolved) {
    out.summary["parity_splitting"] = rep.parity_splitting;
    out.summary["bulk_gap"] = rep.bulk_gap;
    out.summary["quasi_degenerate"] = rep.parity_splitting < rep.bulk_gap;
  }
  out.tables.emplace_back("gaps", std::move(table));
  return out;
}

// ---- entspec / correlations ------------------------------------------------

std::vector<std::optional<int>> read_sectors(const std::string& s) {
  if (s == "both") return {1, -1};
  if (s == "+1" || s == "1") return {1};
  if (s == "-1") return {-1};
  if (s == "none") return {std::nullopt};
  throw ConfigError("sector parity: expected both, +1, -1 or none");
}

struct SectorGround {
  std::optional<int> parity;
  BasisPtr basis;
  EigenPair ground;
};

std::vector<SectorGround> sector_grounds(const RunConfig& cfg, const std::string& key, const ModelParams& model, int N,
                                         const DriveParams& drive) {
  require_feasible(model.L, N, kDiagonalizationLimit, "exact-diagonalization");
  const auto h = read_hamiltonian(cfg, model, drive);
  std::vector<SectorGround> out;
  for (const auto& f : read_sectors(cfg.get_string(key))) {
    auto basis = make_ladder_basis(model.L, N, f);
    if (basis->size() == 0) continue;
    auto pairs = ground_states(build_sparse(h, basis), 1);
    out.push_back({f, basis, std::move(pairs.front())});
  }
  if (out.empty()) throw ConfigError("no non-empty sector selected");
  return out;
}

ExperimentOutput run_entspec(const RunConfig& cfg, const RunContext& ctx) {
  const auto model = read_model(cfg);
  const int N = read_particles(cfg, model);
  const auto drive = read_drive(cfg);
  int cut = cfg.get_int("ent.cut");
  if (cut == 0) cut = model.L / 2;
  const int count = cfg.get_int("ent.pair_count");
  const double fraction = tolerance(cfg, ctx, "ent.pair_fraction");

  const auto params = static_params(model, N, drive, cfg.get_string("drive.effective"));
  Table table = params.table({"cut", "sector_parity", "energy", "k", "xi", "lambda", "block_charge", "block_parity"});
  ExperimentOutput out;
  out.summary["sectors"] = nlohmann::json::array();
  for (const auto& s : sector_grounds(cfg, "ent.parity", model, N, drive)) {
    const auto levels = entanglement_spectrum(s.ground.state, s.basis, cut);
    for (std::size_t k = 0; k < levels.size(); ++k) {
      const auto& l = levels[k];
      params.add(table, {(long long)cut, (long long)s.parity.value_or(0), s.ground.energy, (long long)k, l.xi, l.lambda,
                         (long long)l.charge, (long long)l.parity});
    }
    const auto pc = check_level_pairing(levels, count, fraction);
    out.summary["sectors"].push_back({{"parity", s.parity.value_or(0)},
                                      {"energy", s.ground.energy},
                                      {"levels", levels.size()},
                                      {"paired", pc.paired},
                                      {"max_pair_splitting", pc.max_pair_splitting},
                                      {"mean_spacing", pc.mean_spacing},
                                      {"tolerance", pc.tolerance}});
  }
  out.tables.emplace_back("entspec", std::move(table));
  return out;
}

ExperimentOutput run_correlations(const RunConfig& cfg, const RunContext&) {
  const auto model = read_model(cfg);
  const int N = read_particles(cfg, model);
  const auto drive = read_drive(cfg);
  const int L = model.L;

  const auto params = static_params(model, N, drive, cfg.get_string("drive.effective"));
  Table table = params.table({"sector_parity", "energy", "j", "G_a_abs", "G_a_re", "G_a_im", "G_b_abs", "order_parameter_abs"});
  ExperimentOutput out;
  out.summary["sectors"] = nlohmann::json::array();
  for (const auto& s : sector_grounds(cfg, "corr.parity", model, N, drive)) {
    std::vector<double> ga(L);
    for (int j = 0; j < L; ++j) {
      const cplx a = two_point(s.ground.state, s.basis, Leg::a, 0, j);
      const cplx b = two_point(s.ground.state, s.basis, Leg::b, 0, j);
      ga[j] = std::abs(a);
      params.add(table, {(long long)s.parity.value_or(0), s.ground.energy, (long long)j, ga[j], a.real(), a.imag(),
                         std::abs(b), std::abs(order_parameter(s.ground.state, s.basis, j))});
    }
    const int mid = std::max(L / 2 - 1, 0);
    out.summary["sectors"].push_back({{"parity", s.parity.value_or(0)},
                                      {"energy", s.ground.energy},
                                      {"end", ga[L - 1]},
                                      {"mid", ga[mid]},
                                      {"end_revival", ga[L - 1] > ga[mid]}});
  }
  out.tables.emplace_back("correlations", std::move(table));
  return out;
}

// ---- impure-pulse ----------------------------------------------------------

ExperimentOutput run_impure(const RunConfig& cfg, const RunContext& ctx) {
  auto plan = read_plan(cfg);
  plan.scheme = Scheme::square_drive;
  const int N = read_particles(cfg, plan.model);
  require_feasible(plan.model.L, N, kBlockPropagationLimit, "all-states propagation");
  const auto basis = make_ladder_basis(plan.model.L, N);
  const double tol = tolerance(cfg, ctx, "check.tolerance");

  Table table({"L", "N", "U0", "alpha", "T", "tp_over_T", "t", "stroboscopic", "P_exact", "P_effective"});
  ExperimentOutput out;
  out.summary["ratios"] = nlohmann::json::array();
  for (double r : cfg.get_list("impure.tp_over_T")) {
    auto p = plan;
    p.drive.t_p = r * p.drive.T;
    validate(p);
    auto e = p;
    e.scheme = Scheme::effective_static;
    e.effective = EffectiveModel::impure;
    const auto ex = parity_change_probability(p, basis);
    const auto ef = parity_change_probability(e, basis);
    double peak = 0.0;
    double dev = 0.0;
    for (std::size_t i = 0; i < ex.times.size(); ++i) {
      table.add_row({(long long)p.model.L, (long long)N, p.model.U0, p.drive.alpha, p.drive.T, r, ex.times[i],
                     (long long)ex.stroboscopic[i], ex.mean_probability[i], ef.mean_probability[i]});
      if (!ex.stroboscopic[i]) continue;
      peak = std::max(peak, ex.mean_probability[i]);
      dev = std::max(dev, std::abs(ex.mean_probability[i] - ef.mean_probability[i]));
    }
    const double rel = peak > 0 ? dev / peak : 0.0;
    out.summary["ratios"].push_back({{"tp_over_T", r}, {"peak_exact", peak}, {"max_deviation", dev}, {"relative", rel}});
    if (rel >= tol) {
      out.ok = false;
      out.failure = "exact and effective parity-change curves differ beyond the tolerance";
    }
  }
  out.summary["tolerance"] = tol;
  out.tables.emplace_back("impure_pulse", std::move(table));
  return out;
}

// ---- continuous-drive ------------------------------------------------------

ExperimentOutput run_continuous(const RunConfig& cfg, const RunContext& ctx) {
  auto plan = read_plan(cfg);
  plan.scheme = Scheme::cosine_drive;
  plan.effective = EffectiveModel::continuous;
  const int N = read_particles(cfg, plan.model);
  require_feasible(plan.model.L, N, kBlockPropagationLimit, "dense moving-frame");
  const auto basis = make_ladder_basis(plan.model.L, N);
  const CVector psi0 = basis_vector(basis, read_state(cfg, "state.initial", basis->modes()), "state.initial");
  const int nodes = cfg.get_int("cont.points");
  const int harmonics = cfg.get_int("cont.harmonics");
  const double tol = tolerance(cfg, ctx, "check.tolerance");

  Table table({"L", "N", "U0", "T", "K0", "U1_effective", "average_deviation", "first_order_norm", "tail_norm",
               "kick_residual"});
  double worst = 0.0;
  for (double K0 : cfg.get_list("cont.K0")) {
    const auto f = moving_frame_fourier(plan.model, K0, basis, nodes, harmonics);
    const CMatrix h = build_sparse(h_eff_continuous(plan.model, K0), basis).dense();
    const double dev = (f.average - h).cwiseAbs().maxCoeff();
    auto p = plan;
    p.drive.K0 = K0;
    validate(p);
    const double residual = kick_operator_residual(p, basis, psi0);
    worst = std::max({worst, dev, f.first_order_norm});
    table.add_row({(long long)plan.model.L, (long long)N, plan.model.U0, plan.drive.T, K0,
                   continuous_couplings(plan.model.U0, K0).U1, dev, f.first_order_norm, f.tail_norm, residual});
  }

  ExperimentOutput out;
  out.summary = {{"worst_deviation", worst}, {"tolerance", tol}};
  if (worst >= tol) {
    out.ok = false;
    out.failure = "moving-frame average or first-order correction beyond the tolerance";
  }
  out.tables.emplace_back("continuous_drive", std::move(table));
  return out;
}

// ---- kitaev-validate -------------------------------------------------------

ExperimentOutput run_kitaev(const RunConfig& cfg, const RunContext&) {
  KitaevSuite s;
  s.t = cfg.get_double("kitaev.t");
  s.L_split = cfg.get_int("kitaev.L_split");
  s.L_ed = cfg.get_int("kitaev.L_ed");
  s.mu_ed = cfg.get_double("kitaev.mu_ed");
  s.Delta_ed = cfg.get_double("kitaev.Delta_ed");
  s.scan_points = cfg.get_int("kitaev.scan_points");
  s.scan_mu_max = cfg.get_double("kitaev.scan_mu_max");
  if (s.L_ed > 16) throw InfeasibleError("kitaev.L_ed = " + std::to_string(s.L_ed) + ": many-body check limited to 16 sites");

  auto r = run_kitaev_suite(s);
  Table checks({"check", "measured", "tolerance", "pass", "detail"});
  ExperimentOutput out;
  for (const auto& c : r.checks) {
    checks.add_row({c.name, c.measured, c.tolerance, std::string(c.pass ? "PASS" : "FAIL"), c.detail});
    out.summary[c.name] = c.pass;
    if (!c.pass) {
      out.ok = false;
      out.failure = "Kitaev check '" + c.name + "' failed";
    }
  }
  out.tables.emplace_back("kitaev_checks", std::move(checks));
  out.tables.emplace_back("kitaev_gap", std::move(r.gap_scan));
  return out;
}

// ---- selftest --------------------------------------------------------------

ExperimentOutput run_selftest(const RunConfig& cfg, const RunContext& ctx) {
  std::set<int> only;
  for (double x : cfg.get_list("selftest.only")) {
    const int id = static_cast<int>(x);
    if (id != x || id < 1 || id > kCriteriaCount) throw ConfigError("selftest.only: no criterion " + format_number(x));
    only.insert(id);
  }
  Table table({"id", "name", "pass", "measured", "notes", "seconds", "budget_seconds"});
  ExperimentOutput out;
  int failed = 0;
  for (const auto& r : run_acceptance(ctx.threads, only)) {
    table.add_row({(long long)r.id, r.name, std::string(r.pass ? "PASS" : "FAIL"), r.measured, r.notes, r.seconds,
                   r.budget_seconds});
    out.summary[std::to_string(r.id)] = r.pass;
    if (!r.pass) ++failed;
  }
  if (failed) {
    out.ok = false;
    out.failure = std::to_string(failed) + " acceptance criteria failed";
  }
  out.tables.emplace_back("selftest", std::move(table));
  return out;
}

std::vector<Experiment> build_registry() {
  std::vector<Experiment> r;
  r.push_back({"rabi", "Population oscillation between two pair states under the drive",
               join({model_schema("-0.7", "2", "2"), drive_schema("1/3", "0.2"), scheme_schema("pulse"),
                     run_schema("200", "1"),
                     {{"state.initial", "0,2", "occupied modes of the initial state"},
                      {"state.target", "1,3", "occupied modes whose population is tracked"},
                      {"check.tolerance", "0.01", "relative tolerance on the plaquette Rabi period"}}}),
               run_rabi});
  r.push_back({"parity", "Mean probability of changing leg parity, exact drive against effective Hamiltonian",
               join({model_schema("-0.7", "2", "2"), drive_schema("1/3", "0.2"), scheme_schema("pulse"),
                     run_schema("100", "32"), {{"parity.level", "0.1", "level whose first crossing is reported"}}}),
               run_parity});
  r.push_back({"micromotion", "Parity breaking inside the period against stroboscopic samples",
               join({model_schema("-0.7", "2", "2"), drive_schema("1/3", "0.2"), scheme_schema("pulse"),
                     run_schema("3", "64"), {{"state.initial", "0,2", "occupied modes of the tracked state"}}}),
               run_micromotion});
  r.push_back({"rgscan", "Bosonization RG flow over a (U0, alpha) grid",
               {{"rg.U0_min", "-1.5", ""},
                {"rg.U0_max", "-0.3", ""},
                {"rg.U0_points", "5", ""},
                {"rg.alpha_min", "0.5", ""},
                {"rg.alpha_max", "1", ""},
                {"rg.alpha_points", "51", ""},
                {"rg.nu", "1/3", "filling per leg"},
                {"rg.tau", "1", "hopping amplitude"},
                {"rg.velocity", "tight_binding", "tight_binding or custom"},
                {"rg.vF", "0", "Fermi velocity when rg.velocity = custom"},
                {"rg.threshold", "9", "strong-coupling threshold"},
                {"rg.dl", "1e-4", "RG step"},
                {"rg.l_max", "50", "largest RG time"}},
               run_rgscan, true, false});
  r.push_back({"gaps", "Charge gaps and parity splitting by exact diagonalization",
               join({model_schema("-1.5", "8", "4"), drive_schema("1/2", "0.1"),
                     {{"drive.effective", "pulse", "bare, trotter, pulse, pure-pair, continuous or impure"},
                      {"gaps.resolve_parity", "true", "split the N sector by leg parity"}}}),
               run_gaps, false, false});
  r.push_back({"entspec", "Entanglement spectrum of the ground state in each parity sector",
               join({model_schema("-1.5", "8", "4"), drive_schema("1/2", "0.1"),
                     {{"drive.effective", "pulse", "bare, trotter, pulse, pure-pair, continuous or impure"},
                      {"ent.parity", "both", "both, +1, -1 or none"},
                      {"ent.cut", "0", "rungs in the left block (0: L/2)"},
                      {"ent.pair_count", "8", "lowest levels grouped into pairs"},
                      {"ent.pair_fraction", "0.1", "pair splitting allowed, as a fraction of the mean spacing"}}}),
               run_entspec});
  r.push_back({"correlations", "Single-particle correlations from the first rung and the inter-leg order parameter",
               join({model_schema("-1.5", "8", "4"), drive_schema("1/2", "0.1"),
                     {{"drive.effective", "pulse", "bare, trotter, pulse, pure-pair, continuous or impure"},
                      {"corr.parity", "both", "both, +1, -1 or none"}}}),
               run_correlations, false, false});
  r.push_back({"impure-pulse", "Finite square pulses against their impure effective Hamiltonian",
               join({model_schema("-0.7", "2", "2"), drive_schema("1/2", "0.1"), scheme_schema("square"),
                     run_schema("500", "1"),
                     {{"impure.tp_over_T", "1/40,1/20", "pulse durations as fractions of T"},
                      {"check.tolerance", "0.1", "relative deviation allowed between the curves"}}}),
               run_impure});
  r.push_back({"continuous-drive", "Moving-frame average of the cosine drive and its first-order correction",
               join({model_schema("-0.7", "2", "2"), drive_schema("1/2", "0.1"), scheme_schema("cosine"),
                     run_schema("10", "8"),
                     {{"cont.K0", "0.5,1,1.5", "drive strengths"},
                      {"cont.points", "4096", "quadrature nodes per period"},
                      {"cont.harmonics", "8", "Fourier harmonics kept"},
                      {"state.initial", "0,2", "initial state for the micromotion residual"},
                      {"check.tolerance", "1e-8", "allowed deviation from the Bessel form"}}}),
               run_continuous});
  r.push_back({"kitaev-validate", "Free-fermion checks of the Kitaev chain",
               {{"kitaev.t", "1", "hopping; the sweet spot uses Delta = t, mu = 0"},
                {"kitaev.L_split", "30", "chain length for the splitting and entanglement checks"},
                {"kitaev.L_ed", "8", "chain length for the many-body comparison"},
                {"kitaev.mu_ed", "0.5", "chemical potential of the many-body comparison"},
                {"kitaev.Delta_ed", "0.7", "pairing of the many-body comparison"},
                {"kitaev.scan_points", "81", "points of the mu scan"},
                {"kitaev.scan_mu_max", "4", "mu range of the scan"}},
               run_kitaev, false, false});
  r.push_back({"selftest", "Acceptance suite with pinned tolerances",
               {{"selftest.only", "", "comma-separated criterion numbers (empty: all)"}},
               run_selftest, false, false});
  return r;
}

}  // namespace

double ladder_dimension(int L, int N) {
  if (N < 0 || N > 2 * L) return 0.0;
  double d = 1.0;
  for (int k = 1; k <= N; ++k) d = d * (2 * L - N + k) / k;
  return std::round(d);
}

const std::vector<Experiment>& experiments() {
  static const std::vector<Experiment> registry = build_registry();
  return registry;
}

const Experiment* find_experiment(std::string_view name) {
  for (const auto& e : experiments()) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

KitaevSuiteResult run_kitaev_suite(const KitaevSuite& s) {
  KitaevSuiteResult r;
  auto add = [&](std::string name, double measured, double tol, bool pass, std::string detail = {}) {
    r.checks.push_back({std::move(name), measured, tol, pass, std::move(detail)});
  };

  const KitaevParams sweet{s.t, 0.0, s.t, s.L_split, Boundary::open};
  const auto spec = kitaev_spectrum(sweet);
  add("sweet_spot_splitting", spec.energies(0), 1e-12, spec.energies(0) < 1e-12);
  add("particle_hole_symmetry", spec.particle_hole_defect, 1e-12, spec.particle_hole_defect < 1e-12);

  const auto levels = correlation_entanglement(sweet, s.L_split / 2);
  double split = levels.size() % 2 == 0 && !levels.empty() ? 0.0 : 1.0;
  for (std::size_t k = 0; k + 1 < levels.size(); k += 2) {
    split = std::max(split, std::abs(levels[k].lambda - levels[k + 1].lambda));
  }
  add("entanglement_doubling", split, 1e-10, split < 1e-10, std::to_string(levels.size()) + " levels");

  // Gap closing: the bulk gap vanishes at |mu| = 2t and the phase changes across it.
  const double edge = 2 * std::abs(s.t);
  double closing = 0.0;
  bool flips = true;
  double open_min = std::numeric_limits<double>::infinity();
  for (double sign : {1.0, -1.0}) {
    KitaevParams at{s.t, sign * edge, s.t, s.L_split, Boundary::open};
    closing = std::max(closing, kitaev_bulk_gap(at));
    KitaevParams in = at;
    in.mu = sign * (edge - 0.2);
    KitaevParams outside = at;
    outside.mu = sign * (edge + 0.2);
    flips = flips && phase_classify(in) == KitaevPhase::topological && phase_classify(outside) == KitaevPhase::trivial;
    open_min = std::min({open_min, kitaev_bulk_gap(in), kitaev_bulk_gap(outside)});
  }
  add("gap_closing", closing, 1e-9, closing < 1e-9 && flips && open_min > 1e-3,
      "gap 0.2 away from the transition >= " + format_number(open_min));

  // Many-body exact diagonalization against the BdG route.
  const KitaevParams ed{s.t, s.mu_ed, s.Delta_ed, s.L_ed, Boundary::open};
  const auto even = kitaev_ground_state_ed(ed, 1);
  const auto odd = kitaev_ground_state_ed(ed, -1);
  const auto& gs = even.energy <= odd.energy ? even : odd;
  const double e_bdg = kitaev_spectrum(ed).ground_energy;
  add("ground_energy_ed", std::abs(gs.energy - e_bdg), 1e-10, std::abs(gs.energy - e_bdg) < 1e-10);

  const int cut = s.L_ed / 2;
  auto lam = [](const std::vector<EntanglementLevel>& ls) {
    std::vector<double> v;
    for (const auto& l : ls) v.push_back(l.lambda);
    std::sort(v.rbegin(), v.rend());
    return v;
  };
  auto a = lam(entanglement_spectrum_modes(gs.state, gs.basis, cut));
  auto b = lam(correlation_entanglement(ed, cut));
  const std::size_t n = std::max(a.size(), b.size());
  a.resize(n, 0.0);
  b.resize(n, 0.0);
  double diff = 0.0;
  for (std::size_t k = 0; k < n; ++k) diff = std::max(diff, std::abs(a[k] - b[k]));
  add("entanglement_ed_vs_correlation", diff, 1e-8, diff < 1e-8, std::to_string(n) + " levels");

  for (double mu : linspace(-s.scan_mu_max, s.scan_mu_max, s.scan_points)) {
    const KitaevParams p{s.t, mu, s.t, s.L_split, Boundary::open};
    r.gap_scan.add_row({s.t, s.t, (long long)s.L_split, mu, kitaev_bulk_gap(p, 20001), std::string(to_string(phase_classify(p))),
                        majorana_splitting(p)});
  }
  return r;
}

}  // namespace ladder::cli
