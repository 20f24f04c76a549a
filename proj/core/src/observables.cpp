#include "ladder/observables.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>

#include "ladder/models.hpp"

namespace ladder {

namespace {

constexpr Bits kLegAMask = 0x5555555555555555ULL;

// sum_s conj(psi[s']) sign psi[s] over s -> (s', sign) = term|s>.
cplx term_expectation(const CVector& psi, const BasisPtr& basis, const FermionTerm& term) {
  if (psi.size() != static_cast<Eigen::Index>(basis->size())) {
    throw std::invalid_argument("state does not match the sector dimension");
  }
  cplx acc{};
  for (std::size_t col = 0; col < basis->size(); ++col) {
    if (psi(col) == cplx{}) continue;
    const auto image = apply_term(term, basis->state(col));
    if (!image) continue;
    const auto row = basis->index_of(image->state);
    if (!row) continue;
    acc += std::conj(psi(*row)) * double(image->sign) * psi(col);
  }
  return term.coefficient * acc;
}

}  // namespace

ParityChangeSeries parity_change_probability(const PropagationPlan& plan, const BasisPtr& basis) {
  if (basis->parity_filter() || basis->kind() != SectorBasis::Kind::fixed_number) {
    throw std::invalid_argument("parity_change_probability: needs an unfiltered ladder sector");
  }
  const auto n = static_cast<Eigen::Index>(basis->size());
  std::vector<int> parity(n);
  bool plus = false;
  bool minus = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    parity[i] = leg_parity(basis->state(i));
    (parity[i] > 0 ? plus : minus) = true;
  }
  if (!plus || !minus) {
    throw std::invalid_argument("parity_change_probability: sector " + basis->describe() + " has a single leg parity");
  }

  auto measure = [&](const CMatrix& u) {
    double total = 0.0;
    for (Eigen::Index s = 0; s < n; ++s) {
      for (Eigen::Index r = 0; r < n; ++r) {
        if (parity[r] != parity[s]) total += std::norm(u(r, s));
      }
    }
    return std::clamp(total / double(n), 0.0, 1.0);
  };

  FloquetPropagator prop(plan, basis);
  const int s = plan.samples_per_period;
  const double T = plan.drive.T;
  ParityChangeSeries out;
  CMatrix u = CMatrix::Identity(n, n);
  for (int period = 0; period < plan.n_periods; ++period) {
    for (int k = 0; k < s; ++k) {
      out.times.push_back(period * T + k * T / s);
      out.mean_probability.push_back(measure(u));
      out.stroboscopic.push_back(k == 0);
      prop.step_interval(u, k);
    }
  }
  out.times.push_back(plan.n_periods * T);
  out.mean_probability.push_back(measure(u));
  out.stroboscopic.push_back(true);
  return out;
}

double population(const CVector& psi, const BasisPtr& basis, FockState s) {
  const auto idx = basis->index_of(s);
  if (!idx) throw std::invalid_argument("population: state not in " + basis->describe());
  return std::norm(psi(*idx));
}

std::optional<double> oscillation_period(const std::vector<double>& times, const std::vector<double>& values,
                                         double level) {
  if (times.size() != values.size()) throw std::invalid_argument("oscillation_period: size mismatch");
  std::vector<double> crossings;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double lo = values[i] - level;
    const double hi = values[i + 1] - level;
    if (lo == 0.0 && i == 0) crossings.push_back(times[i]);
    if ((lo < 0.0 && hi >= 0.0) || (lo > 0.0 && hi <= 0.0)) {
      crossings.push_back(times[i] + (level - values[i]) * (times[i + 1] - times[i]) / (values[i + 1] - values[i]));
    }
  }
  if (crossings.size() < 3) return std::nullopt;
  return 2.0 * (crossings.back() - crossings.front()) / double(crossings.size() - 1);
}

std::vector<EigenPair> ground_states(const SparseOperator& h, int k, const LanczosOptions& options) {
  auto pairs = lanczos_lowest(h.matrix, k, options);
  for (const auto& p : pairs) {
    if (p.residual > options.residual_tolerance) {
      throw std::runtime_error("ground_states: residual " + std::to_string(p.residual) + " above tolerance on " +
                               h.basis->describe());
    }
  }
  return pairs;
}

GapReport charge_gaps(const TermList& h, int L, int N, bool resolve_parity) {
  if (N <= 0 || N >= 2 * L) {
    throw std::invalid_argument("charge_gaps: N = " + std::to_string(N) + " leaves no room for N-1 and N+1 on L = " +
                                std::to_string(L));
  }
  GapReport rep;
  rep.L = L;
  rep.N = N;
  rep.parity_resolved = resolve_parity;

  // Lowest `count` levels of every sector at particle number n, merged.
  auto levels = [&](int n, int count) {
    std::vector<double> merged;
    std::vector<std::optional<int>> filters;
    if (resolve_parity) {
      filters = {1, -1};
    } else {
      filters = {std::nullopt};
    }
    for (const auto& f : filters) {
      auto basis = make_ladder_basis(L, n, f);
      if (basis->size() == 0) continue;
      const int k = std::min<int>(count, static_cast<int>(basis->size()));
      const auto pairs = ground_states(build_sparse(h, basis), k);
      rep.E0[{n, f.value_or(0)}] = pairs.front().energy;
      for (const auto& p : pairs) merged.push_back(p.energy);
      if (n == N && resolve_parity) {
        const double gap = pairs.size() > 1 ? pairs[1].energy - pairs[0].energy : 0.0;
        rep.bulk_gap = (rep.bulk_gap == 0.0) ? gap : std::min(rep.bulk_gap, gap);
      }
    }
    std::sort(merged.begin(), merged.end());
    return merged;
  };

  const auto at_n = levels(N, 2);
  const auto above = levels(N + 1, 1);
  const auto below = levels(N - 1, 1);
  rep.Delta_Qplus = above.front() - at_n.front();
  rep.Delta_Qminus = below.front() - at_n.front();
  rep.Delta_topo = (rep.Delta_Qplus + rep.Delta_Qminus) / 2;
  rep.Delta_Q0 = at_n.size() > 1 ? at_n[1] - at_n[0] : 0.0;
  if (resolve_parity) rep.parity_splitting = std::abs(rep.E0.at({N, 1}) - rep.E0.at({N, -1}));
  return rep;
}

cplx two_point(const CVector& psi, const BasisPtr& basis, Leg leg, int i, int j) {
  if (i < 0 || j < 0 || i >= basis->rungs() || j >= basis->rungs()) {
    throw std::invalid_argument("two_point: rung index outside the ladder");
  }
  FermionTerm term{1.0, {cdag(mode_index(leg, i)), c(mode_index(leg, j))}};
  return term_expectation(psi, basis, term);
}

std::vector<EntanglementLevel> entanglement_spectrum_modes(const CVector& psi, const BasisPtr& basis, int left_modes) {
  if (left_modes < 0 || left_modes > basis->modes()) throw std::invalid_argument("entanglement_spectrum: bad cut");
  if (psi.size() != static_cast<Eigen::Index>(basis->size())) {
    throw std::invalid_argument("entanglement_spectrum: state does not match the sector dimension");
  }
  if (std::abs(psi.squaredNorm() - 1.0) > 1e-10) throw std::invalid_argument("entanglement_spectrum: state not normalized");

  const bool chain = basis->kind() == SectorBasis::Kind::fixed_fermion_parity;
  const Bits left_mask = left_modes >= 64 ? ~Bits{0} : ((Bits{1} << left_modes) - 1);
  auto left_parity = [&](Bits left) {
    const int count = chain ? std::popcount(left) : std::popcount(left & kLegAMask);
    return count % 2 == 0 ? 1 : -1;
  };

  // Parity labels are only meaningful if psi has a definite total parity.
  bool parity_definite = true;
  if (!chain && !basis->parity_filter()) {
    double w_plus = 0.0;
    double w_minus = 0.0;
    for (std::size_t i = 0; i < basis->size(); ++i) {
      (leg_parity(basis->state(i)) > 0 ? w_plus : w_minus) += std::norm(psi(i));
    }
    parity_definite = std::min(w_plus, w_minus) < 1e-24;
  }

  struct Block {
    std::map<Bits, int> rows;
    std::map<Bits, int> cols;
    std::vector<std::tuple<int, int, cplx>> entries;
  };
  std::map<std::pair<int, int>, Block> blocks;
  for (std::size_t i = 0; i < basis->size(); ++i) {
    if (psi(i) == cplx{}) continue;
    const Bits bits = basis->state(i).bits;
    const Bits left = bits & left_mask;
    const Bits right = bits & ~left_mask;
    const int q = chain ? -1 : std::popcount(left);
    const int p = parity_definite ? left_parity(left) : 0;
    auto& blk = blocks[{q, p}];
    const int r = blk.rows.try_emplace(left, static_cast<int>(blk.rows.size())).first->second;
    const int cidx = blk.cols.try_emplace(right, static_cast<int>(blk.cols.size())).first->second;
    blk.entries.emplace_back(r, cidx, psi(i));
  }

  std::vector<EntanglementLevel> levels;
  for (const auto& [key, blk] : blocks) {
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(blk.rows.size()), static_cast<Eigen::Index>(blk.cols.size()));
    for (const auto& [r, cidx, v] : blk.entries) m(r, cidx) = v;
    Eigen::BDCSVD<CMatrix> svd(m);
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
      const double lambda = svd.singularValues()(k) * svd.singularValues()(k);
      if (lambda <= 1e-16) continue;
      levels.push_back({-std::log(lambda), lambda, key.first, key.second});
    }
  }
  std::sort(levels.begin(), levels.end(), [](const auto& a, const auto& b) { return a.xi < b.xi; });
  return levels;
}

std::vector<EntanglementLevel> entanglement_spectrum(const CVector& psi, const BasisPtr& basis, int cut_rung) {
  if (cut_rung < 1 || cut_rung >= basis->rungs()) {
    throw std::invalid_argument("entanglement_spectrum: cut must satisfy 1 <= cut < L");
  }
  return entanglement_spectrum_modes(psi, basis, 2 * cut_rung);
}

PairingCheck check_level_pairing(const std::vector<EntanglementLevel>& levels, int count, double fraction) {
  if (count < 2 || count % 2 != 0) throw std::invalid_argument("check_level_pairing: count must be even and >= 2");
  PairingCheck out;
  if (static_cast<int>(levels.size()) < count) return out;
  std::vector<double> xi;
  for (const auto& l : levels) xi.push_back(l.xi);
  std::sort(xi.begin(), xi.end());
  out.mean_spacing = (xi[count - 1] - xi[0]) / (count - 1);
  out.tolerance = fraction * out.mean_spacing;
  for (int k = 0; k < count; k += 2) out.max_pair_splitting = std::max(out.max_pair_splitting, xi[k + 1] - xi[k]);
  out.paired = out.max_pair_splitting < out.tolerance;
  return out;
}

cplx order_parameter(const CVector& psi, const BasisPtr& basis, int rung) {
  if (rung < 0 || rung >= basis->rungs()) throw std::invalid_argument("order_parameter: rung outside the ladder");
  FermionTerm term{1.0, {cdag(mode_index(Leg::b, rung)), c(mode_index(Leg::a, rung))}};
  return term_expectation(psi, basis, term);
}

}  // namespace ladder
