#include "ladder/fockspace.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace ladder {

namespace {

constexpr Bits kLegAMask = 0x5555555555555555ULL;

int popcount(Bits bits) { return __builtin_popcountll(bits); }

}  // namespace

FockState make_state(std::initializer_list<int> modes) {
  FockState s;
  for (int m : modes) {
    if (m < 0 || m >= kMaxModes) throw std::out_of_range("make_state: mode index out of range");
    s.bits |= Bits{1} << m;
  }
  return s;
}

int count_leg_a(FockState state) { return popcount(state.bits & kLegAMask); }

int leg_parity(FockState state) { return (count_leg_a(state) % 2 == 0) ? 1 : -1; }

int FermionTerm::creations() const {
  return static_cast<int>(std::count_if(factors.begin(), factors.end(), [](const FermionOp& f) { return f.create; }));
}

int FermionTerm::annihilations() const { return static_cast<int>(factors.size()) - creations(); }

std::string FermionTerm::to_string() const {
  std::ostringstream os;
  os << "(" << coefficient.real() << (coefficient.imag() < 0 ? "-" : "+") << std::abs(coefficient.imag()) << "i)";
  for (const auto& f : factors) {
    os << " " << (f.mode % 2 == 0 ? "a" : "b") << (f.create ? "+" : "") << "_" << f.mode / 2;
  }
  return os.str();
}

FermionTerm adjoint(const FermionTerm& term) {
  FermionTerm out;
  out.coefficient = std::conj(term.coefficient);
  out.factors.reserve(term.factors.size());
  for (auto it = term.factors.rbegin(); it != term.factors.rend(); ++it) out.factors.push_back({it->mode, !it->create});
  return out;
}

TermList adjoint(const TermList& terms) {
  TermList out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(adjoint(t));
  return out;
}

TermList& operator+=(TermList& lhs, const TermList& rhs) {
  lhs.insert(lhs.end(), rhs.begin(), rhs.end());
  return lhs;
}

TermList operator+(TermList lhs, const TermList& rhs) { return lhs += rhs; }

TermList operator*(cplx factor, TermList terms) {
  for (auto& t : terms) t.coefficient *= factor;
  return terms;
}

TermList operator-(TermList lhs, const TermList& rhs) { return lhs += (-1.0 * rhs); }

TermList product(const TermList& lhs, const TermList& rhs) {
  TermList out;
  out.reserve(lhs.size() * rhs.size());
  for (const auto& l : lhs) {
    for (const auto& r : rhs) {
      FermionTerm t;
      t.coefficient = l.coefficient * r.coefficient;
      t.factors = l.factors;
      t.factors.insert(t.factors.end(), r.factors.begin(), r.factors.end());
      out.push_back(std::move(t));
    }
  }
  return out;
}

std::optional<Applied> apply_term(const FermionTerm& term, FockState state) {
  Bits bits = state.bits;
  int sign = 1;
  for (auto it = term.factors.rbegin(); it != term.factors.rend(); ++it) {
    const Bits bit = Bits{1} << it->mode;
    const bool occ = (bits & bit) != 0;
    if (it->create == occ) return std::nullopt;
    if (popcount(bits & (bit - 1)) % 2 != 0) sign = -sign;
    bits ^= bit;
  }
  return Applied{FockState{bits}, sign};
}

SectorBasis SectorBasis::ladder(int rungs, int particles, std::optional<int> leg_parity_filter) {
  if (rungs < 1) throw std::invalid_argument("SectorBasis: rung count must be at least 1");
  if (2 * rungs > kMaxModes) throw std::invalid_argument("SectorBasis: too many modes for a 64-bit state");
  if (particles < 0 || particles > 2 * rungs) {
    throw std::invalid_argument("SectorBasis: particle number " + std::to_string(particles) + " outside [0, " +
                                std::to_string(2 * rungs) + "]");
  }
  if (leg_parity_filter && *leg_parity_filter != 1 && *leg_parity_filter != -1) {
    throw std::invalid_argument("SectorBasis: parity filter must be +1 or -1");
  }
  SectorBasis basis;
  basis.kind_ = Kind::fixed_number;
  basis.modes_ = 2 * rungs;
  basis.particles_ = particles;
  basis.parity_filter_ = leg_parity_filter;

  const int n = basis.modes_;
  if (particles == 0) {
    if (!leg_parity_filter || *leg_parity_filter == 1) basis.states_.push_back(FockState{0});
    return basis;
  }
  // Gosper's hack walks all n-bit words with `particles` set bits in ascending order.
  Bits word = (Bits{1} << particles) - 1;
  const Bits limit = Bits{1} << n;
  while (word < limit) {
    FockState s{word};
    if (!leg_parity_filter || leg_parity(s) == *leg_parity_filter) basis.states_.push_back(s);
    const Bits low = word & (~word + 1);
    const Bits ripple = word + low;
    word = (((ripple ^ word) >> 2) / low) | ripple;
  }
  return basis;
}

SectorBasis SectorBasis::chain_parity(int modes, int fermion_parity) {
  if (modes < 1 || modes > 30) throw std::invalid_argument("SectorBasis: chain parity sectors support 1..30 modes");
  if (fermion_parity != 1 && fermion_parity != -1) throw std::invalid_argument("SectorBasis: parity must be +1 or -1");
  SectorBasis basis;
  basis.kind_ = Kind::fixed_fermion_parity;
  basis.modes_ = modes;
  basis.parity_filter_ = fermion_parity;
  const Bits limit = Bits{1} << modes;
  for (Bits w = 0; w < limit; ++w) {
    const int p = (popcount(w) % 2 == 0) ? 1 : -1;
    if (p == fermion_parity) basis.states_.push_back(FockState{w});
  }
  return basis;
}

std::optional<std::size_t> SectorBasis::index_of(FockState state) const {
  auto it = std::lower_bound(states_.begin(), states_.end(), state);
  if (it == states_.end() || *it != state) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

std::string SectorBasis::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::fixed_number) {
    os << "ladder(L=" << rungs() << ", N=" << particles_;
    if (parity_filter_) os << ", P=" << *parity_filter_;
    os << ")";
  } else {
    os << "chain(modes=" << modes_ << ", parity=" << *parity_filter_ << ")";
  }
  os << " dim=" << states_.size();
  return os.str();
}

BasisPtr make_ladder_basis(int rungs, int particles, std::optional<int> leg_parity_filter) {
  return std::make_shared<const SectorBasis>(SectorBasis::ladder(rungs, particles, leg_parity_filter));
}

BasisPtr make_chain_parity_basis(int modes, int fermion_parity) {
  return std::make_shared<const SectorBasis>(SectorBasis::chain_parity(modes, fermion_parity));
}

CMatrix SparseOperator::dense() const { return CMatrix(matrix); }

cplx SparseOperator::expectation(const CVector& psi) const { return psi.dot(matrix * psi); }

namespace {

void require_same_basis(const SparseOperator& lhs, const SparseOperator& rhs) {
  if (lhs.basis != rhs.basis && (lhs.basis->states() != rhs.basis->states())) {
    throw std::invalid_argument("SparseOperator: operands live on different sectors");
  }
}

}  // namespace

SparseOperator operator+(const SparseOperator& lhs, const SparseOperator& rhs) {
  require_same_basis(lhs, rhs);
  return {lhs.basis, SparseMatrix(lhs.matrix + rhs.matrix)};
}

SparseOperator operator-(const SparseOperator& lhs, const SparseOperator& rhs) {
  require_same_basis(lhs, rhs);
  return {lhs.basis, SparseMatrix(lhs.matrix - rhs.matrix)};
}

SparseOperator operator*(cplx factor, const SparseOperator& op) { return {op.basis, SparseMatrix(factor * op.matrix)}; }

SparseOperator build_sparse(const TermList& terms, const BasisPtr& basis) {
  if (!basis) throw std::invalid_argument("build_sparse: null basis");
  const int modes = basis->modes();
  for (const auto& t : terms) {
    for (const auto& f : t.factors) {
      if (f.mode < 0 || f.mode >= modes) {
        throw std::invalid_argument("build_sparse: term " + t.to_string() + " references mode outside the basis");
      }
    }
    if (basis->kind() == SectorBasis::Kind::fixed_number && t.creations() != t.annihilations()) {
      throw std::invalid_argument("build_sparse: term " + t.to_string() + " does not conserve particle number");
    }
    if (basis->kind() == SectorBasis::Kind::fixed_fermion_parity && t.factors.size() % 2 != 0) {
      throw std::invalid_argument("build_sparse: term " + t.to_string() + " does not conserve fermion parity");
    }
  }

  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(terms.size() * basis->size() / 2 + 1);
  const auto& states = basis->states();
  for (const auto& t : terms) {
    if (t.coefficient == cplx{}) continue;
    for (std::size_t col = 0; col < states.size(); ++col) {
      auto image = apply_term(t, states[col]);
      if (!image) continue;
      auto row = basis->index_of(image->state);
      if (!row) {
        throw std::invalid_argument("build_sparse: term " + t.to_string() + " leaves the sector " + basis->describe());
      }
      triplets.emplace_back(static_cast<int>(*row), static_cast<int>(col), t.coefficient * double(image->sign));
    }
  }
  const auto n = static_cast<Eigen::Index>(basis->size());
  SparseMatrix m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.prune(cplx{0.0, 0.0}, 0.0);
  m.makeCompressed();
  return {basis, std::move(m)};
}

SparseOperator leg_parity_operator(const BasisPtr& basis) {
  const auto n = static_cast<Eigen::Index>(basis->size());
  SparseMatrix m(n, n);
  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(basis->size());
  for (std::size_t i = 0; i < basis->size(); ++i) {
    triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), double(leg_parity(basis->state(i))));
  }
  m.setFromTriplets(triplets.begin(), triplets.end());
  return {basis, std::move(m)};
}

}  // namespace ladder
