#pragma once

// Number-conserving Fock bases for the two-leg ladder and fermionic operator
// strings with Jordan-Wigner signs.
//
// Mode ordering is rung-major: a_0, b_0, a_1, b_1, ..., a_{L-1}, b_{L-1}
// (0-based rungs). A basis state |bits> stands for
//     c+_{m1} c+_{m2} ... c+_{mk} |0>,  m1 < m2 < ... < mk,
// so acting with c_m or c+_m picks up (-1)^(number of occupied modes below m).
// Every module in the library relies on this single convention.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ladder/types.hpp"

namespace ladder {

using Bits = std::uint64_t;

inline constexpr int kMaxModes = 62;

enum class Leg { a, b };

constexpr int mode_index(Leg leg, int rung) { return 2 * rung + (leg == Leg::b ? 1 : 0); }

struct FockState {
  Bits bits = 0;

  bool occupied(int mode) const { return (bits >> mode) & 1U; }
  int count() const { return __builtin_popcountll(bits); }

  friend bool operator==(FockState, FockState) = default;
  friend auto operator<=>(FockState, FockState) = default;
};

// Builds a state from a list of occupied modes.
FockState make_state(std::initializer_list<int> modes);

// (-1)^(number of occupied a-leg modes).
int leg_parity(FockState state);

// Number of occupied a-leg (even-index) modes.
int count_leg_a(FockState state);

struct FermionOp {
  int mode = 0;
  bool create = false;

  friend bool operator==(const FermionOp&, const FermionOp&) = default;
};

inline FermionOp cdag(int mode) { return {mode, true}; }
inline FermionOp c(int mode) { return {mode, false}; }

// coefficient * f_0 f_1 ... f_{n-1}; the rightmost factor acts first.
struct FermionTerm {
  cplx coefficient{1.0, 0.0};
  std::vector<FermionOp> factors;

  int creations() const;
  int annihilations() const;
  std::string to_string() const;
};

using TermList = std::vector<FermionTerm>;

FermionTerm adjoint(const FermionTerm& term);
TermList adjoint(const TermList& terms);

TermList operator+(TermList lhs, const TermList& rhs);
TermList& operator+=(TermList& lhs, const TermList& rhs);
TermList operator*(cplx factor, TermList terms);
TermList operator-(TermList lhs, const TermList& rhs);
// Operator product (lhs)(rhs), distributed over the terms.
TermList product(const TermList& lhs, const TermList& rhs);

struct Applied {
  FockState state;
  int sign = 1;
};

// Applies the factor string right-to-left. Empty when any factor annihilates
// an empty mode or creates on an occupied one.
std::optional<Applied> apply_term(const FermionTerm& term, FockState state);

// Ordered list of Fock states sharing a conserved quantity.
//
// Ladder sectors fix the total particle number (and optionally the leg parity);
// chain sectors (used by the Kitaev chain) fix only the total fermion parity.
class SectorBasis {
 public:
  enum class Kind { fixed_number, fixed_fermion_parity };

  static SectorBasis ladder(int rungs, int particles, std::optional<int> leg_parity = std::nullopt);
  static SectorBasis chain_parity(int modes, int fermion_parity);

  Kind kind() const { return kind_; }
  int modes() const { return modes_; }
  int rungs() const { return modes_ / 2; }
  int particles() const { return particles_; }
  std::optional<int> parity_filter() const { return parity_filter_; }

  std::size_t size() const { return states_.size(); }
  const std::vector<FockState>& states() const { return states_; }
  FockState state(std::size_t i) const { return states_[i]; }
  std::optional<std::size_t> index_of(FockState state) const;

  std::string describe() const;

 private:
  SectorBasis() = default;

  Kind kind_ = Kind::fixed_number;
  int modes_ = 0;
  int particles_ = 0;
  std::optional<int> parity_filter_;
  std::vector<FockState> states_;
};

using BasisPtr = std::shared_ptr<const SectorBasis>;

BasisPtr make_ladder_basis(int rungs, int particles, std::optional<int> leg_parity = std::nullopt);
BasisPtr make_chain_parity_basis(int modes, int fermion_parity);

// Sparse matrix of an operator restricted to a sector.
struct SparseOperator {
  BasisPtr basis;
  SparseMatrix matrix;

  std::size_t dim() const { return basis ? basis->size() : 0; }
  CMatrix dense() const;
  CVector apply(const CVector& psi) const { return matrix * psi; }
  cplx expectation(const CVector& psi) const;
};

SparseOperator operator+(const SparseOperator& lhs, const SparseOperator& rhs);
SparseOperator operator-(const SparseOperator& lhs, const SparseOperator& rhs);
SparseOperator operator*(cplx factor, const SparseOperator& op);

// Sum of all terms on every basis state. Throws std::invalid_argument naming
// the first term that leaves the sector (wrong particle number or parity).
SparseOperator build_sparse(const TermList& terms, const BasisPtr& basis);

// Diagonal operator (-1)^{N_a} on a ladder basis.
SparseOperator leg_parity_operator(const BasisPtr& basis);

}  // namespace ladder
