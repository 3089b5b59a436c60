#pragma once

// Truncated fermionic Fock space in the Dirac-sea encoding, and the finite spinor module.
//
// A state is a bitmask over the modes lo <= i < hi of a window (bit i - lo). The sea
// has every i < 0 occupied; modes below lo are implicitly occupied and modes at or
// above hi implicitly vacant.

#include "gerbeflow/sparse.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gerbeflow::fock {

using Mask = std::vector<bool>;

struct ModeWindow {
  int lo = -1;
  int hi = 1;

  void validate() const;  // lo < 0 < hi, at most 62 modes
  int span() const { return hi - lo; }
  bool contains(int mode) const { return lo <= mode && mode < hi; }
  std::uint64_t bit(int mode) const { return std::uint64_t{1} << (mode - lo); }
  std::uint64_t sea() const { return (std::uint64_t{1} << (-lo)) - 1; }
};

int charge_of(const ModeWindow& w, std::uint64_t occ);
// max(#particles, #holes) relative to the sea
int excitation_level(const ModeWindow& w, std::uint64_t occ);
std::vector<int> occupied_modes(const ModeWindow& w, std::uint64_t occ);
// Modes [lo, lo+g) occupied and [hi-g, hi) vacant.
bool has_guard_margin(const ModeWindow& w, std::uint64_t occ, int g);

// Normal-ordered sum_i a*(u_{n+i}) a(u_i) on a bitmask, restricted to the window:
// (image, sign) pairs. For n == 0 the result is the diagonal charge, returned as a
// single (occ, charge) pair when nonzero.
std::vector<std::pair<std::uint64_t, int>> loop_action(const ModeWindow& w, int n, std::uint64_t occ);

// Translation by +1 (sea gains mode lo); empty if mode hi-1 is occupied.
std::optional<std::uint64_t> shift_up(const ModeWindow& w, std::uint64_t occ);
// Translation by -1; empty if mode lo is vacant.
std::optional<std::uint64_t> shift_down(const ModeWindow& w, std::uint64_t occ);

struct FockBasisState {
  std::uint64_t occupied = 0;
  int charge = 0;
};

class BasisTooLarge : public std::runtime_error {
 public:
  BasisTooLarge(std::size_t required, std::size_t cap);
  std::size_t required;
  std::size_t cap;
};

class FockBasis {
 public:
  FockBasis(ModeWindow w, std::optional<int> max_excitation, std::vector<FockBasisState> states);

  const ModeWindow& window() const { return w_; }
  std::optional<int> max_excitation() const { return max_exc_; }
  std::size_t size() const { return states_.size(); }
  const FockBasisState& operator[](std::size_t i) const { return states_[i]; }
  const std::vector<FockBasisState>& states() const { return states_; }
  std::optional<std::size_t> index_of(std::uint64_t occ) const;
  std::shared_ptr<const Manifest> manifest() const { return manifest_; }

  Mask guard_mask(int margin) const;
  // "vac" for the sea, otherwise "p:0,1;h:-2"
  std::string label(std::size_t i) const;

 private:
  ModeWindow w_;
  std::optional<int> max_exc_;
  std::vector<FockBasisState> states_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  std::shared_ptr<const Manifest> manifest_;
};

inline constexpr std::size_t kDefaultBasisCap = std::size_t{1} << 22;

// Ordered by charge, then lexicographically by the sorted occupied-mode list.
// Without max_excitation every subset of the window is included.
FockBasis enumerate_basis(const ModeWindow& w, std::optional<int> max_excitation,
                          std::size_t cap = kDefaultBasisCap);

SparseOperator creation(const FockBasis& b, int mode);
SparseOperator annihilation(const FockBasis& b, int mode);
SparseOperator charge_operator(const FockBasis& b);
SparseOperator loop_operator(const FockBasis& b, int n);

struct PartialOperator {
  SparseOperator op;
  Mask safe;  // columns whose image stays inside the window and the basis
};

PartialOperator shift_operator(const FockBasis& b);
PartialOperator shift_inverse(const FockBasis& b);

struct SpinorBasisState {
  std::uint32_t excitations = 0;  // bit n-1 set iff psi_n is applied, n > 0
  int parity = 0;
};

class SpinorBasis {
 public:
  explicit SpinorBasis(int cutoff);

  int cutoff() const { return cutoff_; }
  std::size_t size() const { return states_.size(); }
  const SpinorBasisState& operator[](std::size_t i) const { return states_[i]; }
  std::size_t index_of(std::uint32_t excitations) const { return index_.at(excitations); }
  std::shared_ptr<const Manifest> manifest() const { return manifest_; }
  std::string label(std::size_t i) const;  // "eta" or "psi1psi3"

 private:
  int cutoff_;
  std::vector<SpinorBasisState> states_;
  std::unordered_map<std::uint32_t, std::size_t> index_;
  std::shared_ptr<const Manifest> manifest_;
};

// psi_n for |n| <= cutoff. psi_0 is the parity grading; for n > 0
// psi_n = (1+i) b*_n and psi_{-n} = (1-i) b_n with Jordan-Wigner signs.
SparseOperator clifford_operator(const SpinorBasis& s, int n);

inline constexpr std::size_t kDefaultTensorCap = std::size_t{1} << 24;

// Graded Kronecker product, index (i, j) -> i * dim(b) + j. Koszul rule:
// (a (x) b)(x (x) y) = (-1)^{|b||x|} ax (x) by, with |b| read off b's grading.
SparseOperator tensor(const SparseOperator& a, const SparseOperator& b,
                      std::size_t cap = kDefaultTensorCap);

// 0 for even, 1 for odd, nullopt for mixed or ungraded.
std::optional<int> operator_parity(const SparseOperator& op);

}  // namespace gerbeflow::fock
