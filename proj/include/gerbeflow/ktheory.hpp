#pragma once

// Twisted K^1 of T x M for decomposable twists: an extension of the lambda-fixed
// subgroup of K^1(M) by K^0(M)/(1 - lambda)K^0(M), where lambda is tensoring with a
// line bundle.

#include "gerbeflow/abelian.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gerbeflow::ktheory {

struct KRingData {
  std::string name;
  abelian::FgAbelianGroup k0, k1;
  abelian::IntMatrix lambda_k0, lambda_k1;  // columns are images of generators

  abelian::GroupHom lambda_on_k0() const { return {k0, k0, lambda_k0}; }
  abelian::GroupHom lambda_on_k1() const { return {k1, k1, lambda_k1}; }
  // Throws std::invalid_argument unless both endomorphisms are well defined and invertible.
  void validate() const;
};

struct TwistedKResult {
  abelian::InvariantFactors quotient_piece;  // K^0 / (1 - lambda) K^0
  abelian::InvariantFactors subgroup_piece;  // ker(1 - lambda) on K^1
  std::optional<abelian::InvariantFactors> total;
  std::string status;  // "split", "assumed-split" or "extension ambiguous"
  std::string split_reason;

  std::string total_str() const { return total ? total->str() : "extension ambiguous"; }
};

// Total is reported when one piece is trivial ("split"), or when the fixed subgroup
// of K^1 is free so the extension splits ("assumed-split": the exact sequence is only
// known up to isomorphism). Otherwise the extension is left open.
TwistedKResult solve_twisted_k1(const KRingData& data);

// Same ring data with generators renumbered by perm (new i = old perm[i]) in both
// degrees; the answer must not change.
KRingData permuted(const KRingData& data, const std::vector<std::size_t>& perm0,
                   const std::vector<std::size_t>& perm1);

// Fixtures. Generator labels are stored on the groups.
KRingData s2_fixture(long long k);       // K0 = Z{1,h}, h^2 = 0, lambda = 1 + k h, K1 = 0
KRingData t2_fixture(long long k);       // K0 = Z{1,b}, lambda = 1 + k b, K1 = Z{x,y}, lambda = id
KRingData rp_fixture(int n);             // K0 = Z{1} + Z_{2^n}{x}, x^2 = 2x, lambda = 1 - x, K1 = 0
KRingData untwisted_s2_fixture();        // S^2 with lambda = id

// Pairs of Laurent polynomials (p+, p-) with exponents in [lo, hi], subject to
// p+(1) = p-(1), modulo (p+, p-) ~ (a^{l+} p+, a^{l-} p-).
struct LaurentPairWindow {
  long long lo = -8, hi = 8;
  long long l_plus = 1, l_minus = 1;
  bool augmentation = true;

  std::size_t width() const { return static_cast<std::size_t>(hi - lo + 1); }
  // Throws std::invalid_argument unless l+, l- >= 1 and width >= 2 max(l+, l-).
  void validate() const;
  LaurentPairWindow doubled() const;  // [2 lo, 2 hi]
};

struct EquivariantResult {
  TwistedKResult result;
  abelian::FgAbelianGroup group;  // windowed quotient, basis below
  std::size_t expected_rank = 0;  // l+ + l- - 1, a derived expectation
  std::size_t joint_shift_rank = 0;  // rank when only lambda-images of constrained pairs are identified
  bool stable = false;               // doubled window gives the same invariant factors
  LaurentPairWindow window;

  // Coordinates of (a^{j+}, a^{j-}) in the constrained basis.
  std::vector<Integer> monomial_pair(long long j_plus, long long j_minus) const;
  bool same_class(std::pair<long long, long long> x, std::pair<long long, long long> y) const;
};

// Residues (j+ mod l+, j- mod l-) in [0, l).
std::pair<long long, long long> canonical_class(long long j_plus, long long j_minus, long long l_plus,
                                                long long l_minus);

// Throws std::invalid_argument if the window is too small or the doubled window
// disagrees.
EquivariantResult equivariant_s2_twisted_k1(const LaurentPairWindow& w);

struct FixtureInfo {
  std::string name;
  std::string parameters;
  std::string description;
};

std::vector<FixtureInfo> fixture_catalog();

}  // namespace gerbeflow::ktheory
