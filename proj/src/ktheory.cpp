#include "gerbeflow/ktheory.hpp"

#include <algorithm>
#include <stdexcept>

namespace gerbeflow::ktheory {

using abelian::FgAbelianGroup;
using abelian::GroupHom;
using abelian::IntMatrix;
using abelian::InvariantFactors;

void KRingData::validate() const {
  for (const GroupHom& h : {lambda_on_k0(), lambda_on_k1()}) {
    h.validate();
    if (!abelian::is_automorphism(h)) throw std::invalid_argument(name + ": tensoring with lambda is not invertible");
  }
}

TwistedKResult solve_twisted_k1(const KRingData& data) {
  data.validate();
  TwistedKResult r;
  const GroupHom q0 = abelian::subtract(abelian::identity_hom(data.k0), data.lambda_on_k0());
  const GroupHom q1 = abelian::subtract(abelian::identity_hom(data.k1), data.lambda_on_k1());
  r.quotient_piece = abelian::invariant_factors(abelian::hom_cokernel(q0));
  r.subgroup_piece = abelian::invariant_factors(abelian::hom_kernel(q1));

  if (r.quotient_piece.trivial() || r.subgroup_piece.trivial()) {
    r.status = "split";
    r.split_reason = "one piece of the extension is trivial";
  } else if (r.subgroup_piece.free()) {
    r.status = "assumed-split";
    r.split_reason =
        "the fixed subgroup of K^1 is free, so the extension splits; the exact sequence is only "
        "known up to isomorphism";
  } else {
    r.status = "extension ambiguous";
    r.split_reason = "the fixed subgroup of K^1 has torsion";
    return r;
  }
  InvariantFactors total;
  total.free_rank = r.quotient_piece.free_rank + r.subgroup_piece.free_rank;
  // Re-normalize the combined torsion through a diagonal presentation.
  std::vector<Integer> torsion = r.quotient_piece.torsion;
  torsion.insert(torsion.end(), r.subgroup_piece.torsion.begin(), r.subgroup_piece.torsion.end());
  IntMatrix rel(torsion.size(), torsion.size());
  for (std::size_t i = 0; i < torsion.size(); ++i) rel(i, i) = torsion[i];
  InvariantFactors t = abelian::invariant_factors(FgAbelianGroup(torsion.size(), rel));
  total.torsion = t.torsion;
  r.total = total;
  return r;
}

namespace {

FgAbelianGroup permute_group(const FgAbelianGroup& g, const std::vector<std::size_t>& perm) {
  const std::size_t n = g.n_generators();
  if (perm.size() != n) throw std::invalid_argument("permutation size mismatch");
  IntMatrix rel(n, g.relations().cols());
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < rel.cols(); ++c) rel(i, c) = g.relations()(perm[i], c);
    if (!g.labels().empty()) labels[i] = g.labels()[perm[i]];
  }
  return FgAbelianGroup(n, rel, g.labels().empty() ? std::vector<std::string>{} : labels);
}

IntMatrix permute_endo(const IntMatrix& m, const std::vector<std::size_t>& perm) {
  IntMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(perm[i], perm[j]);
  return out;
}

FgAbelianGroup free_group(std::vector<std::string> labels) {
  const std::size_t n = labels.size();
  return FgAbelianGroup::free(n, std::move(labels));
}

}  // namespace

KRingData permuted(const KRingData& data, const std::vector<std::size_t>& perm0, const std::vector<std::size_t>& perm1) {
  return {data.name + " (permuted)", permute_group(data.k0, perm0), permute_group(data.k1, perm1),
          permute_endo(data.lambda_k0, perm0), permute_endo(data.lambda_k1, perm1)};
}

KRingData s2_fixture(long long k) {
  KRingData d;
  d.name = "s2(k=" + std::to_string(k) + ")";
  d.k0 = free_group({"1", "h"});
  d.k1 = FgAbelianGroup::free(0);
  d.lambda_k0 = IntMatrix{{1, 0}, {k, 1}};  // (1 + k h) * {1, h} with h^2 = 0
  d.lambda_k1 = IntMatrix(0, 0);
  return d;
}

KRingData t2_fixture(long long k) {
  KRingData d;
  d.name = "t2(k=" + std::to_string(k) + ")";
  d.k0 = free_group({"1", "b"});
  d.k1 = free_group({"x", "y"});
  d.lambda_k0 = IntMatrix{{1, 0}, {k, 1}};
  d.lambda_k1 = IntMatrix::identity(2);
  return d;
}

KRingData rp_fixture(int n) {
  if (n < 1 || n > 60) throw std::invalid_argument("projective-space fixture needs 1 <= n <= 60");
  KRingData d;
  d.name = "rp" + std::to_string(2 * n);
  IntMatrix rel(2, 1);
  rel(1, 0) = Integer(1) << n;  // 2^n x = 0
  d.k0 = FgAbelianGroup(2, rel, {"1", "x"});
  d.k1 = FgAbelianGroup::free(0);
  // (1 - x) * 1 = 1 - x, (1 - x) * x = x - 2x = -x
  d.lambda_k0 = IntMatrix{{1, 0}, {-1, -1}};
  d.lambda_k1 = IntMatrix(0, 0);
  return d;
}

KRingData untwisted_s2_fixture() {
  KRingData d = s2_fixture(0);
  d.name = "s2(untwisted)";
  return d;
}

void LaurentPairWindow::validate() const {
  if (l_plus < 1 || l_minus < 1) throw std::invalid_argument("shift exponents must be at least 1");
  if (hi < lo) throw std::invalid_argument("empty exponent window");
  if (width() < static_cast<std::size_t>(2 * std::max(l_plus, l_minus)))
    throw std::invalid_argument("exponent window narrower than twice the largest shift");
}

LaurentPairWindow LaurentPairWindow::doubled() const {
  LaurentPairWindow w = *this;
  w.lo = std::min(2 * lo, lo - 1);
  w.hi = std::max(2 * hi, hi + 1);
  return w;
}

std::pair<long long, long long> canonical_class(long long j_plus, long long j_minus, long long l_plus, long long l_minus) {
  if (l_plus < 1 || l_minus < 1) throw std::invalid_argument("shift exponents must be at least 1");
  auto mod = [](long long a, long long m) { return ((a % m) + m) % m; };
  return {mod(j_plus, l_plus), mod(j_minus, l_minus)};
}

namespace {

// Coordinates of (p+, p-) in the constrained basis (a^i, a^lo), i in [lo, hi], and
// (a^lo, a^j), j in (lo, hi]; without the constraint, the plain monomial basis.
std::vector<Integer> pair_coordinates(const LaurentPairWindow& w, const std::vector<Integer>& plus,
                                      const std::vector<Integer>& minus) {
  const std::size_t n = w.width();
  if (!w.augmentation) {
    std::vector<Integer> out(plus);
    out.insert(out.end(), minus.begin(), minus.end());
    return out;
  }
  Integer sp = 0, sm = 0;
  for (const auto& v : plus) sp += v;
  for (const auto& v : minus) sm += v;
  if (sp != sm) throw std::invalid_argument("pair violates the common virtual dimension");
  std::vector<Integer> out(2 * n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = plus[i];
  for (std::size_t j = 1; j < n; ++j) {
    out[n + j - 1] = minus[j];
    out[0] -= minus[j];
  }
  return out;
}

std::vector<Integer> monomial(const LaurentPairWindow& w, long long e) {
  std::vector<Integer> v(w.width());
  if (e < w.lo || e > w.hi) throw std::out_of_range("exponent outside window");
  v[static_cast<std::size_t>(e - w.lo)] = 1;
  return v;
}

// Basis pairs as (plus exponent, minus exponent) monomials.
std::vector<std::pair<long long, long long>> basis_pairs(const LaurentPairWindow& w) {
  std::vector<std::pair<long long, long long>> out;
  for (long long i = w.lo; i <= w.hi; ++i) out.emplace_back(i, w.lo);
  for (long long j = w.lo + 1; j <= w.hi; ++j) out.emplace_back(w.lo, j);
  return out;
}

FgAbelianGroup windowed_group(const LaurentPairWindow& w, bool joint) {
  const std::size_t n = w.width();
  const std::size_t gens = w.augmentation ? 2 * n - 1 : 2 * n;
  IntMatrix rel(gens, 0);
  const std::vector<Integer> zero(n);
  auto add = [&](const std::vector<Integer>& p, const std::vector<Integer>& m) {
    rel.append_column(pair_coordinates(w, p, m));
  };
  auto diff = [&](long long e, long long f) {
    auto v = monomial(w, e);
    v[static_cast<std::size_t>(f - w.lo)] -= 1;
    return v;
  };
  if (!joint) {
    for (long long e = w.lo; e + w.l_plus <= w.hi; ++e) add(diff(e, e + w.l_plus), zero);
    for (long long e = w.lo; e + w.l_minus <= w.hi; ++e) add(zero, diff(e, e + w.l_minus));
  } else if (w.augmentation) {
    for (auto [i, j] : basis_pairs(w))
      if (i + w.l_plus <= w.hi && j + w.l_minus <= w.hi) add(diff(i, i + w.l_plus), diff(j, j + w.l_minus));
  } else {
    for (long long e = w.lo; e <= w.hi; ++e) {
      if (e + w.l_plus <= w.hi) add(diff(e, e + w.l_plus), zero);
      if (e + w.l_minus <= w.hi) add(zero, diff(e, e + w.l_minus));
    }
  }
  std::vector<std::string> labels;
  if (w.augmentation)
    for (auto [i, j] : basis_pairs(w)) labels.push_back("(a^" + std::to_string(i) + ",a^" + std::to_string(j) + ")");
  return FgAbelianGroup(gens, rel, labels);
}

}  // namespace

std::vector<Integer> EquivariantResult::monomial_pair(long long j_plus, long long j_minus) const {
  return pair_coordinates(window, monomial(window, j_plus), monomial(window, j_minus));
}

bool EquivariantResult::same_class(std::pair<long long, long long> x, std::pair<long long, long long> y) const {
  return group.equal_elements(monomial_pair(x.first, x.second), monomial_pair(y.first, y.second));
}

EquivariantResult equivariant_s2_twisted_k1(const LaurentPairWindow& w) {
  w.validate();
  EquivariantResult out;
  out.window = w;
  out.group = windowed_group(w, false);
  const InvariantFactors here = abelian::invariant_factors(out.group);
  const InvariantFactors there = abelian::invariant_factors(windowed_group(w.doubled(), false));
  out.stable = here == there;
  if (!out.stable) throw std::invalid_argument("exponent window too small: doubled window disagrees");
  out.expected_rank = static_cast<std::size_t>(w.l_plus + w.l_minus - (w.augmentation ? 1 : 0));
  out.joint_shift_rank = abelian::invariant_factors(windowed_group(w, true)).free_rank;

  out.result.quotient_piece = here;
  out.result.subgroup_piece = InvariantFactors{};  // K^1_T(S^2) = 0
  out.result.total = here;
  out.result.status = "split";
  out.result.split_reason = "one piece of the extension is trivial";
  return out;
}

std::vector<FixtureInfo> fixture_catalog() {
  return {
      {"s2", "twist k", "K^0 = Z{1,h} with h^2 = 0, lambda = 1 + k h; K^1 = 0"},
      {"t2", "twist k", "K^0 = Z{1,b} with b^2 = 0, lambda = 1 + k b; K^1 = Z{x,y} with lambda = id"},
      {"rp", "n for RP^{2n}", "K^0 = Z{1} + Z_{2^n}{x} with x^2 = 2x, lambda = 1 - x; K^1 = 0"},
      {"untwisted", "none", "S^2 ring data with lambda = id"},
      {"equivariant-s2", "l+, l-, exponent window",
       "pairs (p+, p-) of Laurent polynomials with p+(1) = p-(1), modulo shifts by (a^{l+}, a^{l-})"},
  };
}

}  // namespace gerbeflow::ktheory
