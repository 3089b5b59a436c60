#include "gerbeflow/fock.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

using namespace gerbeflow;
using namespace gerbeflow::fock;

namespace {

using Vec = std::vector<SparseOperator::Entry>;

Vec unit(std::size_t i) { return {{i, GaussRational(1)}}; }

Vec sub(const Vec& a, const Vec& b) {
  SparseOperator acc(1u << 20, 1);
  for (const auto& [i, v] : a) acc.add(i, 0, v);
  for (const auto& [i, v] : b) acc.add(i, 0, -v);
  return acc.column(0);
}

// [x, y] applied to basis vector c
Vec commutator_on(const SparseOperator& x, const SparseOperator& y, std::size_t c) {
  return sub(x.apply(y.column(c)), y.apply(x.column(c)));
}

Vec anticommutator_on(const SparseOperator& x, const SparseOperator& y, std::size_t c) {
  Vec a = x.apply(y.column(c));
  Vec b = y.apply(x.column(c));
  SparseOperator acc(x.rows(), 1);
  for (const auto& [i, v] : a) acc.add(i, 0, v);
  for (const auto& [i, v] : b) acc.add(i, 0, v);
  return acc.column(0);
}

Vec scaled_unit(std::size_t i, long long k) {
  if (k == 0) return {};
  return {{i, GaussRational(k)}};
}

// Occupation sets as std::set, charge by counting against the sea directly.
struct OracleState {
  std::set<int> occ;
  int charge;
};

std::vector<OracleState> oracle_states(int lo, int hi, int max_exc) {
  std::vector<OracleState> out;
  const int span = hi - lo;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << span); ++s) {
    std::set<int> occ;
    for (int k = 0; k < span; ++k)
      if (s >> k & 1) occ.insert(lo + k);
    int particles = 0, holes = 0;
    for (int m = lo; m < hi; ++m) {
      if (m >= 0 && occ.count(m)) ++particles;
      if (m < 0 && !occ.count(m)) ++holes;
    }
    if (std::max(particles, holes) > max_exc) continue;
    out.push_back({occ, particles - holes});
  }
  std::sort(out.begin(), out.end(), [](const OracleState& a, const OracleState& b) {
    if (a.charge != b.charge) return a.charge < b.charge;
    return std::lexicographical_compare(a.occ.begin(), a.occ.end(), b.occ.begin(), b.occ.end());
  });
  return out;
}

}  // namespace

TEST_CASE("enumerate_basis examples") {
  auto b = enumerate_basis({-1, 1}, 1);
  REQUIRE(b.size() == 4);
  std::multiset<int> charges;
  for (const auto& s : b.states()) charges.insert(s.charge);
  CHECK(charges == std::multiset<int>{-1, 0, 0, 1});
  CHECK(b.index_of(ModeWindow{-1, 1}.sea()).has_value());

  auto vac = enumerate_basis({-3, 3}, 0);
  REQUIRE(vac.size() == 1);
  CHECK(vac[0].charge == 0);
  CHECK(vac.label(0) == "vac");

  CHECK(enumerate_basis({-2, 2}, 2).size() == 16);
}

TEST_CASE("enumerate_basis matches subset oracle in content and order") {
  for (auto [lo, hi, m] : std::vector<std::tuple<int, int, int>>{{-1, 1, 1}, {-2, 3, 1}, {-3, 3, 2}, {-4, 2, 3}}) {
    ModeWindow w{lo, hi};
    auto b = enumerate_basis(w, m);
    auto o = oracle_states(lo, hi, m);
    REQUIRE(b.size() == o.size());
    for (std::size_t i = 0; i < o.size(); ++i) {
      auto modes = occupied_modes(w, b[i].occupied);
      CHECK(std::set<int>(modes.begin(), modes.end()) == o[i].occ);
      CHECK(b[i].charge == o[i].charge);
    }
  }
}

TEST_CASE("enumerate_basis rejects bad windows and reports required budget") {
  CHECK_THROWS_AS(enumerate_basis({0, 3}, 1), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_basis({-3, 0}, 1), std::invalid_argument);
  try {
    enumerate_basis({-10, 10}, std::nullopt, 1000);
    FAIL("expected cap failure");
  } catch (const BasisTooLarge& e) {
    CHECK(e.required == (std::size_t{1} << 20));
    CHECK(e.cap == 1000);
  }
}

TEST_CASE("vacuum is annihilated by a(u) for u >= 0 and a*(v) for v < 0") {
  auto b = enumerate_basis({-3, 3}, std::nullopt);
  const std::size_t vac = *b.index_of(b.window().sea());
  for (int m = 0; m < 3; ++m) CHECK(annihilation(b, m).column(vac).empty());
  for (int m = -3; m < 0; ++m) CHECK(creation(b, m).column(vac).empty());
  CHECK_THROWS_AS(creation(b, 3), std::out_of_range);
  CHECK_THROWS_AS(annihilation(b, -4), std::out_of_range);
}

TEST_CASE("CAR relations hold exactly on the full truncated space") {
  auto b = enumerate_basis({-3, 3}, std::nullopt);
  const auto id = SparseOperator::identity(b.size());
  for (int i = -3; i < 3; ++i)
    for (int j = -3; j < 3; ++j) {
      auto ai = annihilation(b, i), aj = annihilation(b, j), cj = creation(b, j);
      auto mixed = ai * cj + cj * ai;
      if (i == j)
        CHECK(mixed == id);
      else
        CHECK(mixed.is_zero());
      CHECK((ai * aj + aj * ai).is_zero());
      CHECK(creation(b, i).adjoint() == ai);
    }
}

TEST_CASE("charge operator eigenvalues") {
  ModeWindow w{-3, 3};
  auto b = enumerate_basis(w, std::nullopt);
  auto n = charge_operator(b);
  const std::uint64_t sea = w.sea();
  CHECK(n.get(*b.index_of(sea), *b.index_of(sea)) == GaussRational(0));
  const std::size_t p0 = *b.index_of(sea | w.bit(0));
  CHECK(n.get(p0, p0) == GaussRational(1));
  // [DERIVED] two holes: occupations counted by hand, 0 particles - 2 holes
  const std::size_t hh = *b.index_of(sea & ~w.bit(-1) & ~w.bit(-2));
  CHECK(n.get(hh, hh) == GaussRational(-2));
  for (std::size_t c = 0; c < b.size(); ++c) CHECK(n.column(c).size() <= 1);
}

TEST_CASE("shift operator") {
  ModeWindow w{-4, 4};
  auto b = enumerate_basis(w, std::nullopt);
  auto s = shift_operator(b);
  auto si = shift_inverse(b);
  const std::size_t vac = *b.index_of(w.sea());
  REQUIRE(s.safe[vac]);
  CHECK(s.op.column(vac) == creation(b, 0).column(vac));

  auto n = charge_operator(b);
  auto id = SparseOperator::identity(b.size());
  auto lhs = s.op * n - (n - id) * s.op;
  auto ss = s.op.adjoint() * s.op;
  for (std::size_t c = 0; c < b.size(); ++c) {
    if (s.safe[c]) {
      CHECK(lhs.column(c).empty());
      CHECK(ss.column(c) == unit(c));
    } else {
      CHECK(s.op.column(c).empty());
    }
    // doubly safe: S^-1 defined and its image lies in S's domain
    if (si.safe[c] && s.safe[si.op.column(c).front().first]) CHECK(s.op.apply(si.op.column(c)) == unit(c));
  }
}

TEST_CASE("loop operators agree with normal-ordered products of a* and a") {
  ModeWindow w{-3, 3};
  auto b = enumerate_basis(w, std::nullopt);
  for (int n = -3; n <= 3; ++n) {
    SparseOperator sum(b.size(), b.size());
    for (int i = w.lo; i < w.hi; ++i) {
      if (!w.contains(n + i)) continue;
      if (n == 0 && i < 0)
        sum = sum - annihilation(b, i) * creation(b, i);  // :a* a: = -a a* below the sea
      else
        sum = sum + creation(b, n + i) * annihilation(b, i);
    }
    auto e = loop_operator(b, n);
    CHECK(e == sum.masked_columns(Mask(b.size(), true)));
    CHECK(e.adjoint() == loop_operator(b, -n));
  }
  CHECK(loop_operator(b, 0) == charge_operator(b));
}

TEST_CASE("loop algebra central extension on guard-safe states of (-6,6)") {
  ModeWindow w{-6, 6};
  auto b = enumerate_basis(w, std::nullopt);
  const Mask safe = b.guard_mask(3);
  REQUIRE(std::count(safe.begin(), safe.end(), true) == 64);
  std::vector<SparseOperator> e;
  for (int n = -3; n <= 3; ++n) e.push_back(loop_operator(b, n));
  for (int n = -3; n <= 3; ++n)
    for (int m = -3; m <= 3; ++m)
      for (std::size_t c = 0; c < b.size(); ++c) {
        if (!safe[c]) continue;
        // [e_n, e_m] = -n delta_{n,-m}
        CHECK(commutator_on(e[n + 3], e[m + 3], c) == scaled_unit(c, n == -m ? -n : 0));
      }
  const std::size_t vac = *b.index_of(w.sea());
  CHECK(commutator_on(e[4], e[2], vac) == scaled_unit(vac, -1));
}

TEST_CASE("shift conjugation of loop operators") {
  ModeWindow w{-6, 6};
  auto b = enumerate_basis(w, std::nullopt);
  auto s = shift_operator(b).op;
  auto si = shift_inverse(b).op;
  for (int n = -3; n <= 3; ++n) {
    auto e = loop_operator(b, n);
    const Mask safe = b.guard_mask(std::abs(n) + 1);
    for (std::size_t c = 0; c < b.size(); ++c) {
      if (!safe[c]) continue;
      Vec lhs = s.apply(e.apply(si.column(c)));
      Vec rhs = e.column(c);
      if (n == 0) rhs = sub(rhs, unit(c));
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("Clifford operators on the spinor module") {
  SpinorBasis s(3);
  REQUIRE(s.size() == 8);
  CHECK(s.label(0) == "eta");
  auto psi0 = clifford_operator(s, 0);
  CHECK(psi0.column(0) == unit(0));
  CHECK(psi0 * psi0 == SparseOperator::identity(s.size()));
  for (int n = -3; n <= 3; ++n) {
    CHECK(clifford_operator(s, n).adjoint() == clifford_operator(s, -n));
    for (int m = -3; m <= 3; ++m) {
      auto a = clifford_operator(s, n), b = clifford_operator(s, m);
      auto anti = a * b + b * a;
      if (n == -m)
        CHECK(anti == SparseOperator::identity(s.size()).scaled(2));
      else
        CHECK(anti.is_zero());
    }
  }
  auto psi1 = clifford_operator(s, 1), psim1 = clifford_operator(s, -1);
  CHECK(anticommutator_on(psi1, psim1, 0) == scaled_unit(0, 2));
  for (int n = 1; n <= 3; ++n) {
    auto col = clifford_operator(s, n).column(0);
    REQUIRE(col.size() == 1);
    CHECK(col[0].first == s.index_of(1u << (n - 1)));
  }
  CHECK_THROWS_AS(clifford_operator(s, 4), std::out_of_range);
  CHECK(operator_parity(psi1) == 1);
  CHECK(operator_parity(psi0) == 0);
}

TEST_CASE("graded tensor product") {
  SpinorBasis sp(2);
  auto fb = enumerate_basis({-2, 2}, std::nullopt);
  auto one_s = SparseOperator::identity(sp.size());
  one_s.set_manifest(sp.manifest());
  auto one_f = SparseOperator::identity(fb.size());
  one_f.set_manifest(fb.manifest());
  auto idt = tensor(one_s, one_f);
  CHECK(idt == SparseOperator::identity(sp.size() * fb.size()));
  CHECK(idt.rows() == sp.size() * fb.size());

  auto psi0 = clifford_operator(sp, 0);
  auto n = charge_operator(fb);
  CHECK(tensor(psi0, one_f) * tensor(one_s, n) == tensor(psi0, n));

  // even right factor commutes past an odd spinor operator
  auto e1 = loop_operator(fb, 1);
  auto psi1 = clifford_operator(sp, 1);
  CHECK(tensor(psi1, one_f) * tensor(one_s, e1) == tensor(one_s, e1) * tensor(psi1, one_f));
  // odd with odd anticommutes
  auto ad = creation(fb, 0);
  CHECK(tensor(psi1, one_f) * tensor(one_s, ad) == (tensor(one_s, ad) * tensor(psi1, one_f)).scaled(-1));

  CHECK_THROWS_AS(tensor(one_s, one_f, 10), std::length_error);
  CHECK_THROWS_AS(tensor(one_s, creation(fb, 0) + loop_operator(fb, 1)), std::invalid_argument);
}

TEST_CASE("dump format lists row col re im then the manifest") {
  SpinorBasis sp(1);
  std::ostringstream os;
  dump(clifford_operator(sp, 1), os);
  CHECK(os.str() == "# dim 2 2\n1 0 1 1\n# basis\n0 eta 0\n1 psi1 1\n");
}
