#include "gerbeflow/verify.hpp"

#include "gerbeflow/cocycle.hpp"

#include <map>
#include <memory>
#include <stdexcept>

namespace gerbeflow::verify {

CheckRecord make_check(std::string name, bool ok, std::string value, std::string expected,
                       std::optional<double> tolerance, std::string kind) {
  return {std::move(name), ok ? "pass" : "fail", std::move(value), std::move(expected), tolerance, std::move(kind)};
}

namespace {

using Vec = std::vector<SparseOperator::Entry>;

Vec combine(const Vec& a, const Vec& b, const GaussRational& sb) {
  std::map<std::size_t, GaussRational> acc;
  for (const auto& [i, v] : a) acc[i] += v;
  for (const auto& [i, v] : b) acc[i] += sb * v;
  Vec out;
  for (const auto& [i, v] : acc)
    if (!v.is_zero()) out.emplace_back(i, v);
  return out;
}

Vec scaled_unit(std::size_t i, long long k) {
  if (k == 0) return {};
  return {{i, GaussRational(k)}};
}

std::string ratio(std::size_t good, std::size_t total) {
  return std::to_string(good) + "/" + std::to_string(total);
}

}  // namespace

std::vector<CheckRecord> fock_algebra(const fock::ModeWindow& w) {
  w.validate();
  if (w.lo > -4 || w.hi < 4) throw std::invalid_argument("fock-algebra checks need a window containing [-4, 4)");
  const fock::FockBasis b = fock::enumerate_basis(w, std::nullopt);
  const std::size_t n = b.size();
  std::vector<CheckRecord> out;

  {
    const auto id = SparseOperator::identity(n);
    std::size_t good = 0, total = 0;
    for (int i = w.lo; i < w.hi; ++i)
      for (int j = w.lo; j < w.hi; ++j) {
        const auto ai = fock::annihilation(b, i), aj = fock::annihilation(b, j), cj = fock::creation(b, j);
        const auto mixed = ai * cj + cj * ai;
        good += (i == j ? mixed == id : mixed.is_zero()) && (ai * aj + aj * ai).is_zero() &&
                fock::creation(b, i).adjoint() == ai;
        ++total;
      }
    out.push_back(make_check("CAR relations", good == total, ratio(good, total) + " mode pairs",
                             "{a_i, a*_j} = delta_ij, {a_i, a_j} = 0, a*_i = (a_i)^*", std::nullopt, "exact"));
  }

  std::vector<SparseOperator> e;
  for (int k = -3; k <= 3; ++k) e.push_back(fock::loop_operator(b, k));
  {
    const fock::Mask safe = b.guard_mask(3);
    std::size_t good = 0, total = 0;
    for (int p = -3; p <= 3; ++p)
      for (int q = -3; q <= 3; ++q)
        for (std::size_t c = 0; c < n; ++c) {
          if (!safe[c]) continue;
          const auto& x = e[p + 3];
          const auto& y = e[q + 3];
          const Vec lhs = combine(x.apply(y.column(c)), y.apply(x.column(c)), GaussRational(-1));
          good += lhs == scaled_unit(c, p == -q ? -p : 0);
          ++total;
        }
    out.push_back(make_check("loop commutators", good == total, ratio(good, total) + " (n, m, state) triples",
                             "[e_n, e_m] = -n delta_{n,-m} for |n|, |m| <= 3 on guard-safe states", std::nullopt,
                             "exact"));
  }

  const auto s = fock::shift_operator(b);
  const auto si = fock::shift_inverse(b);
  {
    const auto nop = fock::charge_operator(b);
    const auto lhs = s.op * nop - (nop - SparseOperator::identity(n)) * s.op;
    std::size_t good = 0, total = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (!s.safe[c]) continue;
      good += lhs.column(c).empty();
      ++total;
    }
    out.push_back(make_check("shift lowers the charge under conjugation", good == total,
                             ratio(good, total) + " columns", "SN = (N - 1)S", std::nullopt, "exact"));
  }
  for (int k : {0, 1, -1, 2, -2}) {
    const fock::Mask safe = b.guard_mask(std::abs(k) + 1);
    std::size_t good = 0, total = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (!safe[c]) continue;
      const Vec lhs = s.op.apply(e[k + 3].apply(si.op.column(c)));
      Vec rhs = e[k + 3].column(c);
      if (k == 0) rhs = combine(rhs, scaled_unit(c, 1), GaussRational(-1));
      good += lhs == rhs;
      ++total;
    }
    const std::string name = "shift conjugation of e_" + std::to_string(k);
    out.push_back(make_check(name, good == total, ratio(good, total) + " columns",
                             k == 0 ? "S e_0 S^-1 = e_0 - 1" : "S e_n S^-1 = e_n", std::nullopt, "exact"));
  }
  return out;
}

namespace {

CheckRecord from_check(const cocycle::Check& c, const std::string& expected) {
  std::string value = std::to_string(c.samples) + " samples";
  if (!c.passed && !c.witness.empty()) value += ", first failure " + c.witness;
  return make_check(c.name, c.passed, value, expected, c.exact ? std::nullopt : std::optional<double>(1e-10),
                    c.exact ? "exact" : "numeric");
}

cocycle::Check all_one(const std::string& name, const cocycle::Cochain<cocycle::CircleValue>& c,
                       const std::vector<cocycle::ChainSample>& samples) {
  return cocycle::compare_phases(name, c, cocycle::constant_phase(c.degree, cocycle::CircleValue()), samples);
}

std::vector<CheckRecord> s2_suite(const CocycleSuite& s) {
  using namespace cocycle;
  auto basis =
      std::make_shared<const fock::FockBasis>(fock::enumerate_basis({-s.fock_half_width, s.fock_half_width}, std::nullopt));
  std::vector<CheckRecord> out;
  const auto h = s2_line_cocycle(s.k, 0);
  for (bool equivariant : {false, true}) {
    const Groupoid g = s2_groupoid(equivariant);
    const std::string tag = equivariant ? " (circle action)" : " (trivial action)";
    const auto pairs = sample_chains(g, 2, s.samples, s.seed);
    const auto triples = sample_chains(g, 3, s.samples, s.seed + 1);
    out.push_back(from_check(all_one("line cocycle closed" + tag, coboundary(g, h), pairs), "coboundary(h) = 1"));
    const auto f = gerbe_class(g, build_fock_gerbe(g, h, basis, pairs).lifted);
    out.push_back(from_check(compare_phases("gerbe class closed form" + tag, f, gerbe_closed_form(g, h), pairs),
                             "lifted transitions give the closed-form components"));
    out.push_back(from_check(all_one("gerbe class closed" + tag, coboundary(g, f), triples), "coboundary(f) = 1"));
    const auto cert = verify_cup_decomposition(g, f, h, pairs, triples);
    out.push_back(from_check(cert.factorization, "f = coboundary(s) exp(t)"));
    out.push_back(from_check(cert.cup_relation, "coboundary(t) = alpha cup beta"));
  }
  const std::size_t grid = static_cast<std::size_t>(8 * (std::abs(s.k) + 1));
  const long long winding = s2_winding(s.k, 0, grid).winding;
  out.push_back(make_check("line bundle winding", winding == s.k, std::to_string(winding), std::to_string(s.k),
                           std::nullopt, "exact"));
  return out;
}

std::vector<CheckRecord> t3_suite(const CocycleSuite& s) {
  using namespace cocycle;
  auto basis =
      std::make_shared<const fock::FockBasis>(fock::enumerate_basis({-s.fock_half_width, s.fock_half_width}, std::nullopt));
  const Groupoid g = t3_groupoid();
  const auto pairs = sample_chains(g, 2, s.samples, s.seed);
  const auto triples = sample_chains(g, 3, s.samples, s.seed + 1);
  const T3Extension ext = t3_extension(s.k, basis);
  const T3Certificates c = verify_t3(ext, pairs, triples);
  std::vector<CheckRecord> out;
  out.push_back(from_check(c.omega_cocycle, "coboundary(omega) = 1"));
  out.push_back(from_check(c.lift_equals_omega, "coboundary(lift) = omega"));
  CheckRecord inverse = from_check(c.lift_equals_omega_inverse, "coboundary(lift) = omega^-1");
  inverse.kind = "derived";
  out.push_back(inverse);
  out.push_back(from_check(c.associativity, "extension product is associative"));
  out.push_back(from_check(c.cup_generator, "generator cup product is a2 b1 c0"));
  out.push_back(from_check(compare_phases("factorization omega = exp(t)", ext.omega, exp_turns(ext.omega_log), pairs),
                           "f = coboundary(s) exp(t) with s = 1"));
  CheckRecord log = from_check(c.log_coboundary, "coboundary(t) = -(alpha cup beta)");
  log.kind = "derived";
  out.push_back(log);
  return out;
}

}  // namespace

std::vector<CheckRecord> cocycles(const CocycleSuite& suite) {
  if (suite.samples < 1) throw std::invalid_argument("need at least one sample");
  if (suite.fock_half_width < 2 || suite.fock_half_width > 10)
    throw std::invalid_argument("Fock half-width must lie in [2, 10]");
  if (suite.fixture == "s2") return s2_suite(suite);
  if (suite.fixture == "t3") return t3_suite(suite);
  throw std::invalid_argument("unknown cocycle fixture '" + suite.fixture + "' (expected s2 or t3)");
}

}  // namespace gerbeflow::verify
