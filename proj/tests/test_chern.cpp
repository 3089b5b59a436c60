#include "gerbeflow/chern.hpp"
#include "oracles/jacobi.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace gerbeflow;
using namespace gerbeflow::chern;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
const double kSqrtPi = std::sqrt(std::numbers::pi);

std::vector<std::vector<std::complex<double>>> to_rows(const eigen::DenseMatrix& m) {
  std::vector<std::vector<std::complex<double>>> rows(m.rows(), std::vector<std::complex<double>>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  return rows;
}

// With Q(u) = K + u G the density is d/du of tr F(Q), F(x) = (sqrt(pi)/2) erf(sqrt(t) x),
// so its integral needs only the endpoint spectra.
double erf_trace(const std::vector<double>& at0, const std::vector<double>& at1, double t) {
  double acc = 0;
  for (double l : at1) acc += 0.5 * kSqrtPi * std::erf(std::sqrt(t) * l);
  for (double l : at0) acc -= 0.5 * kSqrtPi * std::erf(std::sqrt(t) * l);
  return acc;
}

double oracle_integral(const spectral::SuperchargeModel& m, double t) {
  double acc = 0;
  for (const auto& b : m.blocks())
    if (b.sealed)
      acc += erf_trace(oracle::jacobi_eigenvalues(to_rows(m.block_matrix(b, 0.0))),
                       oracle::jacobi_eigenvalues(to_rows(m.block_matrix(b, kTwoPi))), t);
  return acc;
}

spectral::ExplicitFamily toy() {
  return {[](double phi) {
            eigen::DenseMatrix m(1, 1);
            m(0, 0) = phi / kTwoPi - 0.5;
            return m;
          },
          1};
}

eigen::DenseMatrix unit_grading(std::size_t n) { return eigen::DenseMatrix::identity(n); }

spectral::SuperchargeConfig config(int m, int cutoff) {
  spectral::SuperchargeConfig c;
  c.window = {-m, m};
  c.cutoff = cutoff;
  return c;
}

}  // namespace

TEST_CASE("compare on residues") {
  CHECK(compare(character_class(1, 0, 2, 3), character_class(3, 0, 2, 3)) == Verdict::equal);
  CHECK(compare(character_class(1, 1, 2, 3), character_class(0, 1, 2, 3)) == Verdict::distinct);
  CHECK(compare(character_class(-1, 4, 2, 3), character_class(1, 1, 2, 3)) == Verdict::equal);
  CHECK(to_string(Verdict::distinct) == "distinct");
  CHECK_THROWS_AS(compare(character_class(0, 0, 2, 3), character_class(0, 0, 3, 2)), std::invalid_argument);
}

TEST_CASE("compare is an equivalence relation") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long long> e(-30, 30), l(1, 5);
  for (int trial = 0; trial < 300; ++trial) {
    const long long lp = l(rng), lm = l(rng);
    auto draw = [&] { return character_class(e(rng), e(rng), lp, lm); };
    const auto a = draw(), b = draw(), c = draw();
    CHECK(compare(a, a) == Verdict::equal);
    CHECK(compare(a, b) == compare(b, a));
    if (compare(a, b) == Verdict::equal && compare(b, c) == Verdict::equal) CHECK(compare(a, c) == Verdict::equal);
    // Shifting by the moduli never changes the class.
    CHECK(compare(a, character_class(a.c_plus + lp, a.c_minus - 2 * lm, lp, lm)) == Verdict::equal);
  }
}

TEST_CASE("character comparison agrees with the windowed K-group") {
  for (auto [lp, lm] : std::vector<std::pair<long long, long long>>{{1, 1}, {2, 3}, {3, 2}, {2, 1}}) {
    CAPTURE(lp);
    CAPTURE(lm);
    const auto cert = consistency_with_ktheory(-4, 4, lp, lm);
    CHECK(cert.comparisons == 6561);
    CHECK(cert.mismatches == 0);
    CHECK(cert.passed());
    CHECK_FALSE(cert.witness.has_value());
  }
  ktheory::LaurentPairWindow w;
  w.lo = -4;
  w.hi = 4;
  w.l_plus = 2;
  w.l_minus = 1;
  const auto k = ktheory::equivariant_s2_twisted_k1(w);
  CHECK(k.same_class({1, 5 - 8}, {3, 5 - 8}));
  CHECK(compare(character_class(1, 5, 2, 1), character_class(3, 5, 2, 1)) == Verdict::equal);
}

TEST_CASE("toy family integrates to sqrt(pi) erf(sqrt(t)/2)") {
  for (double t : {0.5, 4.0, 50.0, 200.0}) {
    CAPTURE(t);
    const auto p = localization_density(toy(), unit_grading(1), t);
    CHECK(p.integral == doctest::Approx(kSqrtPi * std::erf(std::sqrt(t) / 2)).epsilon(1e-9));
    CHECK(p.m == 1);
    CHECK(p.reliable);
    CHECK(p.max_imaginary == 0.0);
  }
  CHECK(std::abs(localization_density(toy(), unit_grading(1), 200.0).integral - kSqrtPi) < 1e-6);
}

TEST_CASE("density integral is linear in rank") {
  const double one = localization_density(spectral::SuperchargeModel(config(4, 2)), 100.0, 512).integral;
  for (int r : {2, 3}) {
    spectral::SuperchargeConfig c = config(4, 2);
    c.rank = r;
    const auto p = localization_density(spectral::SuperchargeModel(c), 100.0, 512);
    CHECK(std::abs(p.integral - r * one) < 1e-9);
    CHECK(p.m == r);
  }
}

TEST_CASE("a gapped graded spectator leaves the integral unchanged") {
  // Spectator [[0, c], [c, 0]] with grading diag(1, -1): Q^2 = c^2, tr G = 0.
  spectral::ExplicitFamily with{[](double phi) {
                                  eigen::DenseMatrix m(3, 3);
                                  m(0, 0) = phi / kTwoPi - 0.5;
                                  m(1, 2) = m(2, 1) = 0.3;
                                  return m;
                                },
                                1};
  eigen::DenseMatrix g = unit_grading(3);
  g(2, 2) = -1;
  for (double t : {1.0, 100.0}) {
    const double bare = localization_density(toy(), unit_grading(1), t).integral;
    CHECK(std::abs(localization_density(with, g, t).integral - bare) < 1e-12);
  }
}

TEST_CASE("full model localizes to sqrt(pi) times the flow") {
  spectral::SuperchargeModel model(config(4, 2));
  std::vector<DensityProfile> profiles;
  for (double t : {100.0, 200.0}) {
    CAPTURE(t);
    const auto p = localization_density(model, t);
    CHECK(p.m == 1);
    CHECK(p.reliable);
    CHECK(p.sealed_blocks == 9);
    CHECK(p.max_imaginary < kImaginaryTolerance);
    CHECK(std::abs(p.integral - kSqrtPi * p.m) < 0.05 * kSqrtPi * std::abs(p.m));
    CHECK(p.integral == doctest::Approx(oracle_integral(model, t)).epsilon(1e-8));
    profiles.push_back(p);
  }
  const auto s = transgression_stability(profiles);
  CHECK(s.status == "pass");
  CHECK(s.drift < kDriftTolerance);
}

TEST_CASE("small t is reported as pre-asymptotic") {
  spectral::SuperchargeModel model(config(4, 2));
  CHECK(localization_threshold() == doctest::Approx(4 * std::log(1000.0)));
  const auto s = transgression_stability(model, {1.0, 100.0}, 512);
  CHECK(s.status == "pre-asymptotic");
  CHECK(s.integrals.size() == 2);

  std::vector<DensityProfile> toys;
  for (double t : {50.0, 100.0, 200.0}) toys.push_back(localization_density(toy(), unit_grading(1), t));
  const auto c = transgression_stability(toys);
  CHECK(c.status == "pass");
  CHECK(c.drift < 1e-3);
}

TEST_CASE("no sealed block means an unreliable profile") {
  spectral::SuperchargeConfig c = config(2, 3);
  c.guard = 2;  // every state lacks the cutoff margin somewhere
  spectral::SuperchargeModel model(c);
  const auto p = localization_density(model, 100.0, 64);
  CHECK(p.sealed_blocks == 0);
  CHECK_FALSE(p.reliable);
  CHECK(p.integral == 0.0);
}

TEST_CASE("invalid density inputs") {
  CHECK_THROWS_AS(localization_density(toy(), unit_grading(1), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(localization_density(toy(), unit_grading(1), 10.0, 7), std::invalid_argument);
  std::vector<DensityProfile> one{localization_density(toy(), unit_grading(1), 10.0, 64)};
  CHECK_THROWS_AS(transgression_stability(one), std::invalid_argument);
  one.push_back(localization_density(toy(), unit_grading(1), 5.0, 64));
  CHECK_THROWS_AS(transgression_stability(one), std::invalid_argument);
}
