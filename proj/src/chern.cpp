#include "gerbeflow/chern.hpp"

#include "gerbeflow/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace gerbeflow::chern {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

}  // namespace

CharacterClass character_class(long long j_plus, long long j_minus, long long l_plus, long long l_minus) {
  auto [rp, rm] = ktheory::canonical_class(j_plus, j_minus, l_plus, l_minus);
  return {j_plus, j_minus, l_plus, l_minus, rp, rm};
}

std::string to_string(Verdict v) { return v == Verdict::equal ? "equal" : "distinct"; }

Verdict compare(const CharacterClass& a, const CharacterClass& b) {
  if (a.l_plus != b.l_plus || a.l_minus != b.l_minus)
    throw std::invalid_argument("character classes with different moduli are not comparable");
  return a.r_plus == b.r_plus && a.r_minus == b.r_minus ? Verdict::equal : Verdict::distinct;
}

ConsistencyCertificate consistency_with_ktheory(long long lo, long long hi, long long l_plus, long long l_minus) {
  ktheory::LaurentPairWindow w;
  w.lo = lo;
  w.hi = hi;
  w.l_plus = l_plus;
  w.l_minus = l_minus;
  const auto k = ktheory::equivariant_s2_twisted_k1(w);

  ConsistencyCertificate cert{lo, hi, l_plus, l_minus, 0, 0, std::nullopt};
  std::vector<std::pair<long long, long long>> pairs;
  for (long long a = lo; a <= hi; ++a)
    for (long long b = lo; b <= hi; ++b) pairs.emplace_back(a, b);
  for (const auto& x : pairs)
    for (const auto& y : pairs) {
      ++cert.comparisons;
      const bool by_character = compare(character_class(x.first, x.second, l_plus, l_minus),
                                        character_class(y.first, y.second, l_plus, l_minus)) == Verdict::equal;
      if (by_character != k.same_class(x, y)) {
        if (!cert.witness) cert.witness = {x, y};
        ++cert.mismatches;
      }
    }
  return cert;
}

namespace {

struct BlockSource {
  std::size_t count = 0;
  std::function<eigen::DenseMatrix(std::size_t, double)> matrix;
  std::function<eigen::DenseMatrix(std::size_t)> grading;
  std::function<bool(std::size_t)> sealed;
};

// sqrt(t) sum_k <v_k|G|v_k> exp(-t lambda_k^2), split into sealed and unsealed parts.
struct Sample {
  double sealed = 0, unsealed = 0, imaginary = 0;
};

Sample density_at(const BlockSource& src, double t, double phi) {
  Sample s;
  for (std::size_t b = 0; b < src.count; ++b) {
    const auto es = eigen::eigensolve(src.matrix(b, phi));
    const auto g = src.grading(b);
    const std::size_t n = es.values.size();
    std::complex<double> acc = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double w = std::exp(-t * es.values[k] * es.values[k]);
      if (w == 0) continue;
      std::complex<double> e = 0;
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
          if (g(r, c) != 0.0) e += std::conj(es.vectors(r, k)) * g(r, c) * es.vectors(c, k);
      acc += w * e;
    }
    acc *= std::sqrt(t);
    (src.sealed(b) ? s.sealed : s.unsealed) += acc.real();
    s.imaginary = std::max(s.imaginary, std::abs(acc.imag()));
  }
  return s;
}

double simpson(const std::vector<double>& f) {
  const std::size_t n = f.size() - 1;
  double acc = f.front() + f.back();
  for (std::size_t i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f[i];
  return acc / (3.0 * static_cast<double>(n));  // (h / 3) sum, divided by 2pi
}

DensityProfile profile(const BlockSource& src, double t, std::size_t samples) {
  if (!(t > 0)) throw std::invalid_argument("scale parameter t must be positive");
  if (samples < 2 || samples % 2) throw std::invalid_argument("Simpson rule needs an even number of intervals");
  DensityProfile p;
  p.t = t;
  p.phis.resize(samples + 1);
  for (std::size_t i = 0; i <= samples; ++i) p.phis[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(samples);
  std::vector<Sample> values(samples + 1);
  parallel_for(samples + 1, [&](std::size_t i) { values[i] = density_at(src, t, p.phis[i]); });
  std::vector<double> unsealed(samples + 1);
  p.density.resize(samples + 1);
  for (std::size_t i = 0; i <= samples; ++i) {
    p.density[i] = values[i].sealed;
    unsealed[i] = values[i].unsealed;
    p.max_imaginary = std::max(p.max_imaginary, values[i].imaginary);
  }
  p.integral = simpson(p.density);
  p.unsealed_integral = simpson(unsealed);
  for (std::size_t b = 0; b < src.count; ++b) p.sealed_blocks += src.sealed(b);
  p.reliable = p.sealed_blocks > 0 && p.max_imaginary < kImaginaryTolerance;
  return p;
}

}  // namespace

DensityProfile localization_density(const spectral::SuperchargeModel& model, double t, std::size_t samples) {
  BlockSource src;
  src.count = model.blocks().size();
  src.matrix = [&](std::size_t b, double phi) { return model.block_matrix(model.blocks()[b], phi); };
  src.grading = [&](std::size_t b) { return model.block_grading(model.blocks()[b]); };
  src.sealed = [&](std::size_t b) { return model.blocks()[b].sealed; };
  DensityProfile p = profile(src, t, samples);
  p.m = spectral::spectral_flow(model).net_flow;
  return p;
}

DensityProfile localization_density(const spectral::ExplicitFamily& family, const eigen::DenseMatrix& grading,
                                    double t, std::size_t samples) {
  BlockSource src;
  src.count = 1;
  src.matrix = [&](std::size_t, double phi) { return family.at(phi); };
  src.grading = [&](std::size_t) { return grading; };
  src.sealed = [](std::size_t) { return true; };
  DensityProfile p = profile(src, t, samples);
  p.m = spectral::spectral_flow(family, 64).net_flow;
  return p;
}

double localization_threshold() { return 4 * std::log(1000.0); }

StabilityCertificate transgression_stability(const std::vector<DensityProfile>& profiles) {
  if (profiles.size() < 2) throw std::invalid_argument("stability needs at least two values of t");
  StabilityCertificate c;
  for (const auto& p : profiles) {
    if (!c.ts.empty() && p.t <= c.ts.back()) throw std::invalid_argument("t values must increase");
    c.ts.push_back(p.t);
    c.integrals.push_back(p.integral);
  }
  const double ref = c.integrals.back();
  for (double v : c.integrals) c.drift = std::max(c.drift, std::abs(v - ref) / std::abs(ref));
  if (c.ts.front() < localization_threshold())
    c.status = "pre-asymptotic";
  else
    c.status = c.drift < kDriftTolerance ? "pass" : "fail";
  return c;
}

StabilityCertificate transgression_stability(const spectral::SuperchargeModel& model, const std::vector<double>& ts,
                                             std::size_t samples) {
  std::vector<DensityProfile> profiles;
  for (double t : ts) profiles.push_back(localization_density(model, t, samples));
  return transgression_stability(profiles);
}

}  // namespace gerbeflow::chern
