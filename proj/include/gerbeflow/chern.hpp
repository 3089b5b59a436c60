#pragma once

// Character classes for the equivariant S^2 twist, and the t -> infinity localization
// of the odd character density of the supercharge family.

#include "gerbeflow/ktheory.hpp"
#include "gerbeflow/spectral.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gerbeflow::chern {

struct CharacterClass {
  long long c_plus = 0, c_minus = 0;
  long long l_plus = 1, l_minus = 1;
  long long r_plus = 0, r_minus = 0;  // residues in [0, l)
};

CharacterClass character_class(long long j_plus, long long j_minus, long long l_plus, long long l_minus);

enum class Verdict { equal, distinct };
std::string to_string(Verdict v);

// Throws std::invalid_argument if the moduli differ.
Verdict compare(const CharacterClass& a, const CharacterClass& b);

struct ConsistencyCertificate {
  long long lo = 0, hi = 0, l_plus = 1, l_minus = 1;
  std::size_t comparisons = 0;
  std::size_t mismatches = 0;
  std::optional<std::pair<std::pair<long long, long long>, std::pair<long long, long long>>> witness;
  bool passed() const { return mismatches == 0; }
};

// compare() against class equality in the windowed K-group, over all pairs of
// monomial pairs (a^{j+}, a^{j-}) with exponents in [lo, hi].
ConsistencyCertificate consistency_with_ktheory(long long lo, long long hi, long long l_plus, long long l_minus);

inline constexpr std::size_t kDefaultSamples = 2048;  // Simpson intervals over [0, 2pi]

struct DensityProfile {
  double t = 0;
  std::vector<double> phis;
  std::vector<double> density;   // sqrt(t) tr(G exp(-t Q^2)) over sealed blocks
  double integral = 0;           // of density dphi / 2pi over [0, 2pi]
  double max_imaginary = 0;
  int m = 0;                     // net zero crossings of the same blocks
  double unsealed_integral = 0;  // what the excluded truncated blocks would add
  std::size_t sealed_blocks = 0;
  bool reliable = true;          // some block is sealed and the trace is real
};

inline constexpr double kImaginaryTolerance = 1e-9;

// G is the grading psi_0 (x) 1.
DensityProfile localization_density(const spectral::SuperchargeModel& model, double t,
                                    std::size_t samples = kDefaultSamples);
// Explicit family with a constant grading matrix, treated as one sealed block.
DensityProfile localization_density(const spectral::ExplicitFamily& family, const eigen::DenseMatrix& grading,
                                    double t, std::size_t samples = kDefaultSamples);

// Below this t the Gaussian at half the unit eigenvalue spacing still exceeds 1e-3.
double localization_threshold();  // 4 ln 1000

struct StabilityCertificate {
  std::vector<double> ts;
  std::vector<double> integrals;
  double drift = 0;    // max |I(t) - I(t_max)| / |I(t_max)|
  std::string status;  // "pass", "fail" or "pre-asymptotic"
};

inline constexpr double kDriftTolerance = 0.01;

StabilityCertificate transgression_stability(const std::vector<DensityProfile>& profiles);
StabilityCertificate transgression_stability(const spectral::SuperchargeModel& model, const std::vector<double>& ts,
                                             std::size_t samples = kDefaultSamples);

}  // namespace gerbeflow::chern
