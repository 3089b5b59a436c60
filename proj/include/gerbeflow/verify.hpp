#pragma once

// Check suites shared by the command-line driver and the acceptance binary.

#include "gerbeflow/fock.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gerbeflow::verify {

struct CheckRecord {
  std::string name;
  std::string status;  // "pass", "fail" or "inconclusive"
  std::string value;
  std::string expected;
  std::optional<double> tolerance;  // empty for exact comparisons
  std::string kind;                 // "exact", "numeric", "reference" or "derived"

  bool passed() const { return status == "pass"; }
};

CheckRecord make_check(std::string name, bool ok, std::string value, std::string expected,
                       std::optional<double> tolerance, std::string kind);

// CAR relations on the full window; loop commutators for |n|, |m| <= 3, and shift
// conjugation, on guard-safe states. The window needs lo <= -4 and hi >= 4.
std::vector<CheckRecord> fock_algebra(const fock::ModeWindow& w);

struct CocycleSuite {
  std::string fixture = "s2";  // "s2" or "t3"
  long long k = 1;             // line bundle degree or extension class
  std::size_t samples = 32;    // composable tuples per check
  std::uint64_t seed = 1;
  int fock_half_width = 4;     // Fock window (-w, w) for the operator-valued cochains
};

// Throws std::invalid_argument for an unknown fixture or fewer than one sample.
std::vector<CheckRecord> cocycles(const CocycleSuite& suite);

}  // namespace gerbeflow::verify
