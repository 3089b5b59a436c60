#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace gerbeflow {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_string(const Integer& v) { return v.str(); }

inline std::string to_string(const Rational& v) {
  if (denominator(v) == 1) return numerator(v).str();
  return numerator(v).str() + "/" + denominator(v).str();
}

inline Integer floor_div(const Integer& a, const Integer& b) {
  Integer q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Representative of r modulo 1 in [0, 1).
inline Rational frac(const Rational& r) {
  Integer fl = floor_div(numerator(r), denominator(r));
  return r - Rational(fl);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace gerbeflow
