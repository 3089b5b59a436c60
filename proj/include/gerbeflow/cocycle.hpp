#pragma once

// Sampled cochains on finite-cover groupoids with exact circle phases, integer or
// rational values, and monomial Fock-space operators.

#include "gerbeflow/fock.hpp"
#include "gerbeflow/numbers.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gerbeflow::cocycle {

// A point of the circle group: exact e^{2 pi i q} with q in [0,1), or a float unit complex.
class CircleValue {
 public:
  CircleValue() = default;  // 1
  static CircleValue exact(const Rational& turns);
  static CircleValue approx(std::complex<double> z);  // |z| must be 1 within 1e-12

  bool is_exact() const { return exact_; }
  const Rational& turns() const;  // exact only
  std::complex<double> value() const;
  bool is_one(double tol = 1e-10) const;

  CircleValue operator*(const CircleValue& o) const;
  CircleValue inverse() const;
  CircleValue pow(long long k) const;

  // exact values compare exactly; anything involving a float compares within tol
  bool equals(const CircleValue& o, double tol = 1e-10) const;
  bool operator==(const CircleValue& o) const { return equals(o); }

  std::string str() const;  // "e(1/3)" or "(re,im)"

 private:
  bool exact_ = true;
  Rational q_{0};
  std::complex<double> z_{1.0, 0.0};
};

struct ChainSample;
class SampleStream;

using GroupElement = std::vector<Rational>;
using Point = std::vector<Rational>;

// A groupoid of local group actions on a finite cover. For a circle split with
// n > 0, chart c < n is T+ x V_c and chart c >= n is T- x V_{c-n}; the first point
// coordinate is the circle angle in turns.
struct Groupoid {
  std::string name;
  int charts = 1;
  int circle_split = 0;
  std::function<GroupElement(const GroupElement&, const GroupElement&)> multiply;
  std::function<Point(const GroupElement&, const Point&)> act;
  std::function<bool(int, const Point&)> contains;
  // Draws one composable chain of the given degree.
  std::function<ChainSample(SampleStream&, int)> sample;
};

// +1 near angle 0, -1 near angle 1/2, 0 elsewhere (angle in turns).
int arc_tag(const Rational& angle);
inline const Rational kArcHalfWidth{1, 8};

// Composable chain gamma_1 ... gamma_p. gamma_i runs from chart charts[i] to chart
// charts[i-1] with group element elems[i-1]; base is the source point of gamma_p.
struct ChainSample {
  std::vector<int> charts;
  std::vector<GroupElement> elems;
  Point base;

  int degree() const { return static_cast<int>(elems.size()); }
  std::string key() const;
};

struct GroupoidArrow {
  int target_chart = 0;
  int source_chart = 0;
  GroupElement element;
  Point source;
};

// Points along the chain: result[p] = base, result[i-1] = g_i result[i].
std::vector<Point> chain_points(const Groupoid& g, const ChainSample& s);
GroupoidArrow arrow(const Groupoid& g, const ChainSample& s, int i);  // 1-based
ChainSample face(const Groupoid& g, const ChainSample& s, int i);
// Front p-face and back q-face of a (p+q)-chain.
ChainSample front_face(const Groupoid& g, const ChainSample& s, int p);
ChainSample back_face(const ChainSample& s, int q);
// Throws std::invalid_argument unless every point lies in its chart.
void validate_chain(const Groupoid& g, const ChainSample& s);

class MissingSample : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

template <class V>
struct Cochain {
  int degree = 0;
  std::string name;
  std::function<V(const ChainSample&)> eval;

  V operator()(const ChainSample& s) const {
    if (s.degree() != degree)
      throw std::invalid_argument(name + ": expected a " + std::to_string(degree) + "-chain");
    return eval(s);
  }
};

// Freezes c on the given samples; evaluating elsewhere throws MissingSample.
template <class V>
Cochain<V> tabulate(const Cochain<V>& c, const std::vector<ChainSample>& samples) {
  auto table = std::make_shared<std::map<std::string, V>>();
  for (const auto& s : samples) table->emplace(s.key(), c(s));
  return {c.degree, c.name, [table, name = c.name](const ChainSample& s) {
            auto it = table->find(s.key());
            if (it == table->end()) throw MissingSample(name + ": no sample for " + s.key());
            return it->second;
          }};
}

// Monomial partial operator on a truncated Fock space: each column maps to one row
// with a circle phase, or is outside the domain.
class PhaseOp {
 public:
  using Slot = std::optional<std::pair<std::size_t, CircleValue>>;

  PhaseOp(std::shared_ptr<const fock::FockBasis> basis, std::vector<Slot> cols);
  static PhaseOp identity(std::shared_ptr<const fock::FockBasis> basis);
  static PhaseOp charge_phase(std::shared_ptr<const fock::FockBasis> basis, const CircleValue& h);  // h^N
  static PhaseOp shift(std::shared_ptr<const fock::FockBasis> basis, long long power);  // S^power

  const fock::FockBasis& basis() const { return *basis_; }
  const std::vector<Slot>& columns() const { return cols_; }
  fock::Mask domain() const;
  std::size_t domain_size() const;

  PhaseOp operator*(const PhaseOp& o) const;
  PhaseOp inverse() const;

  // Common phase if the operator is a scalar on a nonempty domain.
  std::optional<CircleValue> scalar_value() const;
  bool equals(const PhaseOp& o) const;

 private:
  std::shared_ptr<const fock::FockBasis> basis_;
  std::vector<Slot> cols_;
};

// Equal up to one global phase, read off the first slot in the common domain.
bool projectively_equal(const PhaseOp& a, const PhaseOp& b);

// Additive alternating sum of faces.
Cochain<Rational> coboundary(const Groupoid& g, const Cochain<Rational>& c);
// Multiplicative alternating product of faces.
Cochain<CircleValue> coboundary(const Groupoid& g, const Cochain<CircleValue>& c);
// Degree 1 only: c(g1) c(g2) c(g1 g2)^{-1}.
Cochain<PhaseOp> coboundary(const Groupoid& g, const Cochain<PhaseOp>& c);

// Front-face times back-face.
Cochain<Rational> cup_product(const Groupoid& g, const Cochain<Rational>& a, const Cochain<Rational>& b);

Cochain<Rational> constant_cochain(int degree, const Rational& v, std::string name = "const");
Cochain<CircleValue> constant_phase(int degree, const CircleValue& v, std::string name = "const");
// e^{2 pi i c}
Cochain<CircleValue> exp_turns(const Cochain<Rational>& c);
// Branch of the logarithm in [0,1) turns; exact phases only.
Cochain<Rational> log_turns(const Cochain<CircleValue>& c);
Cochain<CircleValue> multiply(const Cochain<CircleValue>& a, const Cochain<CircleValue>& b);

struct Check {
  std::string name;
  bool passed = false;
  std::size_t samples = 0;
  std::string witness;  // first failing sample, if any
  bool exact = true;
};

// Pointwise comparison over samples.
Check compare_phases(const std::string& name, const Cochain<CircleValue>& a, const Cochain<CircleValue>& b,
                     const std::vector<ChainSample>& samples, double tol = 1e-10);
Check compare_values(const std::string& name, const Cochain<Rational>& a, const Cochain<Rational>& b,
                     const std::vector<ChainSample>& samples);

// Deterministic low-discrepancy rationals (Halton digits with a seed offset).
class SampleStream {
 public:
  explicit SampleStream(std::uint64_t seed) : index_(seed * 7919 + 1) {}
  // radical inverse of the current index in a prime base, in [0,1)
  Rational unit(int dim);
  long long integer(int dim, long long lo, long long hi);  // uniform-ish in [lo, hi]
  void advance() { ++index_; }

 private:
  std::uint64_t index_;
};

std::vector<ChainSample> sample_chains(const Groupoid& g, int degree, std::size_t count, std::uint64_t seed);

// Groupoid fixtures -------------------------------------------------------------

// Circle group acting on S^2 by rotation; points (angle, alpha, r) in turns and height.
// Charts: T+ x S2+, T+ x S2-, T- x S2+, T- x S2-. The tube is |r| < 1/4.
// With equivariant = false the group is trivial.
Groupoid s2_groupoid(bool equivariant);
// Z^3 acting on R^3 by translation, a single chart.
Groupoid t3_groupoid();

class NotACocycle : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct WindingCertificate {
  long long winding = 0;
  std::size_t grid = 0;
};

// Equivariant line bundle (a^{n+}, a^{n-}) on S^2 as a circle-valued 1-cochain.
Cochain<CircleValue> s2_line_cocycle(long long n_plus, long long n_minus);
// Discrete winding of alpha -> h_{+-}(1, (alpha, 0)) on a uniform grid; throws if a
// phase step reaches 1/2.
WindingCertificate s2_winding(long long n_plus, long long n_minus, std::size_t grid);

// Fock gerbe -------------------------------------------------------------------

struct FockGerbe {
  Cochain<PhaseOp> lifted;
  Cochain<PhaseOp> projective;  // same values, compared with projectively_equal
};

// h^N on same-half chart pairs and on the -1 arc; h^N S and S^{-1} h^N across the +1 arc.
// Throws NotACocycle if h fails the cocycle condition on the given 2-chains.
FockGerbe build_fock_gerbe(const Groupoid& g, const Cochain<CircleValue>& h,
                           std::shared_ptr<const fock::FockBasis> basis,
                           const std::vector<ChainSample>& cocycle_samples);

class NonScalar : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Coboundary of the lift, reduced to its scalar; throws NonScalar otherwise.
Cochain<CircleValue> gerbe_class(const Groupoid& g, const Cochain<PhaseOp>& lifted);

// Closed-form components on the +1 arc: h(g2)^{-1} for charts (lower, upper, upper),
// h(g1 g2) for (upper, lower, upper), h(g1)^{-1} for (upper, upper, lower); 1 elsewhere.
Cochain<CircleValue> gerbe_closed_form(const Groupoid& g, const Cochain<CircleValue>& h);

struct CupDecomposition {
  Cochain<Rational> alpha;  // circle generator
  Cochain<Rational> beta;   // coboundary of the [0,1) logarithm of h
  Cochain<CircleValue> s;
  Cochain<Rational> t;      // in units of 2 pi i
};

CupDecomposition cup_decomposition(const Groupoid& g, const Cochain<CircleValue>& h);

struct CupCertificate {
  Check factorization;   // f = coboundary(s) exp(t)
  Check cup_relation;    // coboundary(t) = alpha cup beta
};

CupCertificate verify_cup_decomposition(const Groupoid& g, const Cochain<CircleValue>& f,
                                        const Cochain<CircleValue>& h, const std::vector<ChainSample>& pairs,
                                        const std::vector<ChainSample>& triples);

// Torus extension -------------------------------------------------------------

struct T3Extension {
  long long k = 0;
  Cochain<CircleValue> omega;
  Cochain<Rational> omega_log;  // k a0 b2 x1 in units of 2 pi i
  Cochain<PhaseOp> lift;        // (e^{2 pi i k a2 x1})^N S^{a0}
  std::vector<Cochain<Rational>> generators;  // a -> a_i
};

T3Extension t3_extension(long long k, std::shared_ptr<const fock::FockBasis> basis);

struct T3Certificates {
  Check omega_cocycle;
  Check lift_equals_omega;
  Check lift_equals_omega_inverse;
  Check associativity;
  Check cup_generator;       // a2 b1 c0
  Check log_coboundary;      // coboundary(omega_log) = -(alpha cup beta)
};

T3Certificates verify_t3(const T3Extension& ext, const std::vector<ChainSample>& pairs,
                         const std::vector<ChainSample>& triples);

}  // namespace gerbeflow::cocycle
