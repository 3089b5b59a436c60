#include "gerbeflow/cocycle.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace gerbeflow::cocycle {

// CircleValue ---------------------------------------------------------------------

CircleValue CircleValue::exact(const Rational& turns) {
  CircleValue v;
  v.q_ = frac(turns);
  return v;
}

CircleValue CircleValue::approx(std::complex<double> z) {
  if (std::abs(std::abs(z) - 1.0) > 1e-12) throw std::invalid_argument("circle value off the unit circle");
  CircleValue v;
  v.exact_ = false;
  v.z_ = z;
  return v;
}

const Rational& CircleValue::turns() const {
  if (!exact_) throw std::logic_error("float circle value has no exact turns");
  return q_;
}

std::complex<double> CircleValue::value() const {
  if (!exact_) return z_;
  return std::polar(1.0, 2.0 * std::numbers::pi * to_double(q_));
}

bool CircleValue::is_one(double tol) const { return equals(CircleValue(), tol); }

CircleValue CircleValue::operator*(const CircleValue& o) const {
  if (exact_ && o.exact_) return exact(q_ + o.q_);
  return approx(value() * o.value());
}

CircleValue CircleValue::inverse() const {
  if (exact_) return exact(-q_);
  return approx(std::conj(z_));
}

CircleValue CircleValue::pow(long long k) const {
  if (exact_) return exact(q_ * k);
  return approx(std::pow(z_, static_cast<double>(k)));
}

bool CircleValue::equals(const CircleValue& o, double tol) const {
  if (exact_ && o.exact_) return q_ == o.q_;
  return std::abs(value() - o.value()) <= tol;
}

std::string CircleValue::str() const {
  if (exact_) return "e(" + to_string(q_) + ")";
  std::ostringstream os;
  os.precision(17);
  os << "(" << z_.real() << "," << z_.imag() << ")";
  return os.str();
}

// Chains --------------------------------------------------------------------------

int arc_tag(const Rational& angle) {
  const Rational t = frac(angle);
  if (t < kArcHalfWidth || t > 1 - kArcHalfWidth) return 1;
  if (t > Rational(1, 2) - kArcHalfWidth && t < Rational(1, 2) + kArcHalfWidth) return -1;
  return 0;
}

std::string ChainSample::key() const {
  std::ostringstream os;
  os << "c";
  for (int c : charts) os << ":" << c;
  for (const auto& g : elems) {
    os << "|g";
    for (const auto& v : g) os << ":" << to_string(v);
  }
  os << "|x";
  for (const auto& v : base) os << ":" << to_string(v);
  return os.str();
}

std::vector<Point> chain_points(const Groupoid& g, const ChainSample& s) {
  const int p = s.degree();
  std::vector<Point> pts(p + 1);
  pts[p] = s.base;
  for (int i = p; i >= 1; --i) pts[i - 1] = g.act(s.elems[i - 1], pts[i]);
  return pts;
}

GroupoidArrow arrow(const Groupoid& g, const ChainSample& s, int i) {
  if (i < 1 || i > s.degree()) throw std::out_of_range("arrow index");
  auto pts = chain_points(g, s);
  return {s.charts[i - 1], s.charts[i], s.elems[i - 1], pts[i]};
}

ChainSample face(const Groupoid& g, const ChainSample& s, int i) {
  const int p = s.degree();
  if (i < 0 || i > p) throw std::out_of_range("face index");
  ChainSample out;
  if (i == 0) {
    out.charts.assign(s.charts.begin() + 1, s.charts.end());
    out.elems.assign(s.elems.begin() + 1, s.elems.end());
    out.base = s.base;
  } else if (i == p) {
    out.charts.assign(s.charts.begin(), s.charts.end() - 1);
    out.elems.assign(s.elems.begin(), s.elems.end() - 1);
    out.base = g.act(s.elems[p - 1], s.base);
  } else {
    out.charts = s.charts;
    out.charts.erase(out.charts.begin() + i);
    out.elems = s.elems;
    out.elems[i - 1] = g.multiply(s.elems[i - 1], s.elems[i]);
    out.elems.erase(out.elems.begin() + i);
    out.base = s.base;
  }
  return out;
}

ChainSample front_face(const Groupoid& g, const ChainSample& s, int p) {
  ChainSample out = s;
  while (out.degree() > p) out = face(g, out, out.degree());
  return out;
}

ChainSample back_face(const ChainSample& s, int q) {
  const int p = s.degree() - q;
  ChainSample out;
  out.charts.assign(s.charts.begin() + p, s.charts.end());
  out.elems.assign(s.elems.begin() + p, s.elems.end());
  out.base = s.base;
  return out;
}

void validate_chain(const Groupoid& g, const ChainSample& s) {
  if (s.charts.size() != s.elems.size() + 1) throw std::invalid_argument("chain needs degree+1 charts");
  auto pts = chain_points(g, s);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (s.charts[i] < 0 || s.charts[i] >= g.charts) throw std::invalid_argument("chart index out of range");
    if (!g.contains(s.charts[i], pts[i])) throw std::invalid_argument("chain point outside its chart: " + s.key());
  }
}

// PhaseOp -------------------------------------------------------------------------

PhaseOp::PhaseOp(std::shared_ptr<const fock::FockBasis> basis, std::vector<Slot> cols)
    : basis_(std::move(basis)), cols_(std::move(cols)) {
  if (cols_.size() != basis_->size()) throw std::invalid_argument("phase operator size mismatch");
}

PhaseOp PhaseOp::identity(std::shared_ptr<const fock::FockBasis> basis) {
  std::vector<Slot> cols(basis->size());
  for (std::size_t c = 0; c < cols.size(); ++c) cols[c] = Slot({c, CircleValue()});
  return PhaseOp(std::move(basis), std::move(cols));
}

PhaseOp PhaseOp::charge_phase(std::shared_ptr<const fock::FockBasis> basis, const CircleValue& h) {
  std::vector<Slot> cols(basis->size());
  for (std::size_t c = 0; c < cols.size(); ++c) cols[c] = Slot({c, h.pow((*basis)[c].charge)});
  return PhaseOp(std::move(basis), std::move(cols));
}

PhaseOp PhaseOp::shift(std::shared_ptr<const fock::FockBasis> basis, long long power) {
  const fock::ModeWindow& w = basis->window();
  std::vector<Slot> cols(basis->size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    std::optional<std::uint64_t> occ = (*basis)[c].occupied;
    for (long long k = 0; k < std::llabs(power) && occ; ++k)
      occ = power > 0 ? fock::shift_up(w, *occ) : fock::shift_down(w, *occ);
    if (!occ) continue;
    if (auto r = basis->index_of(*occ)) cols[c] = Slot({*r, CircleValue()});
  }
  return PhaseOp(std::move(basis), std::move(cols));
}

fock::Mask PhaseOp::domain() const {
  fock::Mask m(cols_.size());
  for (std::size_t c = 0; c < cols_.size(); ++c) m[c] = cols_[c].has_value();
  return m;
}

std::size_t PhaseOp::domain_size() const {
  std::size_t n = 0;
  for (const auto& s : cols_) n += s.has_value();
  return n;
}

PhaseOp PhaseOp::operator*(const PhaseOp& o) const {
  if (basis_ != o.basis_) throw std::invalid_argument("phase operators on different bases");
  std::vector<Slot> cols(cols_.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const Slot& inner = o.cols_[c];
    if (!inner) continue;
    const Slot& outer = cols_[inner->first];
    if (!outer) continue;
    cols[c] = Slot({outer->first, outer->second * inner->second});
  }
  return PhaseOp(basis_, std::move(cols));
}

PhaseOp PhaseOp::inverse() const {
  std::vector<Slot> cols(cols_.size());
  for (std::size_t c = 0; c < cols_.size(); ++c) {
    if (!cols_[c]) continue;
    const std::size_t r = cols_[c]->first;
    if (cols[r]) throw std::logic_error("phase operator is not injective");
    cols[r] = Slot({c, cols_[c]->second.inverse()});
  }
  return PhaseOp(basis_, std::move(cols));
}

std::optional<CircleValue> PhaseOp::scalar_value() const {
  std::optional<CircleValue> common;
  for (std::size_t c = 0; c < cols_.size(); ++c) {
    if (!cols_[c]) continue;
    if (cols_[c]->first != c) return std::nullopt;
    if (!common)
      common = cols_[c]->second;
    else if (!common->equals(cols_[c]->second))
      return std::nullopt;
  }
  return common;
}

bool PhaseOp::equals(const PhaseOp& o) const {
  if (basis_ != o.basis_) return false;
  for (std::size_t c = 0; c < cols_.size(); ++c) {
    const Slot &a = cols_[c], &b = o.cols_[c];
    if (a.has_value() != b.has_value()) return false;
    if (a && (a->first != b->first || !a->second.equals(b->second))) return false;
  }
  return true;
}

bool projectively_equal(const PhaseOp& a, const PhaseOp& b) {
  if (&a.basis() != &b.basis()) return false;
  std::optional<CircleValue> ratio;
  for (std::size_t c = 0; c < a.columns().size(); ++c) {
    const auto &x = a.columns()[c], &y = b.columns()[c];
    if (x.has_value() != y.has_value()) return false;
    if (!x) continue;
    if (x->first != y->first) return false;
    CircleValue r = x->second * y->second.inverse();
    if (!ratio)
      ratio = r;
    else if (!ratio->equals(r))
      return false;
  }
  return true;
}

// Cochain algebra -----------------------------------------------------------------

Cochain<Rational> coboundary(const Groupoid& g, const Cochain<Rational>& c) {
  return {c.degree + 1, "d(" + c.name + ")", [g, c](const ChainSample& s) {
            Rational sum = 0;
            for (int i = 0; i <= s.degree(); ++i) {
              Rational v = c(face(g, s, i));
              sum += (i % 2 ? -v : v);
            }
            return sum;
          }};
}

Cochain<CircleValue> coboundary(const Groupoid& g, const Cochain<CircleValue>& c) {
  return {c.degree + 1, "d(" + c.name + ")", [g, c](const ChainSample& s) {
            CircleValue prod;
            for (int i = 0; i <= s.degree(); ++i) {
              CircleValue v = c(face(g, s, i));
              prod = prod * (i % 2 ? v.inverse() : v);
            }
            return prod;
          }};
}

Cochain<PhaseOp> coboundary(const Groupoid& g, const Cochain<PhaseOp>& c) {
  if (c.degree != 1) throw std::invalid_argument("operator coboundary is implemented in degree 1 only");
  return {2, "d(" + c.name + ")", [g, c](const ChainSample& s) {
            PhaseOp first = c(face(g, s, 2));   // gamma_1
            PhaseOp second = c(face(g, s, 0));  // gamma_2
            PhaseOp composite = c(face(g, s, 1));
            return first * second * composite.inverse();
          }};
}

Cochain<Rational> cup_product(const Groupoid& g, const Cochain<Rational>& a, const Cochain<Rational>& b) {
  return {a.degree + b.degree, a.name + " cup " + b.name, [g, a, b](const ChainSample& s) {
            return a(front_face(g, s, a.degree)) * b(back_face(s, b.degree));
          }};
}

Cochain<Rational> constant_cochain(int degree, const Rational& v, std::string name) {
  return {degree, std::move(name), [v](const ChainSample&) { return v; }};
}

Cochain<CircleValue> constant_phase(int degree, const CircleValue& v, std::string name) {
  return {degree, std::move(name), [v](const ChainSample&) { return v; }};
}

Cochain<CircleValue> exp_turns(const Cochain<Rational>& c) {
  return {c.degree, "exp(" + c.name + ")", [c](const ChainSample& s) { return CircleValue::exact(c(s)); }};
}

Cochain<Rational> log_turns(const Cochain<CircleValue>& c) {
  return {c.degree, "log(" + c.name + ")", [c](const ChainSample& s) { return c(s).turns(); }};
}

Cochain<CircleValue> multiply(const Cochain<CircleValue>& a, const Cochain<CircleValue>& b) {
  if (a.degree != b.degree) throw std::invalid_argument("degree mismatch in product");
  return {a.degree, a.name + "*" + b.name, [a, b](const ChainSample& s) { return a(s) * b(s); }};
}

Check compare_phases(const std::string& name, const Cochain<CircleValue>& a, const Cochain<CircleValue>& b,
                     const std::vector<ChainSample>& samples, double tol) {
  Check ch{name, true, 0, "", true};
  for (const auto& s : samples) {
    CircleValue x = a(s), y = b(s);
    ch.exact = ch.exact && x.is_exact() && y.is_exact();
    ++ch.samples;
    if (!x.equals(y, tol)) {
      ch.passed = false;
      if (ch.witness.empty()) ch.witness = s.key() + ": " + x.str() + " vs " + y.str();
    }
  }
  return ch;
}

Check compare_values(const std::string& name, const Cochain<Rational>& a, const Cochain<Rational>& b,
                     const std::vector<ChainSample>& samples) {
  Check ch{name, true, 0, "", true};
  for (const auto& s : samples) {
    Rational x = a(s), y = b(s);
    ++ch.samples;
    if (x != y) {
      ch.passed = false;
      if (ch.witness.empty()) ch.witness = s.key() + ": " + to_string(x) + " vs " + to_string(y);
    }
  }
  return ch;
}

// Sampling ------------------------------------------------------------------------

Rational SampleStream::unit(int dim) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79};
  if (dim < 0 || dim >= static_cast<int>(std::size(primes))) throw std::out_of_range("sample dimension");
  const int base = primes[dim];
  Rational r = 0, scale(1, base);
  for (std::uint64_t i = index_; i > 0; i /= base) {
    r += scale * static_cast<long long>(i % base);
    scale /= base;
  }
  return r;
}

long long SampleStream::integer(int dim, long long lo, long long hi) {
  Rational u = unit(dim) * (hi - lo + 1);
  return lo + static_cast<long long>(floor_div(numerator(u), denominator(u)));
}

std::vector<ChainSample> sample_chains(const Groupoid& g, int degree, std::size_t count, std::uint64_t seed) {
  SampleStream stream(seed);
  std::vector<ChainSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i, stream.advance()) {
    ChainSample s = g.sample(stream, degree);
    validate_chain(g, s);
    out.push_back(std::move(s));
  }
  return out;
}

// Fixtures ------------------------------------------------------------------------

namespace {

const Rational kTube{1, 4};

bool lower_half(const Groupoid& g, int chart) { return chart < g.circle_split; }

bool in_t_plus(const Rational& angle) {
  const Rational t = frac(angle);
  return t < Rational(1, 2) + kArcHalfWidth || t > 1 - kArcHalfWidth;
}

bool in_t_minus(const Rational& angle) {
  const Rational t = frac(angle);
  return t > Rational(1, 2) - kArcHalfWidth || t < kArcHalfWidth;
}

}  // namespace

Groupoid s2_groupoid(bool equivariant) {
  Groupoid g;
  g.name = equivariant ? "circle-equivariant S2" : "S2";
  g.charts = 4;
  g.circle_split = 2;
  g.multiply = [equivariant](const GroupElement& a, const GroupElement& b) -> GroupElement {
    if (!equivariant) return {};
    return {frac(a.at(0) + b.at(0))};
  };
  g.act = [equivariant](const GroupElement& a, const Point& x) -> Point {
    if (!equivariant || a.empty()) return x;
    return {x.at(0), frac(x.at(1) + a.at(0)), x.at(2)};
  };
  g.contains = [](int chart, const Point& x) {
    const bool upper_circle = chart >= 2;
    const bool south = chart % 2 == 1;
    if (!(upper_circle ? in_t_minus(x.at(0)) : in_t_plus(x.at(0)))) return false;
    return south ? x.at(2) < kTube : x.at(2) > -kTube;
  };
  g.sample = [equivariant](SampleStream& st, int degree) {
    ChainSample s;
    bool lower = false, upper = false, north = false, south = false;
    for (int i = 0; i <= degree; ++i) {
      int c = static_cast<int>(st.integer(i, 0, 3));
      s.charts.push_back(c);
      (c >= 2 ? upper : lower) = true;
      (c % 2 ? south : north) = true;
    }
    for (int i = 0; i < degree; ++i)
      s.elems.push_back(equivariant ? GroupElement{st.unit(6 + i)} : GroupElement{});
    const Rational u = st.unit(10), v = st.unit(11), w = st.unit(12);
    Rational angle;
    if (lower && upper)
      angle = (st.integer(13, 0, 3) == 0 ? Rational(1, 2) : Rational(0)) + (u - Rational(1, 2)) / 5;
    else if (lower)
      angle = Rational(1, 4) + (u - Rational(1, 2)) * Rational(3, 5);
    else
      angle = Rational(3, 4) + (u - Rational(1, 2)) * Rational(3, 5);
    Rational r;
    if (north && south)
      r = (w - Rational(1, 2)) / 3;
    else if (north)
      r = Rational(-1, 5) + w * Rational(6, 5);
    else
      r = Rational(1, 5) - w * Rational(6, 5);
    s.base = {frac(angle), v, r};
    return s;
  };
  return g;
}

Groupoid t3_groupoid() {
  Groupoid g;
  g.name = "Z3 on R3";
  g.charts = 1;
  g.multiply = [](const GroupElement& a, const GroupElement& b) -> GroupElement {
    return {a.at(0) + b.at(0), a.at(1) + b.at(1), a.at(2) + b.at(2)};
  };
  g.act = [](const GroupElement& a, const Point& x) -> Point {
    return {x.at(0) + a.at(0), x.at(1) + a.at(1), x.at(2) + a.at(2)};
  };
  g.contains = [](int, const Point&) { return true; };
  g.sample = [](SampleStream& st, int degree) {
    ChainSample s;
    s.charts.assign(degree + 1, 0);
    int dim = 0;
    for (int i = 0; i < degree; ++i) {
      GroupElement a;
      for (int j = 0; j < 3; ++j) a.push_back(Rational(st.integer(dim++, -2, 2)));
      s.elems.push_back(a);
    }
    for (int j = 0; j < 3; ++j) s.base.push_back(st.unit(dim++));
    return s;
  };
  return g;
}

Cochain<CircleValue> s2_line_cocycle(long long n_plus, long long n_minus) {
  const Groupoid g = s2_groupoid(true);
  return {1, "h", [g, n_plus, n_minus](const ChainSample& s) {
            const bool tgt_south = s.charts[0] % 2 == 1, src_south = s.charts[1] % 2 == 1;
            const Rational phi = s.elems[0].empty() ? Rational(0) : s.elems[0][0];
            const Rational alpha = s.base.at(1);
            const long long d = n_plus - n_minus;
            Rational q;
            if (!tgt_south && !src_south)
              q = n_plus * phi;
            else if (tgt_south && src_south)
              q = n_minus * phi;
            else if (!tgt_south)
              q = n_plus * phi + d * alpha;
            else
              q = n_minus * phi - d * alpha;
            return CircleValue::exact(q);
          }};
}

WindingCertificate s2_winding(long long n_plus, long long n_minus, std::size_t grid) {
  if (grid < 2) throw std::invalid_argument("winding grid needs at least two points");
  auto h = s2_line_cocycle(n_plus, n_minus);
  auto value = [&](std::size_t i) {
    ChainSample s{{0, 1}, {GroupElement{Rational(0)}}, {Rational(0), Rational(static_cast<long long>(i % grid), static_cast<long long>(grid)), Rational(0)}};
    return h(s).turns();
  };
  Rational total = 0;
  for (std::size_t i = 0; i < grid; ++i) {
    Rational step = frac(value(i + 1) - value(i));
    if (step >= Rational(1, 2)) step -= 1;
    if (step == Rational(1, 2) || step == Rational(-1, 2) || abs(step) > Rational(1, 2))
      throw std::invalid_argument("winding grid too coarse: phase step reaches 1/2");
    total += step;
  }
  if (denominator(total) != 1) throw std::logic_error("winding sum not integral");
  return {static_cast<long long>(numerator(total)), grid};
}

FockGerbe build_fock_gerbe(const Groupoid& g, const Cochain<CircleValue>& h,
                           std::shared_ptr<const fock::FockBasis> basis,
                           const std::vector<ChainSample>& cocycle_samples) {
  if (g.circle_split <= 0) throw std::invalid_argument("Fock gerbe needs a circle-split cover");
  const auto dh = coboundary(g, h);
  for (const auto& s : cocycle_samples)
    if (!dh(s).is_one()) throw NotACocycle("line bundle cocycle condition fails at " + s.key());
  auto up = std::make_shared<PhaseOp>(PhaseOp::shift(basis, 1));
  auto down = std::make_shared<PhaseOp>(PhaseOp::shift(basis, -1));
  if (up->domain_size() == 0 || down->domain_size() == 0)
    throw std::invalid_argument("Fock window too small for the shift");
  Cochain<PhaseOp> lifted{1, "g^", [g, h, basis, up, down](const ChainSample& s) {
                            PhaseOp hn = PhaseOp::charge_phase(basis, h(s));
                            const bool tl = lower_half(g, s.charts[0]), sl = lower_half(g, s.charts[1]);
                            if (tl == sl || arc_tag(s.base.at(0)) != 1) return hn;
                            return tl ? hn * *up : *down * hn;
                          }};
  Cochain<PhaseOp> projective = lifted;
  projective.name = "g";
  return {lifted, projective};
}

Cochain<CircleValue> gerbe_class(const Groupoid& g, const Cochain<PhaseOp>& lifted) {
  auto d = coboundary(g, lifted);
  return {2, "f", [d](const ChainSample& s) {
            PhaseOp op = d(s);
            if (op.domain_size() == 0) throw NonScalar("empty safe domain at " + s.key());
            auto v = op.scalar_value();
            if (!v) throw NonScalar("coboundary of the lift is not scalar at " + s.key());
            return *v;
          }};
}

Cochain<CircleValue> gerbe_closed_form(const Groupoid& g, const Cochain<CircleValue>& h) {
  return {2, "f-closed", [g, h](const ChainSample& s) {
            if (arc_tag(s.base.at(0)) != 1) return CircleValue();
            const bool l0 = lower_half(g, s.charts[0]), l1 = lower_half(g, s.charts[1]),
                       l2 = lower_half(g, s.charts[2]);
            if (l0 && !l1 && !l2) return h(face(g, s, 0)).inverse();
            if (!l0 && l1 && !l2) return h(face(g, s, 1));
            if (!l0 && !l1 && l2) return h(face(g, s, 2)).inverse();
            return CircleValue();
          }};
}

CupDecomposition cup_decomposition(const Groupoid& g, const Cochain<CircleValue>& h) {
  Cochain<Rational> alpha{1, "alpha", [g](const ChainSample& s) {
                            if (arc_tag(s.base.at(0)) != 1) return Rational(0);
                            const bool l0 = lower_half(g, s.charts[0]), l1 = lower_half(g, s.charts[1]);
                            if (l0 && !l1) return Rational(1);
                            if (!l0 && l1) return Rational(-1);
                            return Rational(0);
                          }};
  Cochain<Rational> beta = coboundary(g, log_turns(h));
  beta.name = "beta";
  Cochain<CircleValue> s{1, "s", [g, h](const ChainSample& c) {
                           if (arc_tag(c.base.at(0)) == 1 && !lower_half(g, c.charts[0]) &&
                               lower_half(g, c.charts[1]))
                             return h(c);
                           return CircleValue();
                         }};
  Cochain<Rational> t{2, "t", [g, h](const ChainSample& c) {
                        if (arc_tag(c.base.at(0)) != 1) return Rational(0);
                        const bool l0 = lower_half(g, c.charts[0]), l1 = lower_half(g, c.charts[1]);
                        if (l0 == l1) return Rational(0);
                        const Rational q = h(face(g, c, 0)).turns();
                        return l0 ? -q : q;
                      }};
  return {alpha, beta, s, t};
}

CupCertificate verify_cup_decomposition(const Groupoid& g, const Cochain<CircleValue>& f,
                                        const Cochain<CircleValue>& h, const std::vector<ChainSample>& pairs,
                                        const std::vector<ChainSample>& triples) {
  CupCertificate out;
  bool exact = true;
  for (const auto& s : pairs) exact = exact && f(s).is_exact() && h(face(g, s, 0)).is_exact();
  auto dec = cup_decomposition(g, h);
  // exp(t) equals h(gamma_2)^{-/+1} whatever the branch, so this side also runs in float
  Cochain<CircleValue> exp_t{2, "exp(t)", [g, h](const ChainSample& c) {
                               if (arc_tag(c.base.at(0)) != 1) return CircleValue();
                               const bool l0 = lower_half(g, c.charts[0]), l1 = lower_half(g, c.charts[1]);
                               if (l0 == l1) return CircleValue();
                               CircleValue v = h(face(g, c, 0));
                               return l0 ? v.inverse() : v;
                             }};
  out.factorization = compare_phases("f = d(s) exp(t)", f, multiply(coboundary(g, dec.s), exp_t), pairs);
  out.factorization.exact = exact;
  if (exact) {
    out.cup_relation = compare_values("d(t) = alpha cup beta", coboundary(g, dec.t),
                                      cup_product(g, dec.alpha, dec.beta), triples);
  } else {
    out.cup_relation = {"d(t) = alpha cup beta", false, 0, "requires exact phases", false};
  }
  return out;
}

// Torus extension -----------------------------------------------------------------

T3Extension t3_extension(long long k, std::shared_ptr<const fock::FockBasis> basis) {
  T3Extension ext;
  ext.k = k;
  ext.omega_log = {2, "f'", [k](const ChainSample& s) { return k * s.elems[0][0] * s.elems[1][2] * s.base[1]; }};
  ext.omega = exp_turns(ext.omega_log);
  ext.omega.name = "omega";
  ext.lift = {1, "g^", [k, basis](const ChainSample& s) {
                const GroupElement& a = s.elems[0];
                const Rational& a0 = a[0];
                if (denominator(a0) != 1) throw std::invalid_argument("lattice element must be integral");
                const long long shift = static_cast<long long>(numerator(a0));
                PhaseOp op = PhaseOp::charge_phase(basis, CircleValue::exact(k * a[2] * s.base[1])) *
                             PhaseOp::shift(basis, shift);
                if (op.domain_size() == 0) throw std::invalid_argument("Fock window too small for S^" + std::to_string(shift));
                return op;
              }};
  for (int i = 0; i < 3; ++i)
    ext.generators.push_back({1, "a" + std::to_string(i), [i](const ChainSample& s) { return s.elems[0][i]; }});
  return ext;
}

T3Certificates verify_t3(const T3Extension& ext, const std::vector<ChainSample>& pairs,
                         const std::vector<ChainSample>& triples) {
  const Groupoid g = t3_groupoid();
  T3Certificates out;
  out.omega_cocycle = compare_phases("d(omega) = 1", coboundary(g, ext.omega), constant_phase(3, CircleValue()), triples);

  auto lifted = gerbe_class(g, ext.lift);
  out.lift_equals_omega = compare_phases("d(g^) = omega", lifted, ext.omega, pairs);
  Cochain<CircleValue> omega_inv{2, "omega^-1", [w = ext.omega](const ChainSample& s) { return w(s).inverse(); }};
  out.lift_equals_omega_inverse = compare_phases("d(g^) = omega^-1", lifted, omega_inv, pairs);

  // (a, x+b, m')(b, x, m) = (a+b, x, m m' omega); compare both bracketings with unit labels
  out.associativity = {"extension associativity", true, 0, "", true};
  for (const auto& s : triples) {
    const ChainSample g12 = face(g, s, 3), g23 = face(g, s, 0);
    const ChainSample left{{0, 0}, {g.multiply(s.elems[0], s.elems[1]), s.elems[2]}, s.base};
    const ChainSample right{{0, 0}, {s.elems[0], g.multiply(s.elems[1], s.elems[2])}, s.base};
    CircleValue lhs = ext.omega(g12) * ext.omega(left);
    CircleValue rhs = ext.omega(g23) * ext.omega(right);
    ++out.associativity.samples;
    if (!lhs.equals(rhs)) {
      out.associativity.passed = false;
      if (out.associativity.witness.empty()) out.associativity.witness = s.key();
    }
  }

  const auto& a = ext.generators;
  Cochain<Rational> generator{3, "a2b1c0", [](const ChainSample& s) {
                                return s.elems[0][2] * s.elems[1][1] * s.elems[2][0];
                              }};
  out.cup_generator = compare_values("a2 cup a1 cup a0 = a2 b1 c0", cup_product(g, cup_product(g, a[2], a[1]), a[0]),
                                     generator, triples);
  auto beta = cup_product(g, a[2], a[1]);
  const long long k = ext.k;
  Cochain<Rational> minus_cup{3, "-(alpha cup beta)", [g, a0 = a[0], beta, k](const ChainSample& s) {
                                return -k * cup_product(g, a0, beta)(s);
                              }};
  out.log_coboundary = compare_values("d(f') = -(alpha cup beta)", coboundary(g, ext.omega_log), minus_cup, triples);
  return out;
}

}  // namespace gerbeflow::cocycle
