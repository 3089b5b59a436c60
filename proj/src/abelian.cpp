#include "gerbeflow/abelian.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace gerbeflow::abelian {

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Integer(0)) {}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("ragged IntMatrix literal");
    for (long long v : r) data_.emplace_back(v);
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

std::vector<Integer> IntMatrix::column(std::size_t c) const {
  std::vector<Integer> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void IntMatrix::append_column(const std::vector<Integer>& col) {
  if (col.size() != rows_) throw std::invalid_argument("column length mismatch");
  IntMatrix next(rows_, cols_ + 1);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) next(r, c) = (*this)(r, c);
    next(r, cols_) = col[r];
  }
  *this = std::move(next);
}

IntMatrix IntMatrix::hcat(const IntMatrix& other) const {
  if (other.rows_ != rows_) throw std::invalid_argument("hcat row mismatch");
  IntMatrix out(rows_, cols_ + other.cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out(r, c) = (*this)(r, c);
    for (std::size_t c = 0; c < other.cols_; ++c) out(r, cols_ + c) = other(r, c);
  }
  return out;
}

bool IntMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Integer& v) { return v == 0; });
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("IntMatrix product shape mismatch");
  IntMatrix out(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Integer& aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

IntMatrix operator-(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("shape mismatch");
  IntMatrix out(a.rows_, a.cols_);
  for (std::size_t i = 0; i < a.data_.size(); ++i) out.data_[i] = a.data_[i] - b.data_[i];
  return out;
}

std::vector<Integer> operator*(const IntMatrix& m, const std::vector<Integer>& v) {
  if (m.cols() != v.size()) throw std::invalid_argument("matrix-vector shape mismatch");
  std::vector<Integer> out(m.rows(), Integer(0));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i] += m(i, j) * v[j];
  return out;
}

void IntMatrix::swap_rows(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
}

void IntMatrix::swap_cols(std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, a), (*this)(r, b));
}

void IntMatrix::add_row(std::size_t a, std::size_t b, const Integer& k) {
  if (k == 0) return;
  for (std::size_t c = 0; c < cols_; ++c) (*this)(a, c) += k * (*this)(b, c);
}

void IntMatrix::add_col(std::size_t a, std::size_t b, const Integer& k) {
  if (k == 0) return;
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, a) += k * (*this)(r, b);
}

void IntMatrix::negate_row(std::size_t r) {
  for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) = -(*this)(r, c);
}

std::string IntMatrix::str() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t r = 0; r < rows_; ++r) {
    os << (r ? ", [" : "[");
    for (std::size_t c = 0; c < cols_; ++c) os << (c ? ", " : "") << (*this)(r, c);
    os << "]";
  }
  os << "]";
  return os.str();
}

Integer determinant(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  IntMatrix a = m;
  Integer sign = 1;
  Integer prev = 1;
  // Bareiss elimination keeps every intermediate integral.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && a(p, k) == 0) ++p;
      if (p == n) return 0;
      a.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

namespace {

Integer abs_int(const Integer& v) { return v < 0 ? Integer(-v) : v; }

}  // namespace

SmithForm smith_normal_form(const IntMatrix& m) {
  const std::size_t R = m.rows();
  const std::size_t C = m.cols();
  SmithForm sf{IntMatrix::identity(R), m, IntMatrix::identity(C), 0};
  IntMatrix& a = sf.d;
  IntMatrix& u = sf.u;
  IntMatrix& v = sf.v;

  std::size_t t = 0;
  for (; t < std::min(R, C); ++t) {
    while (true) {
      // Smallest nonzero entry of the trailing block becomes the pivot.
      bool found = false;
      std::size_t pr = t, pc = t;
      Integer best;
      for (std::size_t i = t; i < R; ++i)
        for (std::size_t j = t; j < C; ++j)
          if (a(i, j) != 0 && (!found || abs_int(a(i, j)) < best)) {
            found = true;
            best = abs_int(a(i, j));
            pr = i;
            pc = j;
          }
      if (!found) break;
      a.swap_rows(t, pr);
      u.swap_rows(t, pr);
      a.swap_cols(t, pc);
      v.swap_cols(t, pc);

      bool clean = true;
      for (std::size_t i = t + 1; i < R; ++i) {
        if (a(i, t) == 0) continue;
        Integer q = a(i, t) / a(t, t);
        a.add_row(i, t, -q);
        u.add_row(i, t, -q);
        if (a(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < C; ++j) {
        if (a(t, j) == 0) continue;
        Integer q = a(t, j) / a(t, t);
        a.add_col(j, t, -q);
        v.add_col(j, t, -q);
        if (a(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      // Enforce the divisibility chain.
      bool divides = true;
      for (std::size_t i = t + 1; i < R && divides; ++i)
        for (std::size_t j = t + 1; j < C; ++j)
          if (a(i, j) % a(t, t) != 0) {
            a.add_row(t, i, 1);
            u.add_row(t, i, 1);
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (a(t, t) == 0) break;
    if (a(t, t) < 0) {
      a.negate_row(t);
      u.negate_row(t);
    }
  }
  sf.rank = 0;
  for (std::size_t i = 0; i < std::min(R, C); ++i)
    if (sf.d(i, i) != 0) ++sf.rank;
  return sf;
}

std::string InvariantFactors::str() const {
  std::vector<std::string> parts;
  if (free_rank == 1) parts.emplace_back("Z");
  if (free_rank > 1) parts.push_back("Z^" + std::to_string(free_rank));
  for (const auto& d : torsion) parts.push_back("Z_" + d.str());
  if (parts.empty()) return "0";
  std::string out = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) out += " + " + parts[i];
  return out;
}

FgAbelianGroup::FgAbelianGroup(std::size_t n_generators, IntMatrix relations,
                               std::vector<std::string> labels)
    : n_(n_generators), rel_(std::move(relations)), labels_(std::move(labels)) {
  if (rel_.rows() != n_) {
    if (rel_.rows() == 0 && rel_.cols() == 0)
      rel_ = IntMatrix(n_, 0);
    else
      throw std::invalid_argument("relation matrix must have one row per generator");
  }
  if (labels_.empty())
    for (std::size_t i = 0; i < n_; ++i) labels_.push_back("g" + std::to_string(i));
  if (labels_.size() != n_) throw std::invalid_argument("label count mismatch");
}

FgAbelianGroup FgAbelianGroup::free(std::size_t n, std::vector<std::string> labels) {
  return FgAbelianGroup(n, IntMatrix(n, 0), std::move(labels));
}

FgAbelianGroup FgAbelianGroup::with_relator(const std::vector<Integer>& col) const {
  IntMatrix r = rel_;
  r.append_column(col);
  return FgAbelianGroup(n_, std::move(r), labels_);
}

bool FgAbelianGroup::is_zero(const std::vector<Integer>& x) const {
  if (x.size() != n_) throw std::invalid_argument("element length mismatch");
  SmithForm sf = smith_normal_form(rel_);
  std::vector<Integer> y = sf.u * x;
  for (std::size_t i = 0; i < n_; ++i) {
    if (i < sf.rank) {
      if (y[i] % sf.d(i, i) != 0) return false;
    } else if (y[i] != 0) {
      return false;
    }
  }
  return true;
}

bool FgAbelianGroup::equal_elements(const std::vector<Integer>& x,
                                    const std::vector<Integer>& y) const {
  if (x.size() != y.size()) throw std::invalid_argument("element length mismatch");
  std::vector<Integer> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
  return is_zero(d);
}

InvariantFactors invariant_factors(const FgAbelianGroup& g) {
  SmithForm sf = smith_normal_form(g.relations());
  InvariantFactors f;
  f.free_rank = g.n_generators() - sf.rank;
  for (std::size_t i = 0; i < sf.rank; ++i)
    if (sf.d(i, i) > 1) f.torsion.push_back(sf.d(i, i));
  return f;
}

bool is_isomorphic(const FgAbelianGroup& a, const FgAbelianGroup& b) {
  return invariant_factors(a) == invariant_factors(b);
}

void GroupHom::validate() const {
  if (matrix.rows() != target.n_generators() || matrix.cols() != source.n_generators())
    throw InvalidHom("hom matrix shape does not match source/target generators");
  const IntMatrix& rel = source.relations();
  for (std::size_t c = 0; c < rel.cols(); ++c) {
    if (!target.is_zero(matrix * rel.column(c)))
      throw InvalidHom("hom does not respect source relator " + std::to_string(c));
  }
}

GroupHom identity_hom(const FgAbelianGroup& g) {
  return GroupHom{g, g, IntMatrix::identity(g.n_generators())};
}

GroupHom compose(const GroupHom& outer, const GroupHom& inner) {
  return GroupHom{inner.source, outer.target, outer.matrix * inner.matrix};
}

GroupHom subtract(const GroupHom& a, const GroupHom& b) {
  return GroupHom{a.source, a.target, a.matrix - b.matrix};
}

FgAbelianGroup hom_cokernel(const GroupHom& h) {
  h.validate();
  return FgAbelianGroup(h.target.n_generators(), h.target.relations().hcat(h.matrix),
                        h.target.labels());
}

IntMatrix integer_kernel(const IntMatrix& m) {
  SmithForm sf = smith_normal_form(m);
  const std::size_t c = m.cols();
  IntMatrix k(c, c - sf.rank);
  for (std::size_t j = sf.rank; j < c; ++j)
    for (std::size_t i = 0; i < c; ++i) k(i, j - sf.rank) = sf.v(i, j);
  return k;
}

namespace {

std::string combination_label(const std::vector<Integer>& coeffs,
                              const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] == 0) continue;
    std::string term = coeffs[i] == 1    ? names[i]
                       : coeffs[i] == -1 ? "-" + names[i]
                                         : coeffs[i].str() + "*" + names[i];
    if (!out.empty() && term[0] != '-') out += "+";
    out += term;
  }
  return out.empty() ? "0" : out;
}

}  // namespace

FgAbelianGroup hom_kernel(const GroupHom& h) {
  h.validate();
  const std::size_t m = h.source.n_generators();
  // Lift to free covers: x maps to zero iff M x + R_B y = 0 for some y.
  IntMatrix aug = h.matrix.hcat(h.target.relations());
  IntMatrix k = integer_kernel(aug);
  IntMatrix p(m, k.cols());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k.cols(); ++j) p(i, j) = k(i, j);

  // Basis of the preimage lattice from one auxiliary Smith form.
  SmithForm sf = smith_normal_form(p);
  const std::size_t s = sf.rank;
  IntMatrix pv = p * sf.v;
  IntMatrix basis(m, s);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < s; ++j) basis(i, j) = pv(i, j);

  const IntMatrix& ra = h.source.relations();
  IntMatrix rel(s, ra.cols());
  for (std::size_t c = 0; c < ra.cols(); ++c) {
    std::vector<Integer> y = sf.u * ra.column(c);
    for (std::size_t i = 0; i < s; ++i) {
      if (y[i] % sf.d(i, i) != 0) throw std::logic_error("source relator outside kernel lattice");
      rel(i, c) = y[i] / sf.d(i, i);
    }
  }
  // Sign-normalize so that each basis vector has a positive leading coefficient.
  for (std::size_t j = 0; j < s; ++j) {
    std::size_t lead = 0;
    while (lead < m && basis(lead, j) == 0) ++lead;
    if (lead < m && basis(lead, j) < 0) {
      for (std::size_t i = 0; i < m; ++i) basis(i, j) = -basis(i, j);
      for (std::size_t c = 0; c < rel.cols(); ++c) rel(j, c) = -rel(j, c);
    }
  }
  std::vector<std::string> labels;
  for (std::size_t j = 0; j < s; ++j)
    labels.push_back(combination_label(basis.column(j), h.source.labels()));
  return FgAbelianGroup(s, std::move(rel), std::move(labels));
}

bool is_automorphism(const GroupHom& h) {
  return invariant_factors(hom_kernel(h)).trivial() &&
         invariant_factors(hom_cokernel(h)).trivial();
}

}  // namespace gerbeflow::abelian
