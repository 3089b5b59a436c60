#pragma once

// Column-major sparse matrices over exact Gaussian rationals or complex doubles.

#include "gerbeflow/numbers.hpp"

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <type_traits>
#include <string>
#include <utility>
#include <vector>

namespace gerbeflow {

struct GaussRational {
  Rational re{0};
  Rational im{0};

  GaussRational() = default;
  GaussRational(long long r) : re(r) {}  // NOLINT(google-explicit-constructor)
  GaussRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return re == 0 && im == 0; }
  GaussRational conj() const { return {re, -im}; }
  std::complex<double> to_complex() const { return {to_double(re), to_double(im)}; }

  friend GaussRational operator+(const GaussRational& a, const GaussRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussRational operator-(const GaussRational& a, const GaussRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussRational operator-(const GaussRational& a) { return {-a.re, -a.im}; }
  friend GaussRational operator*(const GaussRational& a, const GaussRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  GaussRational& operator+=(const GaussRational& b) {
    re += b.re;
    im += b.im;
    return *this;
  }
  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re == b.re && a.im == b.im;
  }
};

inline bool is_zero_value(const GaussRational& v) { return v.is_zero(); }
inline bool is_zero_value(const std::complex<double>& v) { return v == std::complex<double>(0.0, 0.0); }
inline GaussRational conj_value(const GaussRational& v) { return v.conj(); }
inline std::complex<double> conj_value(const std::complex<double>& v) { return std::conj(v); }
inline std::complex<double> to_complex(const GaussRational& v) { return v.to_complex(); }
inline std::complex<double> to_complex(const std::complex<double>& v) { return v; }

// Labels and Z/2 grading of a basis, shared between operators on the same space.
struct Manifest {
  std::vector<std::string> labels;
  std::vector<std::uint8_t> grading;
};

template <class T>
class SparseMatrix {
 public:
  using Entry = std::pair<std::size_t, T>;
  using Column = std::vector<Entry>;

  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(cols) {}

  static SparseMatrix identity(std::size_t n) {
    SparseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.data_[i].emplace_back(i, T(1));
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const Column& column(std::size_t c) const { return data_.at(c); }

  std::size_t nnz() const {
    std::size_t n = 0;
    for (const auto& c : data_) n += c.size();
    return n;
  }

  // Accumulates v into (r, c); exact cancellations are removed.
  void add(std::size_t r, std::size_t c, const T& v) {
    if (r >= rows_ || c >= cols_) throw std::out_of_range("sparse entry outside matrix");
    if (is_zero_value(v)) return;
    Column& col = data_[c];
    auto it = std::lower_bound(col.begin(), col.end(), r,
                               [](const Entry& e, std::size_t row) { return e.first < row; });
    if (it != col.end() && it->first == r) {
      it->second += v;
      if (is_zero_value(it->second)) col.erase(it);
    } else {
      col.insert(it, Entry(r, v));
    }
  }

  T get(std::size_t r, std::size_t c) const {
    const Column& col = data_.at(c);
    auto it = std::lower_bound(col.begin(), col.end(), r,
                               [](const Entry& e, std::size_t row) { return e.first < row; });
    if (it != col.end() && it->first == r) return it->second;
    return T(0);
  }

  std::shared_ptr<const Manifest> manifest() const { return manifest_; }
  void set_manifest(std::shared_ptr<const Manifest> m) {
    if (m && (m->labels.size() != rows_ || rows_ != cols_))
      throw std::invalid_argument("manifest size does not match square operator");
    manifest_ = std::move(m);
  }

  SparseMatrix adjoint() const {
    SparseMatrix out(cols_, rows_);
    for (std::size_t c = 0; c < cols_; ++c)
      for (const auto& [r, v] : data_[c]) out.data_[r].emplace_back(c, conj_value(v));
    out.manifest_ = manifest_;
    return out;  // columns filled in increasing c, so already sorted
  }

  std::vector<std::pair<std::size_t, T>> apply_column(std::size_t c) const { return data_.at(c); }

  // Sparse vector image: (index, value) pairs sorted by index.
  std::vector<Entry> apply(const std::vector<Entry>& x) const {
    SparseMatrix acc(rows_, 1);
    for (const auto& [k, xv] : x)
      for (const auto& [r, v] : data_.at(k)) acc.add(r, 0, v * xv);
    return acc.data_[0];
  }

  friend SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("sparse product shape mismatch");
    SparseMatrix out(a.rows_, b.cols_);
    for (std::size_t c = 0; c < b.cols_; ++c) out.data_[c] = a.apply(b.data_[c]);
    out.manifest_ = a.manifest_ ? a.manifest_ : b.manifest_;
    return out;
  }

  friend SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b) {
    return combine(a, b, T(1));
  }
  friend SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b) {
    return combine(a, b, T(-1));
  }

  SparseMatrix scaled(const T& k) const {
    SparseMatrix out(rows_, cols_);
    for (std::size_t c = 0; c < cols_; ++c)
      for (const auto& [r, v] : data_[c]) out.add(r, c, v * k);
    out.manifest_ = manifest_;
    return out;
  }

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  bool is_zero() const { return nnz() == 0; }

  // Restriction to the listed columns (other columns dropped to zero).
  SparseMatrix masked_columns(const std::vector<bool>& keep) const {
    SparseMatrix out(rows_, cols_);
    for (std::size_t c = 0; c < cols_; ++c)
      if (keep.at(c)) out.data_[c] = data_[c];
    out.manifest_ = manifest_;
    return out;
  }

  template <class U, class F>
  SparseMatrix<U> map(F f) const {
    SparseMatrix<U> out(rows_, cols_);
    for (std::size_t c = 0; c < cols_; ++c)
      for (const auto& [r, v] : data_[c]) out.add(r, c, f(v));
    out.set_manifest(manifest_);
    return out;
  }

 private:
  static SparseMatrix combine(const SparseMatrix& a, const SparseMatrix& b, const T& kb) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("sparse shape mismatch");
    SparseMatrix out = a;
    for (std::size_t c = 0; c < b.cols_; ++c)
      for (const auto& [r, v] : b.data_[c]) out.add(r, c, v * kb);
    return out;
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Column> data_;
  std::shared_ptr<const Manifest> manifest_;
};

using SparseOperator = SparseMatrix<GaussRational>;
using ComplexSparse = SparseMatrix<std::complex<double>>;

inline ComplexSparse to_complex(const SparseOperator& op) {
  return op.map<std::complex<double>>([](const GaussRational& v) { return v.to_complex(); });
}

// Textual dump: one "row col re im" line per stored entry, then the basis manifest.
template <class T>
void dump(const SparseMatrix<T>& op, std::ostream& os) {
  os << "# dim " << op.rows() << " " << op.cols() << "\n";
  for (std::size_t c = 0; c < op.cols(); ++c)
    for (const auto& [r, v] : op.column(c)) {
      if constexpr (std::is_same_v<T, GaussRational>)
        os << r << " " << c << " " << to_string(v.re) << " " << to_string(v.im) << "\n";
      else
        os << r << " " << c << " " << v.real() << " " << v.imag() << "\n";
    }
  if (auto m = op.manifest()) {
    os << "# basis\n";
    for (std::size_t i = 0; i < m->labels.size(); ++i)
      os << i << " " << m->labels[i] << " " << int(m->grading[i]) << "\n";
  }
}

}  // namespace gerbeflow
