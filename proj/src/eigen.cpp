#include "gerbeflow/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace gerbeflow::eigen {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_sparse(const ComplexSparse& s) {
  DenseMatrix m(s.rows(), s.cols());
  for (std::size_t c = 0; c < s.cols(); ++c)
    for (const auto& [r, v] : s.column(c)) m(r, c) = v;
  return m;
}

DenseMatrix DenseMatrix::adjoint() const {
  DenseMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("dense product shape mismatch");
  DenseMatrix out(rows_, o.cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Complex a = (*this)(r, k);
      if (a == 0.0) continue;
      for (std::size_t c = 0; c < o.cols_; ++c) out(r, c) += a * o(k, c);
    }
  return out;
}

DenseMatrix DenseMatrix::operator-(const DenseMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("dense shape mismatch");
  DenseMatrix out = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= o.data_[i];
  return out;
}

double DenseMatrix::max_abs() const {
  double m = 0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

double DenseMatrix::one_norm() const {
  double m = 0;
  for (std::size_t c = 0; c < cols_; ++c) {
    double s = 0;
    for (std::size_t r = 0; r < rows_; ++r) s += std::abs((*this)(r, c));
    m = std::max(m, s);
  }
  return m;
}

void tridiagonal_ql(std::vector<double>& d, std::vector<double> e, std::vector<double>* z) {
  const std::size_t n = d.size();
  if (n == 0) return;
  e.resize(n, 0.0);
  e[n - 1] = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  double f = 0, tst1 = 0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n - 1 && std::abs(e[m]) > eps * tst1) ++m;
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > kMaxSweeps) throw NoConvergence("QL iteration did not converge");
        // Wilkinson-style shift from the leading 2x2 block
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1, c2 = 1, c3 = 1, s = 0, s2 = 0;
        const double el1 = e[l + 1];
        for (std::size_t i = m; i-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          if (z) {
            auto& zz = *z;
            for (std::size_t k = 0; k < n; ++k) {
              const double t = zz[k * n + i + 1];
              zz[k * n + i + 1] = s * zz[k * n + i] + c * t;
              zz[k * n + i] = c * zz[k * n + i] - s * t;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0;
  }
}

EigenSystem eigensolve(const DenseMatrix& h, bool vectors) {
  const std::size_t n = h.rows();
  if (h.cols() != n) throw NotHermitian("eigensolve: matrix is not square");
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = r; c < n; ++c)
      if (std::abs(h(r, c) - std::conj(h(c, r))) > kHermitianTolerance)
        throw NotHermitian("eigensolve: entry (" + std::to_string(r) + "," + std::to_string(c) +
                           ") breaks Hermitian symmetry");

  EigenSystem out;
  out.norm = h.one_norm();
  if (n == 0) return out;

  // Householder: a <- H a H with H = 1 - 2uu*, accumulating q <- q H.
  DenseMatrix a = h;
  DenseMatrix q = DenseMatrix::identity(n);
  std::vector<Complex> u(n), p(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double tail = 0;
    for (std::size_t i = k + 2; i < n; ++i) tail += std::norm(a(i, k));
    if (tail == 0) continue;
    const Complex x0 = a(k + 1, k);
    const double xnorm = std::sqrt(tail + std::norm(x0));
    const Complex phase = std::abs(x0) > 0 ? x0 / std::abs(x0) : Complex(1.0);
    std::fill(u.begin(), u.end(), Complex(0.0));
    u[k + 1] = x0 + phase * xnorm;
    for (std::size_t i = k + 2; i < n; ++i) u[i] = a(i, k);
    double unorm = 0;
    for (std::size_t i = k + 1; i < n; ++i) unorm += std::norm(u[i]);
    unorm = std::sqrt(unorm);
    for (std::size_t i = k + 1; i < n; ++i) u[i] /= unorm;

    Complex gamma = 0;
    for (std::size_t i = 0; i < n; ++i) {
      Complex s = 0;
      for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * u[j];
      p[i] = s;
      gamma += std::conj(u[i]) * s;
    }
    for (std::size_t i = 0; i < n; ++i) p[i] -= gamma.real() * u[i];  // w = p - gamma u
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        a(i, j) -= 2.0 * (u[i] * std::conj(p[j]) + p[i] * std::conj(u[j]));
    for (std::size_t i = 0; i < n; ++i) {
      Complex s = 0;
      for (std::size_t j = k + 1; j < n; ++j) s += q(i, j) * u[j];
      for (std::size_t j = k + 1; j < n; ++j) q(i, j) -= 2.0 * s * std::conj(u[j]);
    }
  }

  // Diagonal phases make the subdiagonal real and nonnegative.
  std::vector<double> d(n), e(n > 1 ? n - 1 : 0);
  std::vector<Complex> ph(n, Complex(1.0));
  for (std::size_t k = 0; k < n; ++k) d[k] = a(k, k).real();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Complex t = a(k + 1, k);
    e[k] = std::abs(t);
    ph[k + 1] = e[k] > 0 ? ph[k] * (t / e[k]) : ph[k];
  }

  std::vector<double> z;
  if (vectors) {
    z.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;
  }
  tridiagonal_ql(d, e, vectors ? &z : nullptr);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
  out.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.values[j] = d[order[j]];
  if (!vectors) return out;

  out.vectors = DenseMatrix(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex qk = q(r, k) * ph[k];
      if (qk == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out.vectors(r, j) += qk * z[k * n + order[j]];
    }

  for (std::size_t j = 0; j < n; ++j) {
    double res = 0;
    for (std::size_t r = 0; r < n; ++r) {
      Complex s = -out.values[j] * out.vectors(r, j);
      for (std::size_t c = 0; c < n; ++c) s += h(r, c) * out.vectors(c, j);
      res += std::norm(s);
    }
    out.residual = std::max(out.residual, std::sqrt(res));
  }
  if (out.residual > kResidualTolerance * std::max(out.norm, 1e-300) && out.residual > 1e-300)
    throw NoConvergence("eigensolve: residual " + std::to_string(out.residual) + " exceeds bound");
  return out;
}

EigenSystem eigensolve(const ComplexSparse& h, bool vectors) {
  return eigensolve(DenseMatrix::from_sparse(h), vectors);
}

}  // namespace gerbeflow::eigen
