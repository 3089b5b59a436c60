#pragma once

// Dense Hermitian eigensolver: complex Householder reduction to a real symmetric
// tridiagonal matrix, then implicit-shift QL.

#include "gerbeflow/sparse.hpp"

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace gerbeflow::eigen {

using Complex = std::complex<double>;

// Row-major dense complex matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from_sparse(const ComplexSparse& m);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  DenseMatrix adjoint() const;
  DenseMatrix operator*(const DenseMatrix& o) const;
  DenseMatrix operator-(const DenseMatrix& o) const;
  double max_abs() const;
  double one_norm() const;  // max column sum

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

class NotHermitian : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NoConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EigenSystem {
  std::vector<double> values;  // ascending
  DenseMatrix vectors;         // column k belongs to values[k]
  double residual = 0;         // max_k |H v_k - lambda_k v_k|
  double norm = 0;             // one-norm of H
};

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kResidualTolerance = 1e-9;  // relative to the one-norm
inline constexpr int kMaxSweeps = 60;               // QL iterations per eigenvalue

// Throws NotHermitian, or NoConvergence if a QL sweep stalls or the residual bound fails.
EigenSystem eigensolve(const DenseMatrix& h, bool vectors = true);
EigenSystem eigensolve(const ComplexSparse& h, bool vectors = true);

// Real symmetric tridiagonal QL: diag d, subdiagonal e (e[i] couples i and i+1,
// size n-1). If z is non-null it must hold n*n entries (row-major) and receives the
// rotations accumulated onto its initial contents. Eigenvalues return unsorted in d.
void tridiagonal_ql(std::vector<double>& d, std::vector<double> e, std::vector<double>* z);

}  // namespace gerbeflow::eigen
