#pragma once

// Finitely generated abelian groups over exact integers.

#include "gerbeflow/numbers.hpp"

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace gerbeflow::abelian {

class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols);
  IntMatrix(std::initializer_list<std::initializer_list<long long>> rows);

  static IntMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Integer& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Integer& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<Integer> column(std::size_t c) const;
  void append_column(const std::vector<Integer>& col);
  IntMatrix hcat(const IntMatrix& other) const;

  bool is_zero() const;
  bool operator==(const IntMatrix& o) const = default;

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
  friend IntMatrix operator-(const IntMatrix& a, const IntMatrix& b);

  void swap_rows(std::size_t a, std::size_t b);
  void swap_cols(std::size_t a, std::size_t b);
  // row a += k * row b
  void add_row(std::size_t a, std::size_t b, const Integer& k);
  // col a += k * col b
  void add_col(std::size_t a, std::size_t b, const Integer& k);
  void negate_row(std::size_t r);

  std::string str() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

std::vector<Integer> operator*(const IntMatrix& m, const std::vector<Integer>& v);

Integer determinant(const IntMatrix& m);  // square only, fraction-free elimination

struct SmithForm {
  IntMatrix u;  // rows x rows, unimodular
  IntMatrix d;  // rows x cols, diagonal, d_1 | d_2 | ..., all >= 0
  IntMatrix v;  // cols x cols, unimodular
  std::size_t rank = 0;
};

// u * m * v == d
SmithForm smith_normal_form(const IntMatrix& m);

struct InvariantFactors {
  std::size_t free_rank = 0;
  std::vector<Integer> torsion;  // each >= 2, d_1 | d_2 | ...

  bool trivial() const { return free_rank == 0 && torsion.empty(); }
  bool free() const { return torsion.empty(); }
  bool operator==(const InvariantFactors&) const = default;
  // "Z^2 + Z_4", "0" for the trivial group
  std::string str() const;
};

class FgAbelianGroup {
 public:
  FgAbelianGroup() = default;
  // relations: n_generators x r, columns are relators
  FgAbelianGroup(std::size_t n_generators, IntMatrix relations,
                 std::vector<std::string> labels = {});

  static FgAbelianGroup free(std::size_t n, std::vector<std::string> labels = {});

  std::size_t n_generators() const { return n_; }
  const IntMatrix& relations() const { return rel_; }
  const std::vector<std::string>& labels() const { return labels_; }

  FgAbelianGroup with_relator(const std::vector<Integer>& col) const;

  // True iff x lies in the relation lattice, i.e. represents 0.
  bool is_zero(const std::vector<Integer>& x) const;
  bool equal_elements(const std::vector<Integer>& x, const std::vector<Integer>& y) const;

 private:
  std::size_t n_ = 0;
  IntMatrix rel_;
  std::vector<std::string> labels_;
};

InvariantFactors invariant_factors(const FgAbelianGroup& g);
bool is_isomorphic(const FgAbelianGroup& a, const FgAbelianGroup& b);

class InvalidHom : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GroupHom {
  FgAbelianGroup source;
  FgAbelianGroup target;
  IntMatrix matrix;  // target.n x source.n

  // Throws InvalidHom unless matrix maps source relators into target relations.
  void validate() const;
};

GroupHom identity_hom(const FgAbelianGroup& g);
GroupHom compose(const GroupHom& outer, const GroupHom& inner);
GroupHom subtract(const GroupHom& a, const GroupHom& b);

FgAbelianGroup hom_cokernel(const GroupHom& h);
// Presented on a basis of the preimage lattice {x : h(x) = 0 in target}; labels
// give each generator as a combination of source generators.
FgAbelianGroup hom_kernel(const GroupHom& h);

bool is_automorphism(const GroupHom& h);

// Integer kernel of m (columns of the returned matrix form a basis).
IntMatrix integer_kernel(const IntMatrix& m);

}  // namespace gerbeflow::abelian
