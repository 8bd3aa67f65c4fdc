#pragma once

#include <Eigen/Dense>

#include <initializer_list>
#include <span>
#include <vector>

#include "secular/rational.hpp"

namespace secular {

using ExactVector = std::vector<Rational>;
/// Numeric flavor of a matrix ("tableau"): dense complex doubles.
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Dense matrix of exact rationals, row-major. Square matrices are the exact
/// flavor of a tableau; rectangular ones appear as kernel bases.
class ExactMatrix {
 public:
  ExactMatrix() = default;
  ExactMatrix(std::size_t rows, std::size_t cols);
  ExactMatrix(std::initializer_list<std::initializer_list<Rational>> rows);

  static ExactMatrix identity(std::size_t n);
  static ExactMatrix diagonal(std::span<const Rational> d);
  /// Matrix whose columns are the given vectors (all of equal length).
  static ExactMatrix from_columns(const std::vector<ExactVector>& cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  bool is_symmetric() const;
  bool is_zero() const;

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  ExactVector column(std::size_t j) const;
  ExactMatrix transpose() const;
  /// Removes the listed rows and columns (each list sorted or not).
  ExactMatrix without(std::span<const std::size_t> drop_rows, std::span<const std::size_t> drop_cols) const;
  /// Submatrix on the given row and column index sets.
  ExactMatrix select(std::span<const std::size_t> keep_rows, std::span<const std::size_t> keep_cols) const;

  ExactMatrix& operator+=(const ExactMatrix& o);
  ExactMatrix& operator-=(const ExactMatrix& o);
  ExactMatrix& operator*=(const Rational& c);
  friend ExactMatrix operator+(ExactMatrix a, const ExactMatrix& b) { return a += b; }
  friend ExactMatrix operator-(ExactMatrix a, const ExactMatrix& b) { return a -= b; }
  friend ExactMatrix operator*(ExactMatrix a, const Rational& c) { return a *= c; }
  friend ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b);
  friend ExactVector operator*(const ExactMatrix& a, const ExactVector& v);
  friend bool operator==(const ExactMatrix& a, const ExactMatrix& b);

  /// A - c*I.
  ExactMatrix shifted(const Rational& c) const;
  ExactMatrix power(unsigned k) const;
  Rational trace() const;

  ComplexMatrix to_complex() const;
  Eigen::MatrixXd to_double() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Rational> data_;
};

/// Determinant by fraction-free (Bareiss) elimination on the integer-scaled rows.
Rational determinant(const ExactMatrix& a);
std::size_t rank(const ExactMatrix& a);
/// Reduced row echelon form; `pivots` receives the pivot column of each nonzero row.
ExactMatrix rref(const ExactMatrix& a, std::vector<std::size_t>* pivots = nullptr);
/// Kernel basis read off the reduced echelon form: one vector per free
/// column, with a 1 in that column. Deterministic.
std::vector<ExactVector> nullspace(const ExactMatrix& a);
/// Throws DomainError if singular.
ExactMatrix inverse(const ExactMatrix& a);
/// Classical adjugate (transpose of the cofactor matrix).
ExactMatrix adjugate(const ExactMatrix& a);

Rational dot(const ExactVector& a, const ExactVector& b);
bool is_zero(const ExactVector& v);

}  // namespace secular
