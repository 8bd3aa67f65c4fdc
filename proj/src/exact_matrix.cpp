#include "secular/exact_matrix.hpp"

#include <algorithm>

#include "secular/errors.hpp"

namespace secular {

ExactMatrix::ExactMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

ExactMatrix::ExactMatrix(std::initializer_list<std::initializer_list<Rational>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DomainError("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

ExactMatrix ExactMatrix::identity(std::size_t n) {
  ExactMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

ExactMatrix ExactMatrix::diagonal(std::span<const Rational> d) {
  ExactMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

ExactMatrix ExactMatrix::from_columns(const std::vector<ExactVector>& cols) {
  if (cols.empty()) return {};
  ExactMatrix m(cols.front().size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].size() != m.rows_) throw DomainError("columns of unequal length");
    for (std::size_t i = 0; i < m.rows_; ++i) m(i, j) = cols[j][i];
  }
  return m;
}

bool ExactMatrix::is_symmetric() const {
  if (!is_square()) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

bool ExactMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Rational& q) { return q == 0; });
}

ExactVector ExactMatrix::column(std::size_t j) const {
  ExactVector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

ExactMatrix ExactMatrix::transpose() const {
  ExactMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

ExactMatrix ExactMatrix::without(std::span<const std::size_t> drop_rows, std::span<const std::size_t> drop_cols) const {
  std::vector<std::size_t> keep_r, keep_c;
  for (std::size_t i = 0; i < rows_; ++i)
    if (std::find(drop_rows.begin(), drop_rows.end(), i) == drop_rows.end()) keep_r.push_back(i);
  for (std::size_t j = 0; j < cols_; ++j)
    if (std::find(drop_cols.begin(), drop_cols.end(), j) == drop_cols.end()) keep_c.push_back(j);
  return select(keep_r, keep_c);
}

ExactMatrix ExactMatrix::select(std::span<const std::size_t> keep_rows, std::span<const std::size_t> keep_cols) const {
  ExactMatrix m(keep_rows.size(), keep_cols.size());
  for (std::size_t i = 0; i < keep_rows.size(); ++i)
    for (std::size_t j = 0; j < keep_cols.size(); ++j) m(i, j) = (*this)(keep_rows[i], keep_cols[j]);
  return m;
}

ExactMatrix& ExactMatrix::operator+=(const ExactMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DomainError("matrix dimension mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

ExactMatrix& ExactMatrix::operator-=(const ExactMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DomainError("matrix dimension mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

ExactMatrix& ExactMatrix::operator*=(const Rational& c) {
  for (auto& x : data_) x *= c;
  return *this;
}

ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b) {
  if (a.cols_ != b.rows_) throw DomainError("matrix dimension mismatch");
  ExactMatrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Rational& aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

ExactVector operator*(const ExactMatrix& a, const ExactVector& v) {
  if (a.cols_ != v.size()) throw DomainError("matrix-vector dimension mismatch");
  ExactVector r(a.rows_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t j = 0; j < a.cols_; ++j) r[i] += a(i, j) * v[j];
  return r;
}

bool operator==(const ExactMatrix& a, const ExactMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

ExactMatrix ExactMatrix::shifted(const Rational& c) const {
  if (!is_square()) throw DomainError("shift of a non-square matrix");
  ExactMatrix m = *this;
  for (std::size_t i = 0; i < rows_; ++i) m(i, i) -= c;
  return m;
}

ExactMatrix ExactMatrix::power(unsigned k) const {
  if (!is_square()) throw DomainError("power of a non-square matrix");
  ExactMatrix r = identity(rows_);
  for (unsigned i = 0; i < k; ++i) r = r * (*this);
  return r;
}

Rational ExactMatrix::trace() const {
  Rational t = 0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

ComplexMatrix ExactMatrix::to_complex() const {
  ComplexMatrix m(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (*this)(i, j).get_d();
  return m;
}

Eigen::MatrixXd ExactMatrix::to_double() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (*this)(i, j).get_d();
  return m;
}

Rational determinant(const ExactMatrix& a) {
  if (!a.is_square()) throw DomainError("determinant of a non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  // Clear denominators row by row, then run Bareiss on integers.
  std::vector<Integer> m(n * n);
  Rational scale = 1;
  for (std::size_t i = 0; i < n; ++i) {
    Integer l = 1;
    for (std::size_t j = 0; j < n; ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a(i, j).get_den_mpz_t());
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] = a(i, j).get_num() * (l / a(i, j).get_den());
    scale *= Rational(l);
  }
  auto at = [&](std::size_t i, std::size_t j) -> Integer& { return m[i * n + j]; };
  int sgn_flip = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (at(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && at(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
      sgn_flip = -sgn_flip;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer v = at(i, j) * at(k, k) - at(i, k) * at(k, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        at(i, j) = v;
      }
      at(i, k) = 0;
    }
    prev = at(k, k);
  }
  Rational det(at(n - 1, n - 1) * sgn_flip);
  return det / scale;
}

ExactMatrix rref(const ExactMatrix& a, std::vector<std::size_t>* pivots) {
  ExactMatrix m = a;
  if (pivots) pivots->clear();
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t p = row;
    while (p < m.rows() && m(p, col) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != row)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
    const Rational inv = 1 / m(row, col);
    for (std::size_t j = col; j < m.cols(); ++j) m(row, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col) == 0) continue;
      const Rational f = m(i, col);
      for (std::size_t j = col; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
    }
    if (pivots) pivots->push_back(col);
    ++row;
  }
  return m;
}

std::size_t rank(const ExactMatrix& a) {
  std::vector<std::size_t> piv;
  rref(a, &piv);
  return piv.size();
}

std::vector<ExactVector> nullspace(const ExactMatrix& a) {
  std::vector<std::size_t> piv;
  ExactMatrix r = rref(a, &piv);
  std::vector<bool> is_pivot(a.cols(), false);
  for (auto c : piv) is_pivot[c] = true;
  std::vector<ExactVector> basis;
  for (std::size_t f = 0; f < a.cols(); ++f) {
    if (is_pivot[f]) continue;
    ExactVector v(a.cols());
    v[f] = 1;
    for (std::size_t k = 0; k < piv.size(); ++k) v[piv[k]] = -r(k, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

ExactMatrix inverse(const ExactMatrix& a) {
  if (!a.is_square()) throw DomainError("inverse of a non-square matrix");
  const std::size_t n = a.rows();
  ExactMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = 1;
  }
  std::vector<std::size_t> piv;
  ExactMatrix r = rref(aug, &piv);
  if (piv.size() < n || piv[n - 1] != n - 1) throw DomainError("matrix is singular");
  ExactMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = r(i, n + j);
  return inv;
}

ExactMatrix adjugate(const ExactMatrix& a) {
  if (!a.is_square()) throw DomainError("adjugate of a non-square matrix");
  const std::size_t n = a.rows();
  ExactMatrix adj(n, n);
  if (n == 1) {
    adj(0, 0) = 1;
    return adj;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t dr[] = {j};
      const std::size_t dc[] = {i};
      Rational c = determinant(a.without(dr, dc));
      adj(i, j) = ((i + j) % 2 == 0) ? c : Rational(-c);
    }
  return adj;
}

Rational dot(const ExactVector& a, const ExactVector& b) {
  if (a.size() != b.size()) throw DomainError("vector dimension mismatch");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool is_zero(const ExactVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& q) { return q == 0; });
}

}  // namespace secular
