#pragma once

#include <complex>
#include <vector>

#include "secular/exact_matrix.hpp"
#include "secular/ratpoly.hpp"

namespace secular {

/// The "equation in S" of a tableau, normalized to the monic det(S*I - A).
/// It differs from det(A - S*I) by the factor (-1)^n.
struct CharPoly {
  RationalPolynomial poly;
};

CharPoly char_poly(const ExactMatrix& a);
/// Numeric flavor: coefficients of det(S*I - A), lowest degree first, by the
/// Faddeev-LeVerrier recursion in complex double precision. Accuracy degrades
/// with the conditioning of A; intended for small, well-scaled matrices.
std::vector<std::complex<double>> char_poly(const ComplexMatrix& a);

/// Faddeev-LeVerrier recursion: the characteristic polynomial together with
/// the matrix coefficients of adj(S*I - A) = sum_k adjugate_coeffs[k] S^k.
struct ResolventExpansion {
  RationalPolynomial char_poly;
  std::vector<ExactMatrix> adjugate_coeffs;
};
ResolventExpansion resolvent_expansion(const ExactMatrix& a);

/// Nested principal minors: minors[k] = det(A_k - S*I) where A_k drops the
/// first k rows and columns; minors[n] is the constant 1.
struct MinorSequence {
  std::vector<RationalPolynomial> minors;
};
MinorSequence minor_sequence(const ExactMatrix& a);

/// Nonzero column of adj(A - lambda*I) for a simple eigenvalue of a symmetric
/// A. Throws DomainError when lambda is not an eigenvalue and
/// DefersToJordanError when every column vanishes (lambda is multiple).
ExactVector lagrange_eigenvector(const ExactMatrix& a, const Rational& lambda);

/// Real quadratic form x^T G x with symmetric exact gram matrix G.
class QuadraticForm {
 public:
  explicit QuadraticForm(ExactMatrix gram);
  const ExactMatrix& gram() const { return gram_; }
  std::size_t dim() const { return gram_.rows(); }

 private:
  ExactMatrix gram_;
};

/// T^T G T = diag(coefficients) with T invertible.
struct SquaresReduction {
  ExactVector coefficients;
  ExactMatrix transform;
};

/// Lagrange/Gauss completion of squares, with a diagonal swap or a
/// column combination when the pivot vanishes.
SquaresReduction reduce_to_squares(const QuadraticForm& q);

struct Inertia {
  int n_pos = 0;
  int n_neg = 0;
  int n_zero = 0;
  friend bool operator==(const Inertia&, const Inertia&) = default;
};

Inertia inertia(const QuadraticForm& q);

/// Root counts from the Hankel matrix of Newton power sums.
struct HermiteCount {
  int distinct = 0;
  int distinct_real = 0;
  std::vector<Rational> power_sums;  // s_0 .. s_{2d-2}
  ExactMatrix hankel;
};
HermiteCount hermite_root_count(const RationalPolynomial& p);

/// One probe point between consecutive roots of Delta_0 * Delta_1, with the
/// number of eigenvalues (with multiplicity) of A and of its trailing
/// principal submatrix lying at or below it.
struct InterlacingGap {
  Rational probe;
  int below_full = 0;
  int below_sub = 0;
  bool ok = false;
};

struct InterlacingReport {
  std::vector<RootInterval> full_roots;  // distinct roots of Delta_0
  std::vector<RootInterval> sub_roots;   // distinct roots of Delta_1
  std::vector<InterlacingGap> gaps;
  bool passed = false;
};

/// Certifies with exact Sturm counts that the eigenvalues of A_1 weakly
/// interlace those of A: N_A(x) - 1 <= N_{A_1}(x) <= N_A(x) for every x.
InterlacingReport interlacing_check(const ExactMatrix& a);

struct PowerIterationResult {
  double eigenvalue = 0.0;
  ComplexVector vector;
  int iterations = 0;
  double residual = 0.0;  // ||A v - lambda v||
  bool converged = false;
  bool restarted = false;
};

/// Power iteration on a Hermitian numeric matrix, starting from the all-ones
/// vector. If the start vector is annihilated, restarts once from the fixed
/// vector (1, -1/2, 1/3, ...). Converged when ||Av - lv|| <= tol * ||A||_F.
/// Exhausting max_iter returns the last iterate with converged == false.
PowerIterationResult power_iteration(const ComplexMatrix& a, double tol = 1e-12, int max_iter = 10000);

}  // namespace secular
