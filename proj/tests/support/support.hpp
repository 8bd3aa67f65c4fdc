#pragma once

// Generators with planted answers and independent oracles shared by the unit
// and acceptance tests. Nothing here calls into the algorithms under test
// except for exact arithmetic primitives (Rational, ExactMatrix products,
// inverse) that the planted constructions need.

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

#include "secular/exact_matrix.hpp"
#include "secular/ratpoly.hpp"

namespace secular::testing {

using Rng = std::mt19937_64;

/// Canonical p/q.
inline Rational rat(long p, long q = 1) {
  Rational r{Integer(p), Integer(q)};
  r.canonicalize();
  return r;
}

/// Polynomial from integer coefficients, lowest degree first.
inline RationalPolynomial ipoly(std::initializer_list<long> c) {
  std::vector<Rational> v;
  for (long x : c) v.push_back(rat(x));
  return RationalPolynomial(std::move(v));
}

int uniform_int(Rng& rng, int lo, int hi);
double uniform_real(Rng& rng, double lo, double hi);
/// p/q with |p| <= num_range and 1 <= q <= den_max.
Rational random_rational(Rng& rng, int num_range, int den_max);

/// A polynomial assembled from known factors, so that its root counts are
/// known without solving anything.
struct PlantedPolynomial {
  RationalPolynomial poly;
  int distinct_real = 0;
  int distinct = 0;  // over the complex numbers
  std::vector<std::pair<Rational, int>> rational_roots;  // (root, multiplicity)
  std::vector<std::pair<int, int>> surds;                // x^2 - d: (d, multiplicity)
};

/// Real roots of the planted factors in (lo, hi], distinct or with multiplicity.
int planted_count(const PlantedPolynomial& p, const Rational& lo, const Rational& hi, bool with_multiplicity);

/// Degree between 1 and max_degree. Factors: (x - r)^k with small rational r,
/// x^2 - d with d a non-square integer, and x^2 + b x + c with b^2 < 4c.
/// A random nonzero constant multiplies the product.
PlantedPolynomial planted_polynomial(Rng& rng, int max_degree = 8);

ExactMatrix random_integer_matrix(Rng& rng, std::size_t n, int range);
ExactMatrix random_symmetric(Rng& rng, std::size_t n, int range);
/// Random integer matrix with nonzero determinant.
ExactMatrix random_invertible(Rng& rng, std::size_t n, int range);

/// Rational orthogonal matrix from the Cayley transform (I - S)(I + S)^-1 of
/// a random integer skew-symmetric S.
ExactMatrix rational_orthogonal(Rng& rng, std::size_t n);

struct PlantedSpectrum {
  ExactMatrix a;
  std::vector<Rational> eigenvalues;  // with multiplicity
};

/// Q D Q^T with Q rational orthogonal. With `repeated`, at least one
/// eigenvalue of D occurs twice or more.
PlantedSpectrum planted_symmetric(Rng& rng, std::size_t n, bool repeated);

struct PlantedJordan {
  ExactMatrix a;
  ExactMatrix jordan;  // block diagonal, 1s on the superdiagonal
  /// (eigenvalue, block size) in the order the blocks were laid down.
  std::vector<std::pair<Rational, int>> blocks;
};

/// P J P^-1 with J a random Jordan matrix (rational eigenvalues) and P a
/// random invertible integer matrix.
PlantedJordan planted_jordan(Rng& rng, std::size_t n);

/// det(S I - A) by cofactor expansion along the first row.
RationalPolynomial cofactor_char_poly(const ExactMatrix& a);

/// Classical fourth-order Runge-Kutta with a fixed step count.
Eigen::VectorXd rk4(const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& f,
                    const Eigen::VectorXd& x0, double t0, double t1, int steps);

/// e^A by Taylor series with scaling and squaring.
Eigen::MatrixXcd expm_taylor(const Eigen::MatrixXcd& a);

/// Composite trapezoid rule with n panels.
double trapezoid(const std::function<double(double)>& f, double a, double b, int n);

/// Relative difference ||a - b|| / ||b||, with b the reference.
double rel_diff(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);
double rel_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

}  // namespace secular::testing
