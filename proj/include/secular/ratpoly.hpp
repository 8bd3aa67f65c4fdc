#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "secular/rational.hpp"

namespace secular {

/// Univariate polynomial with exact rational coefficients, lowest degree
/// first. Trailing zero coefficients are trimmed on construction, so the
/// leading coefficient of a nonzero polynomial is never zero.
class RationalPolynomial {
 public:
  RationalPolynomial() = default;
  explicit RationalPolynomial(std::vector<Rational> coeffs);
  RationalPolynomial(std::initializer_list<Rational> coeffs);

  static RationalPolynomial constant(const Rational& c);
  static RationalPolynomial monomial(const Rational& c, std::size_t degree);
  /// The linear factor (x - root).
  static RationalPolynomial linear_factor(const Rational& root);
  /// Monic product of (x - r) over the given roots.
  static RationalPolynomial from_roots(std::span<const Rational> roots);

  bool is_zero() const { return coeffs_.empty(); }
  /// Degree, or -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }
  /// Coefficient of x^i (zero beyond the degree).
  Rational coeff(std::size_t i) const;
  const Rational& leading() const;

  Rational operator()(const Rational& x) const;
  double evaluate(double x) const;
  std::complex<double> evaluate(std::complex<double> z) const;

  RationalPolynomial derivative() const;
  RationalPolynomial monic() const;
  /// p(-x).
  RationalPolynomial reflected() const;

  RationalPolynomial operator-() const;
  RationalPolynomial& operator+=(const RationalPolynomial& o);
  RationalPolynomial& operator-=(const RationalPolynomial& o);
  RationalPolynomial& operator*=(const RationalPolynomial& o);
  RationalPolynomial& operator*=(const Rational& c);

  friend RationalPolynomial operator+(RationalPolynomial a, const RationalPolynomial& b) { return a += b; }
  friend RationalPolynomial operator-(RationalPolynomial a, const RationalPolynomial& b) { return a -= b; }
  friend RationalPolynomial operator*(RationalPolynomial a, const RationalPolynomial& b) { return a *= b; }
  friend RationalPolynomial operator*(RationalPolynomial a, const Rational& c) { return a *= c; }
  friend RationalPolynomial operator*(const Rational& c, RationalPolynomial a) { return a *= c; }
  friend bool operator==(const RationalPolynomial& a, const RationalPolynomial& b) { return a.coeffs_ == b.coeffs_; }

  /// Human-readable form in the variable `var`, highest degree first.
  std::string to_string(const std::string& var = "x") const;

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

struct PolynomialDivision {
  RationalPolynomial quotient;
  RationalPolynomial remainder;
};

/// Euclidean division a = q*b + r with deg r < deg b. Throws DomainError if b is zero.
PolynomialDivision divmod(const RationalPolynomial& a, const RationalPolynomial& b);
/// Monic greatest common divisor (zero only if both inputs are zero).
RationalPolynomial gcd(const RationalPolynomial& a, const RationalPolynomial& b);
RationalPolynomial pow(const RationalPolynomial& p, unsigned k);
/// Exact quotient; throws InternalError if b does not divide a.
RationalPolynomial exact_quotient(const RationalPolynomial& a, const RationalPolynomial& b);
/// Scales p to a primitive integer polynomial with positive leading coefficient.
std::vector<Integer> primitive_integer_coeffs(const RationalPolynomial& p);

/// p / gcd(p, p'): same distinct roots, all simple, same leading coefficient.
RationalPolynomial square_free_part(const RationalPolynomial& p);

/// Yun's square-free factorization p = c * prod f_k^k with each f_k monic,
/// square-free and pairwise coprime. Only factors of positive degree are
/// returned, ordered by multiplicity k.
struct SquareFreeFactor {
  RationalPolynomial factor;
  int multiplicity;
};
std::vector<SquareFreeFactor> square_free_decomposition(const RationalPolynomial& p);

/// Order of `root` as a zero of p (0 if not a root). p must be nonzero.
int root_multiplicity(const RationalPolynomial& p, const Rational& root);

/// A point of the extended real line.
class Endpoint {
 public:
  enum class Kind { minus_infinity, finite, plus_infinity };

  Endpoint(const Rational& value) : kind_(Kind::finite), value_(value) {}  // NOLINT(implicit)
  static Endpoint minus_infinity() { return Endpoint(Kind::minus_infinity); }
  static Endpoint plus_infinity() { return Endpoint(Kind::plus_infinity); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::finite; }
  const Rational& value() const { return value_; }

  friend bool operator<(const Endpoint& a, const Endpoint& b);

 private:
  explicit Endpoint(Kind k) : kind_(k) {}
  Kind kind_;
  Rational value_;
};

/// Sturm remainder sequence of the square-free part of a polynomial.
struct SturmChain {
  std::vector<RationalPolynomial> polys;

  /// Sign variations of the chain at x, zeros dropped.
  int variations(const Endpoint& x) const;
};

SturmChain sturm_chain(const RationalPolynomial& p);

/// Number of distinct real roots of p in (lo, hi]. Endpoints that are roots
/// are moved by half a root-separation bound so that the half-open semantics
/// is kept: a root at lo stays excluded, a root at hi stays included.
int count_real_roots(const RationalPolynomial& p, const Endpoint& lo = Endpoint::minus_infinity(),
                     const Endpoint& hi = Endpoint::plus_infinity());

/// Descartes' rule of signs and the Budan-Fourier bound.
struct VariationBounds {
  /// Sign variations in the coefficient sequence: an upper bound on the
  /// number of positive roots, counted with multiplicity, of the same parity.
  int descartes_positive = 0;
  RationalPolynomial poly;

  /// V(lo) - V(hi) over the derivative sequence p, p', ..., p^(d): an upper
  /// bound on the roots in (lo, hi] counted with multiplicity, of the same
  /// parity. Requires lo < hi.
  int budan_fourier(const Rational& lo, const Rational& hi) const;
};

VariationBounds variation_bounds(const RationalPolynomial& p);

/// Half-open interval (lo, hi] holding exactly `contains_count` distinct roots.
struct RootInterval {
  Rational lo;
  Rational hi;
  int contains_count = 1;
};

/// 1 + max|a_i| / |a_n|: every root has modulus strictly below it.
Rational cauchy_bound(const RationalPolynomial& p);
/// Rational lower bound on the distance between distinct complex roots of p.
Rational root_separation_bound(const RationalPolynomial& p);

/// Disjoint isolating intervals for all distinct real roots, ordered by lo.
/// Every root lies strictly inside its interval.
std::vector<RootInterval> isolate_real_roots(const RationalPolynomial& p);
/// Isolating intervals restricted to roots in (lo, hi].
std::vector<RootInterval> isolate_real_roots(const RationalPolynomial& p, const Rational& lo, const Rational& hi);

/// Approximates the single root in `iv` to within `tol` using Newton steps
/// that must stay inside the shrinking bracket, with bisection fallback.
/// Throws DomainError if `iv` does not isolate exactly one root.
Rational refine_root(const RationalPolynomial& p, const RootInterval& iv, const Rational& tol);

/// All distinct rational roots of p in increasing order.
std::vector<Rational> rational_roots(const RationalPolynomial& p);

}  // namespace secular
