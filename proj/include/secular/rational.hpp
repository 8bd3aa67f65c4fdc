#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace secular {

/// Exact rational number (GMP), always kept in canonical form.
using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "p/q", an integer, or a decimal literal such as "-2.5" or "1e-8".
/// Decimal literals are converted exactly ("0.1" is 1/10). Throws ParseError.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form; the denominator is always printed, even when 1.
std::string to_string(const Rational& q);

/// Exact value of a finite double.
Rational from_double(double x);

inline double to_double(const Rational& q) { return q.get_d(); }

inline int sign(const Rational& q) { return sgn(q); }

/// 2^-bits rounded representation of x, nearest dyadic with the given number
/// of fractional bits.
Rational round_dyadic(const Rational& x, unsigned bits);

}  // namespace secular
