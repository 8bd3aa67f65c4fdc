#include "secular/rational.hpp"

#include <cctype>
#include <cmath>

#include "secular/errors.hpp"

namespace secular {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

Integer parse_integer(std::string_view s, std::string_view whole) {
  std::string_view digits = s;
  bool negative = false;
  if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) {
    negative = digits.front() == '-';
    digits.remove_prefix(1);
  }
  if (!all_digits(digits)) {
    throw ParseError("malformed rational '" + std::string(whole) + "'");
  }
  Integer z(std::string(digits), 10);
  return negative ? Integer(-z) : z;
}

Integer pow10(unsigned long e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw ParseError("empty rational literal");

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(s.substr(0, slash), text);
    Integer den = parse_integer(s.substr(slash + 1), text);
    if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }

  // Decimal with optional fraction and exponent.
  long exponent = 0;
  std::string_view mantissa = s;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    Integer ez = parse_integer(s.substr(e + 1), text);
    if (!ez.fits_slong_p() || abs(ez) > 4096) throw ParseError("exponent out of range in '" + std::string(text) + "'");
    exponent = ez.get_si();
    mantissa = s.substr(0, e);
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa.front() == '-' || mantissa.front() == '+')) {
    negative = mantissa.front() == '-';
    mantissa.remove_prefix(1);
  }
  std::string digits;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    std::string_view ip = mantissa.substr(0, dot);
    std::string_view fp = mantissa.substr(dot + 1);
    if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)) || (ip.empty() && fp.empty())) {
      throw ParseError("malformed rational '" + std::string(text) + "'");
    }
    digits = std::string(ip) + std::string(fp);
    exponent -= static_cast<long>(fp.size());
  } else {
    if (!all_digits(mantissa)) throw ParseError("malformed rational '" + std::string(text) + "'");
    digits = std::string(mantissa);
  }
  Integer z(digits, 10);
  if (negative) z = -z;
  Rational q;
  if (exponent >= 0) {
    q = Rational(z * pow10(static_cast<unsigned long>(exponent)));
  } else {
    q = Rational(z, pow10(static_cast<unsigned long>(-exponent)));
    q.canonicalize();
  }
  return q;
}

std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational from_double(double x) {
  if (!std::isfinite(x)) throw DomainError("non-finite value cannot be made exact");
  return Rational(x);
}

Rational round_dyadic(const Rational& x, unsigned bits) {
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 2, bits);
  Rational scaled = x * scale;
  // floor(scaled + 1/2)
  Rational shifted = scaled + Rational(1, 2);
  Integer fl;
  mpz_fdiv_q(fl.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
  Rational r(fl, scale);
  r.canonicalize();
  return r;
}

}  // namespace secular
