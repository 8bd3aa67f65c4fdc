#pragma once

#include <json.hpp>

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "secular/exact_matrix.hpp"
#include "secular/ratpoly.hpp"

namespace secular::io {

/// Keys keep insertion order so that output is byte-for-byte reproducible.
using Json = nlohmann::ordered_json;

/// Parses a JSON document; ParseError carries the position on failure.
Json parse_json(std::string_view text, std::string_view what = "input");
Json read_json_file(const std::string& path);
std::string read_file(const std::string& path);

/// {"coeffs": ["p/q", ...]}, lowest degree first. Entries may also be JSON
/// integers or decimal strings.
Json to_json(const RationalPolynomial& p);
RationalPolynomial polynomial_from_json(const Json& j);
/// Either the JSON form or a comma-separated coefficient list.
RationalPolynomial parse_polynomial(std::string_view text);

enum class Flavor { exact, numeric };
std::string to_string(Flavor f);

/// {"n": n, "flavor": "exact"|"numeric", "rows": [[...]]}. Exact entries are
/// "p/q" strings (integers accepted on input); numeric entries are [re, im]
/// pairs (plain numbers accepted on input).
struct MatrixDocument {
  Flavor flavor = Flavor::exact;
  ExactMatrix exact;
  ComplexMatrix numeric;

  std::size_t dim() const;
  /// The numeric view, converting exact entries if needed.
  ComplexMatrix as_complex() const;
};

Json to_json(const ExactMatrix& m);
Json to_json(const ComplexMatrix& m);
MatrixDocument matrix_from_json(const Json& j);
MatrixDocument read_matrix_file(const std::string& path);

Json to_json(std::complex<double> z);  // [re, im]
Json to_json(const ComplexVector& v);  // [[re, im], ...]
Json to_json(const ExactVector& v);    // ["p/q", ...]

/// Comma-separated lists; surrounding brackets and whitespace are ignored.
std::vector<double> parse_doubles(std::string_view text);
ExactVector parse_rationals(std::string_view text);
double parse_double(std::string_view text);

/// Shortest representation that reads back to the same double.
std::string format_double(double x);

}  // namespace secular::io
