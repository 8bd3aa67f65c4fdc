#include "secular/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "secular/errors.hpp"

namespace secular::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '[' && text.back() == ']') text = trim(text.substr(1, text.size() - 2));
  std::vector<std::string_view> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = text.find(',', start);
    out.push_back(trim(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (auto f : out)
    if (f.empty()) throw ParseError("empty field in list '" + std::string(text) + "'");
  return out;
}

Rational rational_from_json(const Json& j, const std::string& where) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(Integer(j.dump()));
  throw ParseError(where + ": exact entries must be \"p/q\" strings or integers");
}

std::complex<double> complex_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ParseError(where + ": numeric entries must be [re, im] pairs or numbers");
}

}  // namespace

Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::string& path) { return parse_json(read_file(path), path); }

Json to_json(const RationalPolynomial& p) {
  Json coeffs = Json::array();
  for (const auto& c : p.coeffs()) coeffs.push_back(secular::to_string(c));
  return Json{{"coeffs", coeffs}};
}

RationalPolynomial polynomial_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("coeffs") || !j["coeffs"].is_array())
    throw ParseError("polynomial: expected an object with a \"coeffs\" array");
  std::vector<Rational> c;
  for (const auto& e : j["coeffs"]) c.push_back(rational_from_json(e, "polynomial"));
  return RationalPolynomial(std::move(c));
}

RationalPolynomial parse_polynomial(std::string_view text) {
  const std::string_view t = trim(text);
  if (!t.empty() && t.front() == '{') return polynomial_from_json(parse_json(t, "polynomial"));
  return RationalPolynomial(parse_rationals(t));
}

std::string to_string(Flavor f) { return f == Flavor::exact ? "exact" : "numeric"; }

std::size_t MatrixDocument::dim() const {
  return flavor == Flavor::exact ? exact.rows() : static_cast<std::size_t>(numeric.rows());
}

ComplexMatrix MatrixDocument::as_complex() const { return flavor == Flavor::exact ? exact.to_complex() : numeric; }

Json to_json(const ExactMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(secular::to_string(m(i, j)));
    rows.push_back(row);
  }
  return Json{{"n", m.rows()}, {"flavor", "exact"}, {"rows", rows}};
}

Json to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(row);
  }
  return Json{{"n", m.rows()}, {"flavor", "numeric"}, {"rows", rows}};
}

MatrixDocument matrix_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("matrix: expected a JSON object");
  if (!j.contains("rows") || !j["rows"].is_array()) throw ParseError("matrix: missing \"rows\" array");
  const Json& rows = j["rows"];
  const std::size_t n = rows.size();
  if (n == 0) throw ParseError("matrix: no rows");
  if (j.contains("n") && !(j["n"].is_number_unsigned() && j["n"].get<std::size_t>() == n))
    throw ParseError("matrix: \"n\" does not match the number of rows");
  MatrixDocument doc;
  const std::string flavor = j.value("flavor", std::string("exact"));
  if (flavor == "exact") doc.flavor = Flavor::exact;
  else if (flavor == "numeric") doc.flavor = Flavor::numeric;
  else throw ParseError("matrix: unknown flavor '" + flavor + "'");
  for (std::size_t i = 0; i < n; ++i)
    if (!rows[i].is_array() || rows[i].size() != n) throw ParseError("matrix: rows must form a square array");
  if (doc.flavor == Flavor::exact) {
    doc.exact = ExactMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) doc.exact(i, k) = rational_from_json(rows[i][k], "matrix");
  } else {
    const auto nn = static_cast<Eigen::Index>(n);
    doc.numeric = ComplexMatrix(nn, nn);
    for (Eigen::Index i = 0; i < nn; ++i)
      for (Eigen::Index k = 0; k < nn; ++k)
        doc.numeric(i, k) = complex_from_json(rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)], "matrix");
  }
  return doc;
}

MatrixDocument read_matrix_file(const std::string& path) {
  try {
    return matrix_from_json(read_json_file(path));
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw ParseError(path + ": " + msg);
  }
}

Json to_json(std::complex<double> z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const ComplexVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

Json to_json(const ExactVector& v) {
  Json out = Json::array();
  for (const auto& q : v) out.push_back(secular::to_string(q));
  return out;
}

double parse_double(std::string_view text) {
  const std::string_view t = trim(text);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(x))
    throw ParseError("malformed number '" + std::string(text) + "'");
  return x;
}

std::vector<double> parse_doubles(std::string_view text) {
  std::vector<double> out;
  for (auto f : split_list(text)) out.push_back(parse_double(f));
  return out;
}

ExactVector parse_rationals(std::string_view text) {
  ExactVector out;
  for (auto f : split_list(text)) {
    if (f.size() >= 2 && f.front() == '"' && f.back() == '"') f = f.substr(1, f.size() - 2);
    out.push_back(parse_rational(f));
  }
  return out;
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace secular::io
