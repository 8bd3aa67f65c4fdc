#include <doctest.h>

#include <cmath>
#include <limits>

#include "secular/errors.hpp"
#include "secular/io.hpp"
#include "support.hpp"

using namespace secular;
using secular::testing::ipoly;
using secular::testing::rat;

TEST_SUITE("io") {

TEST_CASE("rational parsing") {
  CHECK(parse_rational("-6") == -6);
  CHECK(parse_rational("3/6") == rat(1, 2));
  CHECK(parse_rational("0.1") == rat(1, 10));
  CHECK(parse_rational("-2.5e-3") == rat(-1, 400));
  CHECK(to_string(rat(4, 2)) == "2/1");
  CHECK(to_string(rat(-1, 3)) == "-1/3");
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rational("abc"), ParseError);
  CHECK_THROWS_AS(parse_rational(""), ParseError);
  CHECK(from_double(0.1) != rat(1, 10));
  CHECK(to_double(from_double(0.1)) == 0.1);
}

TEST_CASE("polynomial JSON round trip") {
  const RationalPolynomial p{rat(-6), rat(11, 3), rat(0), rat(1)};
  const io::Json j = io::to_json(p);
  CHECK(j.dump() == R"({"coeffs":["-6/1","11/3","0/1","1/1"]})");
  CHECK(io::polynomial_from_json(j) == p);
  CHECK(io::parse_polynomial(j.dump()) == p);
  CHECK(io::parse_polynomial("-6, 11/3, 0, 1") == p);
  CHECK(io::parse_polynomial(R"({"coeffs": [-6, "11/3", 0, 1]})") == p);
  CHECK_THROWS_AS(io::parse_polynomial(R"({"coeffs": [1.5]})"), ParseError);
  CHECK_THROWS_AS(io::parse_polynomial(R"({"cofs": []})"), ParseError);
  CHECK_THROWS_AS(io::parse_polynomial("1,,2"), ParseError);
}

TEST_CASE("matrix JSON round trip, both flavors") {
  const ExactMatrix a{{1, rat(-1, 2)}, {rat(3, 7), 0}};
  const io::Json j = io::to_json(a);
  CHECK(j["n"] == 2);
  CHECK(j["flavor"] == "exact");
  const auto back = io::matrix_from_json(j);
  CHECK(back.flavor == io::Flavor::exact);
  CHECK(back.exact == a);

  ComplexMatrix c(2, 2);
  c << std::complex<double>(1, 2), 0.1, -3.5, std::complex<double>(0, -1e-17);
  const auto nb = io::matrix_from_json(io::parse_json(io::to_json(c).dump()));
  CHECK(nb.flavor == io::Flavor::numeric);
  CHECK(nb.numeric == c);
  CHECK(nb.dim() == 2);
}

TEST_CASE("matrix reader rejects malformed documents") {
  CHECK_THROWS_AS(io::parse_json("{\"rows\": [", "m"), ParseError);
  CHECK_THROWS_AS(io::matrix_from_json(io::parse_json(R"({"rows": [[1, 2], [3]]})")), ParseError);
  CHECK_THROWS_AS(io::matrix_from_json(io::parse_json(R"({"n": 3, "rows": [[1]]})")), ParseError);
  CHECK_THROWS_AS(io::matrix_from_json(io::parse_json(R"({"flavor": "fuzzy", "rows": [[1]]})")), ParseError);
  CHECK_THROWS_AS(io::matrix_from_json(io::parse_json(R"({"rows": [["x"]]})")), ParseError);
  CHECK_THROWS_AS(io::read_matrix_file(SECULAR_TEST_DATA_DIR "/bad.json"), ParseError);
  CHECK_THROWS_AS(io::read_matrix_file(SECULAR_TEST_DATA_DIR "/missing.json"), ParseError);
  const auto ok = io::read_matrix_file(SECULAR_TEST_DATA_DIR "/worked_example.json");
  CHECK(ok.exact == ExactMatrix{{1, -1, 0}, {-1, 2, 1}, {0, 1, 1}});
}

TEST_CASE("number lists and shortest round-trip formatting") {
  CHECK(io::parse_doubles("[1, -2.5, 3e-4]") == std::vector<double>{1, -2.5, 3e-4});
  CHECK_THROWS_AS(io::parse_doubles("1, x"), ParseError);
  CHECK_THROWS_AS(io::parse_double("nan"), ParseError);
  CHECK(io::parse_rationals("1/2, \"3\"") == ExactVector{rat(1, 2), rat(3)});
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::numeric_limits<double>::denorm_min()})
    CHECK(io::parse_double(io::format_double(x)) == x);
  CHECK(io::format_double(2.0) == "2");
}

}  // TEST_SUITE
