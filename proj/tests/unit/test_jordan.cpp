#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "secular/errors.hpp"
#include "secular/jordan.hpp"
#include "secular/matrixcore.hpp"
#include "support.hpp"

using namespace secular;
using secular::testing::rat;

namespace {

ExactMatrix jordan_block3(const Rational& a) { return {{a, 1, 0}, {0, a, 1}, {0, 0, a}}; }

std::vector<std::pair<Rational, int>> sorted_blocks(std::vector<std::pair<Rational, int>> b) {
  std::sort(b.begin(), b.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first < y.first : x.second > y.second;
  });
  return b;
}

}  // namespace

TEST_SUITE("jordan") {

TEST_CASE("multiplicity examples") {
  const auto nil = multiplicity(jordan_block3(rat(0)), rat(0));
  CHECK(nil.algebraic == 3);
  CHECK(nil.geometric == 1);
  CHECK(nil.block_sizes == std::vector<int>{3});
  CHECK(nil.minor_vanishing_depth == 1);

  const auto worked = multiplicity(ExactMatrix{{1, -1, 0}, {-1, 2, 1}, {0, 1, 1}}, rat(0));
  CHECK(worked.algebraic == 1);
  CHECK(worked.geometric == 1);
  CHECK(worked.block_sizes == std::vector<int>{1});

  const auto d = multiplicity(ExactMatrix{{2, 0, 0}, {0, 2, 0}, {0, 0, 5}}, rat(2));
  CHECK(d.algebraic == 2);
  CHECK(d.geometric == 2);
  CHECK(d.block_sizes == std::vector<int>{1, 1});
  CHECK(d.minor_vanishing_depth == 2);
  CHECK_THROWS_AS(multiplicity(jordan_block3(rat(0)), rat(1)), DomainError);
}

TEST_CASE("exact jordan_form examples") {
  const ExactMatrix a{{5, 1}, {-1, 3}};
  const auto jf = jordan_form(a);
  CHECK(jf.jordan == ExactMatrix{{4, 1}, {0, 4}});
  CHECK(a * jf.transform == jf.transform * jf.jordan);
  CHECK(determinant(jf.transform) != 0);

  const ExactMatrix d{{1, 0, 0}, {0, 2, 0}, {0, 0, 3}};
  const auto jd = jordan_form(d);
  CHECK(jd.jordan == d);
  CHECK(d * jd.transform == jd.transform * jd.jordan);

  const auto two = jordan_form(ExactMatrix{{2, 0}, {0, 2}});
  REQUIRE(two.blocks.size() == 1);
  CHECK(two.blocks[0].sizes == std::vector<int>{1, 1});

  CHECK_THROWS_AS(jordan_form(ExactMatrix{{0, 2}, {1, 0}}), UnsupportedError);
}

TEST_CASE("numeric jordan_form") {
  const auto jf = jordan_form(ExactMatrix{{5, 1}, {-1, 3}}.to_complex());
  REQUIRE(jf.blocks.size() == 1);
  CHECK(std::abs(jf.blocks[0].eigenvalue - 4.0) < 1e-6);
  CHECK(jf.blocks[0].sizes == std::vector<int>{2});
  CHECK(jf.residual < 1e-8);
  CHECK_FALSE(jf.ill_conditioned);

  // Rotation: a conjugate pair, ordered by imaginary part.
  const auto rot = jordan_form(ExactMatrix{{0, -1}, {1, 0}}.to_complex());
  REQUIRE(rot.blocks.size() == 2);
  CHECK(std::abs(rot.blocks[0].eigenvalue - std::complex<double>(0, -1)) < 1e-12);
  CHECK(std::abs(rot.blocks[1].eigenvalue - std::complex<double>(0, 1)) < 1e-12);

  // Two eigenvalues closer than ten clustering radii.
  ComplexMatrix near = ComplexMatrix::Zero(2, 2);
  near(0, 0) = 1.0;
  near(1, 1) = 1.0 + 5e-8;
  const auto nj = jordan_form(near);
  CHECK(nj.ill_conditioned);
  CHECK_FALSE(nj.warnings.empty());
}

TEST_CASE("classify_3x3 covers the five types") {
  CHECK(classify_3x3(ExactMatrix{{1, 0, 0}, {0, 2, 0}, {0, 0, 3}}).tag == 'A');
  CHECK(classify_3x3(ExactMatrix{{4, 1, 0}, {0, 4, 0}, {0, 0, 7}}).tag == 'B');
  CHECK(classify_3x3(ExactMatrix{{1, 0, 0}, {0, 2, 0}, {0, 0, 2}}).tag == 'C');
  CHECK(classify_3x3(jordan_block3(rat(3, 2))).tag == 'D');
  CHECK(classify_3x3(ExactMatrix{{2, 1, 0}, {0, 2, 0}, {0, 0, 2}}).tag == 'E');
  const auto scalar = classify_3x3(ExactMatrix::identity(3) * rat(5));
  CHECK(scalar.tag == 'C');
  CHECK(scalar.scalar);
  CHECK(classify_3x3(jordan_block3(rat(2)).to_complex()).tag == 'D');
  CHECK(classify_3x3(ExactMatrix{{0, -1, 0}, {1, 0, 0}, {0, 0, 3}}.to_complex()).tag == 'A');
  CHECK_THROWS_AS(classify_3x3(ExactMatrix::identity(2)), DomainError);
}

TEST_CASE("diagonalizability") {
  CHECK(symmetric_diagonalizability_check(ExactMatrix::identity(3) * rat(3)).diagonalizable);
  const auto two = symmetric_diagonalizability_check(ExactMatrix{{2, 1}, {1, 2}});
  CHECK(two.diagonalizable);
  CHECK(two.factors.size() == 1);  // (S - 1)(S - 3), one square-free factor
  CHECK_FALSE(diagonalizability(jordan_block3(rat(0))).diagonalizable);
  // Irrational eigenvalues: decided from the factor without leaving the rationals.
  const auto rot = diagonalizability(ExactMatrix{{0, -1}, {1, 0}});
  CHECK(rot.diagonalizable);
  CHECK_THROWS_AS(symmetric_diagonalizability_check(ExactMatrix{{1, 2}, {0, 1}}), DomainError);

  secular::testing::Rng rng(21);
  const auto planted = secular::testing::planted_symmetric(rng, 4, true);
  const auto rep = symmetric_diagonalizability_check(planted.a);
  CHECK(rep.diagonalizable);
  bool saw_repeat = false;
  for (const auto& f : rep.factors) saw_repeat = saw_repeat || f.multiplicity >= 2;
  CHECK(saw_repeat);
}

TEST_CASE("evaluate_at") {
  const ExactMatrix a{{1, 2}, {3, 4}};
  CHECK(evaluate_at(char_poly(a).poly, a).is_zero());  // Cayley-Hamilton
  CHECK(evaluate_at(secular::testing::ipoly({1, 1}), a) == a + ExactMatrix::identity(2));
}

TEST_CASE("property: planted Jordan structure is recovered and reconstructs A") {
  secular::testing::Rng rng(22);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = static_cast<std::size_t>(secular::testing::uniform_int(rng, 1, 5));
    const auto planted = secular::testing::planted_jordan(rng, n);
    const auto jf = jordan_form(planted.a);
    CHECK(planted.a * jf.transform == jf.transform * jf.jordan);
    CHECK(jf.transform * jf.jordan * inverse(jf.transform) == planted.a);
    std::vector<std::pair<Rational, int>> got;
    for (const auto& b : jf.blocks)
      for (int s : b.sizes) got.emplace_back(b.eigenvalue, s);
    CHECK(got == sorted_blocks(planted.blocks));

    for (const auto& b : jf.blocks) {
      const auto rep = multiplicity(planted.a, b.eigenvalue);
      CHECK(rep.minor_vanishing_depth == rep.geometric);
      CHECK(static_cast<int>(rep.block_sizes.size()) == rep.geometric);
      // Rank law: blocks of size >= k = r_{k-1} - r_k.
      const ExactMatrix shifted = planted.a.shifted(b.eigenvalue);
      for (int k = 1; k <= rep.algebraic; ++k) {
        const auto at_least =
            std::count_if(rep.block_sizes.begin(), rep.block_sizes.end(), [k](int s) { return s >= k; });
        const auto r0 = rank(shifted.power(static_cast<unsigned>(k - 1)));
        const auto r1 = rank(shifted.power(static_cast<unsigned>(k)));
        CHECK(static_cast<std::size_t>(at_least) == r0 - r1);
      }
      // Darboux: every minor of order n - k vanishes iff geometric > k.
      for (int k = 0; k < static_cast<int>(n); ++k)
        CHECK(all_minors_vanish(shifted, n - static_cast<std::size_t>(k)) == (rep.geometric > k));
    }
  }
}

TEST_CASE("property: rank-deficient matrices have S^p dividing the char poly") {
  secular::testing::Rng rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = static_cast<std::size_t>(secular::testing::uniform_int(rng, 2, 5));
    const std::size_t p = static_cast<std::size_t>(secular::testing::uniform_int(rng, 1, static_cast<int>(n) - 1));
    ExactMatrix b(n, n - p), c(n - p, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n - p; ++j) {
        b(i, j) = secular::testing::uniform_int(rng, -3, 3);
        c(j, i) = secular::testing::uniform_int(rng, -3, 3);
      }
    const ExactMatrix a = b * c;
    const std::size_t r = rank(a);
    CHECK(all_minors_vanish(a, r + 1));
    const RationalPolynomial cp = char_poly(a).poly;
    for (std::size_t k = 0; k < n - r; ++k) CHECK(cp.coeff(k) == 0);
  }
}

TEST_CASE("property: classify_3x3 is similarity invariant") {
  secular::testing::Rng rng(24);
  for (int trial = 0; trial < 40; ++trial) {
    const auto planted = secular::testing::planted_jordan(rng, 3);
    const ExactMatrix m = secular::testing::random_invertible(rng, 3, 2);
    const auto t0 = classify_3x3(planted.jordan);
    const auto t1 = classify_3x3(inverse(m) * planted.a * m);
    CHECK(t0.tag == t1.tag);
    CHECK(t0.scalar == t1.scalar);
  }
}

}  // TEST_SUITE
