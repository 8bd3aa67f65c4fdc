#include <doctest.h>

#include <cmath>

#include "secular/errors.hpp"
#include "secular/linode.hpp"
#include "secular/matrixcore.hpp"
#include "support.hpp"

using namespace secular;
using secular::testing::rat;

namespace {

ComplexVector cvec(std::initializer_list<double> v) {
  ComplexVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Eigen::VectorXd rk4_linear(const ExactMatrix& a, const ExactVector& x0, double t) {
  const Eigen::MatrixXd m = a.to_double();
  Eigen::VectorXd v(static_cast<Eigen::Index>(x0.size()));
  for (std::size_t i = 0; i < x0.size(); ++i) v(static_cast<Eigen::Index>(i)) = to_double(x0[i]);
  return secular::testing::rk4([&](double, const Eigen::VectorXd& x) { Eigen::VectorXd d = m * x; return d; }, v, 0.0,
                               t, 2000);
}

}  // namespace

TEST_SUITE("linode") {

TEST_CASE("solve_constant examples") {
  SUBCASE("nilpotent: x(t) = (t, 1)") {
    const auto sol = solve_constant(ExactMatrix{{0, 1}, {0, 0}}, {rat(0), rat(1)});
    CHECK(sol.has_secular_terms());
    CHECK(sol.max_degree() == 1);
    for (double t : {0.0, 0.5, 2.0}) CHECK(secular::testing::rel_diff(sol.evaluate(t), cvec({t, 1})) < 1e-14);
  }
  SUBCASE("diagonal decay") {
    const auto sol = solve_constant(ExactMatrix{{-1, 0}, {0, -2}}, {rat(1), rat(1)});
    CHECK_FALSE(sol.has_secular_terms());
    CHECK(sol.terms.size() == 2);
    CHECK(secular::testing::rel_diff(sol.evaluate(1.0), cvec({std::exp(-1.0), std::exp(-2.0)})) < 1e-14);
  }
  SUBCASE("2-block at 4") {
    const auto sol = solve_constant(ExactMatrix{{5, 1}, {-1, 3}}, {rat(1), rat(0)});
    REQUIRE(sol.terms.size() == 1);
    CHECK(std::abs(sol.terms[0].lambda - 4.0) < 1e-14);
    CHECK(sol.terms[0].degree() == 1);
    // x(t) = e^{4t} (1 + t, -t)
    const double t = 0.3;
    CHECK(secular::testing::rel_diff(sol.evaluate(t), cvec({std::exp(4 * t) * (1 + t), -std::exp(4 * t) * t})) <
          1e-14);
  }
  SUBCASE("initial condition not exciting the block") {
    // Eigenvector of the 2-block: no secular term.
    const auto sol = solve_constant(ExactMatrix{{5, 1}, {-1, 3}}, {rat(1), rat(-1)});
    CHECK_FALSE(sol.has_secular_terms());
  }
  CHECK_THROWS_AS(solve_constant(ExactMatrix{{1, 0}, {0, 1}}, {rat(1)}), DomainError);
}

TEST_CASE("solve_residue examples") {
  const ExactMatrix d{{-1, 0}, {0, -2}};
  const ExactVector x0{rat(1), rat(1)};
  const auto a = solve_constant(d, x0);
  const auto b = solve_residue(d, x0);
  REQUIRE(a.terms.size() == b.terms.size());
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    CHECK(a.terms[i].lambda == b.terms[i].lambda);
    CHECK(a.terms[i].degree() == b.terms[i].degree());
  }
  const auto block = solve_residue(ExactMatrix{{5, 1}, {-1, 3}}, {rat(1), rat(0)});
  REQUIRE(block.terms.size() == 1);
  CHECK(block.terms[0].degree() == 1);
  const auto worked = solve_residue(ExactMatrix{{1, -1, 0}, {-1, 2, 1}, {0, 1, 1}}, {rat(1), rat(0), rat(0)});
  CHECK_FALSE(worked.has_secular_terms());
  CHECK(worked.terms.size() == 3);
}

TEST_CASE("triple agreement on irrational and complex spectra") {
  for (const ExactMatrix& a : {ExactMatrix{{0, 2}, {1, 0}}, ExactMatrix{{0, -1}, {1, 0}},
                               ExactMatrix{{1, 2, 0}, {-2, 1, 1}, {0, 1, -1}}}) {
    ExactVector x0(a.rows(), rat(1));
    x0[0] = rat(-1, 2);
    const auto j = solve_constant(a, x0).evaluate(1.0);
    const auto r = solve_residue(a, x0).evaluate(1.0);
    const Eigen::VectorXcd o = rk4_linear(a, x0, 1.0).cast<std::complex<double>>();
    CHECK(secular::testing::rel_diff(j, o) < 1e-10);
    CHECK(secular::testing::rel_diff(r, o) < 1e-10);
  }
}

TEST_CASE("propagator matches the Taylor exponential") {
  const ExactMatrix a{{1, 2, 0}, {0, 1, 0}, {3, -1, 2}};
  const ComplexMatrix e = propagator(a, 0.7);
  CHECK(secular::testing::rel_diff(e, secular::testing::expm_taylor(a.to_complex() * 0.7)) < 1e-12);
}

TEST_CASE("classify_stability examples") {
  const auto osc = classify_stability(ExactMatrix{{-2, 1}, {1, -2}}, SystemForm::second_order);
  CHECK(osc.tag == StabilityTag::bounded_oscillatory);
  CHECK(osc.lagrange_strict);
  const auto nil = classify_stability(ExactMatrix{{0, 1}, {0, 0}}, SystemForm::first_order);
  CHECK(nil.tag == StabilityTag::secular_polynomial_growth);
  REQUIRE_FALSE(nil.witnesses.empty());
  CHECK(nil.witnesses[0].block_size == 2);
  const auto neg_id = classify_stability(ExactMatrix::identity(2) * rat(-1), SystemForm::second_order);
  CHECK(neg_id.tag == StabilityTag::bounded_oscillatory);
  CHECK_FALSE(neg_id.lagrange_strict);  // repeated root fails the older predicate
  CHECK(classify_stability(ExactMatrix{{1, 0}, {0, -1}}, SystemForm::second_order).tag ==
        StabilityTag::exponentially_unstable);
  CHECK(classify_stability(ExactMatrix{{-1, 0}, {0, -2}}, SystemForm::first_order).tag == StabilityTag::decaying);
  // Zero eigenvalue in second order form drifts unless v0 has no component along it.
  const ExactMatrix z{{0, 0}, {0, -1}};
  CHECK(classify_stability(z, SystemForm::second_order).tag == StabilityTag::secular_polynomial_growth);
  CHECK(classify_stability(z, SystemForm::second_order, {rat(1), rat(1)}, {rat(0), rat(1)}).tag ==
        StabilityTag::bounded_oscillatory);
  CHECK(classify_stability(z, SystemForm::second_order, {rat(1), rat(1)}, {rat(1), rat(0)}).tag ==
        StabilityTag::secular_polynomial_growth);
}

TEST_CASE("solve_lagrange_oscillation examples") {
  SUBCASE("beaded string") {
    const ExactMatrix a{{-2, 1, 0}, {1, -2, 1}, {0, 1, -2}};
    const auto lo = solve_lagrange_oscillation(a, {rat(1), rat(0), rat(0)}, {rat(0), rat(0), rat(0)});
    REQUIRE(lo.modes.size() == 3);
    // ascending alpha: k = 3, 2, 1 in -4 sin^2(k pi / 8)
    for (int i = 0; i < 3; ++i) {
      const double s = std::sin((3 - i) * M_PI / 8);
      CHECK(std::abs(lo.modes[static_cast<std::size_t>(i)].alpha + 4 * s * s) < 1e-12);
      CHECK(lo.modes[static_cast<std::size_t>(i)].kind == OscillationMode::Kind::oscillatory);
    }
    CHECK(lo.verdict.tag == StabilityTag::bounded_oscillatory);
  }
  SUBCASE("diag(-1, -4) from rest") {
    const auto lo = solve_lagrange_oscillation(ExactMatrix{{-1, 0}, {0, -4}}, {rat(1), rat(0)}, {rat(0), rat(0)});
    for (double t : {0.0, 0.4, 1.3}) {
      const ComplexVector x = lo.solution.evaluate(t);
      CHECK(std::abs(x(0) - std::cos(t)) < 1e-13);
      CHECK(std::abs(x(1)) < 1e-13);
    }
  }
  SUBCASE("positive eigenvalue") {
    const auto lo = solve_lagrange_oscillation(ExactMatrix{{1, 0}, {0, -1}}, {rat(1), rat(1)}, {rat(0), rat(0)});
    CHECK(lo.verdict.tag == StabilityTag::exponentially_unstable);
    bool exp_mode = false;
    for (const auto& m : lo.modes) exp_mode = exp_mode || m.kind == OscillationMode::Kind::exponential;
    CHECK(exp_mode);
  }
  CHECK_THROWS_AS(solve_lagrange_oscillation(ExactMatrix{{0, 1}, {0, 0}}, {rat(1), rat(0)}, {rat(0), rat(0)}),
                  DomainError);
}

TEST_CASE("property: second order classification against the spectrum and the doubled system") {
  secular::testing::Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = static_cast<std::size_t>(secular::testing::uniform_int(rng, 1, 4));
    const auto planted = secular::testing::planted_symmetric(rng, n, trial % 2 == 0);
    bool all_nonpositive = true, any_zero = false;
    for (const auto& l : planted.eigenvalues) {
      all_nonpositive = all_nonpositive && l <= 0;
      any_zero = any_zero || l == 0;
    }
    const auto v = classify_stability(planted.a, SystemForm::second_order);
    CHECK((v.tag == StabilityTag::bounded_oscillatory) == (all_nonpositive && !any_zero));
    const auto doubled = classify_stability(doubled_system(planted.a), SystemForm::first_order);
    CHECK(doubled.tag == v.tag);
  }
}

TEST_CASE("property: first order classification is similarity invariant; secular iff excited block") {
  secular::testing::Rng rng(32);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = static_cast<std::size_t>(secular::testing::uniform_int(rng, 1, 4));
    const auto planted = secular::testing::planted_jordan(rng, n);
    const auto v0 = classify_stability(planted.jordan, SystemForm::first_order);
    const auto v1 = classify_stability(planted.a, SystemForm::first_order);
    CHECK(v0.tag == v1.tag);

    ExactVector x0(n);
    for (auto& x : x0) x = secular::testing::uniform_int(rng, -3, 3);
    // Degree of the polynomial factor: position of the last excited
    // coordinate inside each Jordan block, in Jordan coordinates.
    const auto jf = jordan_form(planted.a);
    const ExactVector y = inverse(jf.transform) * x0;
    int expected = is_zero(x0) ? -1 : 0;
    for (std::size_t start = 0; start < n;) {
      std::size_t end = start + 1;
      while (end < n && jf.jordan(end - 1, end) == 1) ++end;
      for (std::size_t i = start; i < end; ++i)
        if (y[i] != 0) expected = std::max(expected, static_cast<int>(i - start));
      start = end;
    }
    const auto sol = solve_constant(planted.a, x0);
    if (expected >= 0) CHECK(sol.max_degree() == expected);
    CHECK(solve_residue(planted.a, x0).max_degree() == sol.max_degree());
  }
}

}  // TEST_SUITE
