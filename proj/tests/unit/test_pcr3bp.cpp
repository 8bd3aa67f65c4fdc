#include <doctest.h>

#include <cmath>

#include "secular/errors.hpp"
#include "secular/pcr3bp.hpp"

using namespace secular;
using namespace secular::pcr3bp;

namespace {

constexpr double kEarthMoon = 0.012150585;

// Axis equilibrium condition dOmega/dx on y = 0, for the bisection oracle.
double axis_force(double x, double mu) {
  const double d1 = x + mu, d2 = x - 1 + mu;
  return x - (1 - mu) * d1 / std::pow(std::abs(d1), 3) - mu * d2 / std::pow(std::abs(d2), 3);
}

double bisect(double lo, double hi, double mu) {
  double flo = axis_force(lo, mu);
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = axis_force(mid, mu);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

OrbitRecord l1_orbit(double amplitude) {
  return correct_periodic(lyapunov_seed(kEarthMoon, Label::L1, amplitude), kEarthMoon);
}

}  // namespace

TEST_SUITE("pcr3bp") {

TEST_CASE("eom vanishes at every libration point") {
  for (double mu : {0.001, kEarthMoon, 0.2, 0.5})
    for (const auto& p : libration_points(mu)) {
      CAPTURE(mu);
      CAPTURE(to_string(p.label));
      CHECK(eom(RotatingState(p.x, p.y, 0, 0), mu).norm() < 1e-10);
    }
  CHECK(std::abs(libration_point(0.5, Label::L1).x) < 1e-12);
}

TEST_CASE("eom matches uniform rotation of a Kepler circle when mu is negligible") {
  const double mu = 1e-12, r = 0.4;
  const double w = std::pow(r, -1.5) - 1.0;  // angular rate seen from the rotating frame
  const RotatingState s(r, 0, 0, r * w);
  const RotatingState d = eom(s, mu);
  CHECK(std::abs(d(0)) < 1e-15);
  CHECK(std::abs(d(1) - r * w) < 1e-15);
  CHECK(std::abs(d(2) + r * w * w) < 1e-9);
  CHECK(std::abs(d(3)) < 1e-9);
}

TEST_CASE("collision and parameter errors") {
  CHECK_THROWS_AS(eom(RotatingState(-kEarthMoon, 0, 0, 0), kEarthMoon), SingularityError);
  CHECK_THROWS_AS(jacobi_constant(RotatingState(1 - kEarthMoon, 0, 0, 0), kEarthMoon), SingularityError);
  CHECK_THROWS_AS(validate_mu(0.0), DomainError);
  CHECK_THROWS_AS(validate_mu(0.6), DomainError);
  CHECK_THROWS_AS(parse_label("L6"), DomainError);
  CHECK(parse_label("L3") == Label::L3);
}

TEST_CASE("jacobi constant examples") {
  for (double mu : {0.01, kEarthMoon, 0.3}) {
    const auto l4 = libration_point(mu, Label::L4);
    CHECK(std::abs(jacobi_constant(RotatingState(l4.x, l4.y, 0, 0), mu) - (3 - mu * (1 - mu))) < 1e-14);
  }
  const RotatingState s(0.3, 0.2, 0.1, -0.2);
  RotatingState fast = s;
  fast.tail<2>() *= 2.0;
  const double v2 = s.tail<2>().squaredNorm();
  CHECK(std::abs(jacobi_constant(s, kEarthMoon) - jacobi_constant(fast, kEarthMoon) - 3 * v2) < 1e-14);
}

TEST_CASE("collinear points agree with a scalar bisection oracle") {
  for (double mu : {0.01215, 0.1, 0.4}) {
    CHECK(std::abs(libration_point(mu, Label::L1).x - bisect(-mu + 1e-9, 1 - mu - 1e-9, mu)) < 1e-11);
    CHECK(std::abs(libration_point(mu, Label::L2).x - bisect(1 - mu + 1e-9, 2.0, mu)) < 1e-11);
    CHECK(std::abs(libration_point(mu, Label::L3).x - bisect(-2.0, -mu - 1e-9, mu)) < 1e-11);
  }
  // The exact quintic vanishes at the refined root up to its refinement tolerance.
  const Rational m = from_double(0.1);
  const auto p = collinear_polynomial(Label::L1, m);
  CHECK(p.degree() == 5);
  CHECK(std::abs(p.evaluate(libration_point(0.1, Label::L1).x)) < 1e-10);
}

TEST_CASE("libration stability examples") {
  const auto s1 = libration_stability(0.01, Label::L4);
  CHECK(s1.linearly_stable);
  CHECK(s1.verdict.tag == StabilityTag::bounded_oscillatory);
  // L4 quartic: s^4 + s^2 + (27/4) mu (1 - mu)
  CHECK(std::abs(s1.b - 1.0) < 1e-12);
  CHECK(std::abs(s1.c - 6.75 * 0.01 * 0.99) < 1e-12);
  const auto s2 = libration_stability(0.05, Label::L4);
  CHECK_FALSE(s2.linearly_stable);
  CHECK(s2.verdict.tag == StabilityTag::exponentially_unstable);
  for (double mu : {0.01, 0.1, 0.3}) {
    const auto s = libration_stability(mu, Label::L1);
    bool positive_real = false;
    for (const auto& r : s.roots) positive_real = positive_real || (r.real() > 1e-6 && std::abs(r.imag()) < 1e-9);
    CHECK(positive_real);
    CHECK(s.verdict.tag == StabilityTag::exponentially_unstable);
  }
}

TEST_CASE("variational flow") {
  const RotatingState s0(0.5, 0.1, 0.05, 0.3);
  const auto zero = variational_flow(s0, kEarthMoon, 0.0);
  CHECK((zero.stm - Eigen::Matrix4d::Identity()).norm() == 0.0);

  const double t = 1.7, h = 1e-7;
  const auto base = variational_flow(s0, kEarthMoon, t);
  CHECK(std::abs(base.stm.determinant() - 1.0) < 1e-8);
  for (int j = 0; j < 4; ++j) {
    RotatingState p = s0, m = s0;
    p(j) += h;
    m(j) -= h;
    const Eigen::Vector4d fd =
        (variational_flow(p, kEarthMoon, t).state - variational_flow(m, kEarthMoon, t).state) / (2 * h);
    CHECK((fd - base.stm.col(j)).norm() < 1e-4 * std::max(1.0, base.stm.col(j).norm()));
  }
  const auto back = variational_flow(base.state, kEarthMoon, -t);
  CHECK((back.state - s0).norm() < 1e-10);
}

TEST_CASE("differential correction of a small L1 Lyapunov orbit") {
  const auto seed = lyapunov_seed(kEarthMoon, Label::L1, 1e-3);
  const auto orbit = correct_periodic(seed, kEarthMoon);
  CHECK(orbit.crossing_residual < 1e-10);
  CHECK(orbit.closure_residual < 1e-8);
  CHECK(orbit.jacobi_drift < 1e-12);
  CHECK(std::abs(orbit.period - 2 * seed.half_period) < 1e-3 * orbit.period);
  CHECK(std::abs(orbit.monodromy.determinant() - 1.0) < 1e-6);

  // A second seed with a perturbed velocity lands on the same orbit.
  OrbitGuess nudged = seed;
  nudged.vy0 *= 1.0 + 1e-6;
  const auto again = correct_periodic(nudged, kEarthMoon);
  CHECK((again.initial - orbit.initial).norm() < 1e-8);

  const OrbitGuess bad{0.3, 2.5, 0.2};
  CHECK_THROWS_AS(correct_periodic(bad, kEarthMoon), NonConvergenceError);
}

TEST_CASE("period approaches the linear value as the amplitude shrinks") {
  const double mu = 1e-3;
  const auto small = lyapunov_seed(mu, Label::L1, 1e-4);
  const auto big = lyapunov_seed(mu, Label::L1, 2e-3);
  const double err_small = std::abs(correct_periodic(small, mu).period - 2 * small.half_period);
  const double err_big = std::abs(correct_periodic(big, mu).period - 2 * big.half_period);
  CHECK(err_small < 1e-5);
  CHECK(err_small < err_big / 50);  // quadratic in the amplitude: ratio 400
}

TEST_CASE("orbit exponents of the L1 Lyapunov orbit") {
  const auto rep = orbit_exponents(l1_orbit(1e-3));
  CHECK(rep.flags.empty());
  CHECK(rep.unit_pair_ok);
  CHECK(rep.reciprocal_ok);
  CHECK(rep.det_ok);
  CHECK(rep.unit_multiplicity == 2);
  CHECK(rep.lambda > 1000);
  CHECK(std::abs(rep.nontrivial[0].imag()) < 1e-9);
  CHECK(rep.verdict.tag == StabilityTag::exponentially_unstable);
  // Exponents pair up as alpha, -alpha.
  const auto& ex = rep.exponents.exponents;
  REQUIRE(ex.size() == 4);
  CHECK(std::abs(ex[0] + ex[3]) < 1e-6);
  CHECK(std::abs(ex[1] + ex[2]) < 1e-4);
}

TEST_CASE("propagate samples") {
  const auto samples = propagate(RotatingState(0.5, 0.0, 0.0, 0.5), kEarthMoon, 2.0, 10);
  REQUIRE(samples.size() == 11);
  CHECK(samples.front().t == 0.0);
  CHECK(samples.back().t == 2.0);
  for (const auto& s : samples) CHECK(std::abs(s.jacobi - samples.front().jacobi) < 1e-10);
  CHECK_THROWS_AS(propagate(RotatingState(0.5, 0, 0, 0.5), kEarthMoon, 1.0, 0), DomainError);
}

}  // TEST_SUITE
