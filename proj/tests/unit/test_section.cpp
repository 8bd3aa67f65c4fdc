#include <doctest.h>

#include <cmath>

#include "secular/errors.hpp"
#include "secular/section.hpp"

using namespace secular;
using namespace secular::section;

namespace {

constexpr double kMu = 0.012150585;
// Energy of the amplitude-0.01 L1 Lyapunov orbit; it also carries an
// elliptic fixed point near x = -0.548 for the downward crossing.
constexpr double kC = 3.18339544175;
const SectionDef kDown{-1, kC};

struct OrbitPoint {
  pcr3bp::OrbitRecord orbit;
  SectionPoint p;
  SectionDef sd;
};

const OrbitPoint& l1_point() {
  static const OrbitPoint op = [] {
    OrbitPoint o;
    o.orbit = pcr3bp::correct_periodic(pcr3bp::lyapunov_seed(kMu, pcr3bp::Label::L1, 1e-3), kMu);
    o.p = {o.orbit.initial(0), 0.0};
    o.sd = {o.orbit.initial(3) > 0 ? 1 : -1, o.orbit.jacobi};
    return o;
  }();
  return op;
}

const SectionPoint& elliptic_point() {
  static const SectionPoint p = fixed_point({-0.547990260902, 0.0}, kMu, kDown).point;
  return p;
}

double dist(const SectionPoint& a, const SectionPoint& b) { return std::hypot(a.x - b.x, a.vx - b.vx); }

double segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d d = b - a;
  const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (a + t * d - p).norm();
}

double polyline_distance(const SectionPoint& p, const std::vector<SectionPoint>& line) {
  double best = 1e300;
  for (std::size_t i = 0; i + 1 < line.size(); ++i)
    best = std::min(best, segment_distance({p.x, p.vx}, {line[i].x, line[i].vx}, {line[i + 1].x, line[i + 1].vx}));
  return best;
}

ManifoldPolyline line(std::initializer_list<SectionPoint> pts) {
  ManifoldPolyline m;
  m.points = pts;
  return m;
}

}  // namespace

TEST_SUITE("section") {

TEST_CASE("lift reconstructs vy from the energy") {
  const RotatingState s = lift({0.5, 0.1}, kMu, kDown);
  CHECK(s(1) == 0.0);
  CHECK(s(3) < 0);
  CHECK(std::abs(pcr3bp::jacobi_constant(s, kMu) - kC) < 1e-12);
  CHECK_THROWS_AS(lift({0.5, 3.0}, kMu, kDown), DomainError);
  CHECK_THROWS_AS(lift({0.5, 0.0}, kMu, SectionDef{0, kC}), DomainError);
  CHECK_THROWS_AS(return_map({0.5, 3.0}, kMu, kDown), DomainError);
}

TEST_CASE("the orbit's section point is a fixed point of the map") {
  const auto& op = l1_point();
  CHECK(dist(return_map(op.p, kMu, op.sd), op.p) < 1e-8);
  CHECK(dist(return_map(op.p, kMu, op.sd, {}, true), op.p) < 1e-8);
  const auto fp = fixed_point(op.p, kMu, op.sd);
  CHECK(dist(fp.point, op.p) < 1e-9);
  CHECK(fp.residual <= 1e-11);
}

// The unstable multiplier is about 2700, so a seed offset must stay well
// below the orbit amplitude divided by it for one return to remain linear.
TEST_CASE("fixed point Newton recovers from a perturbed seed") {
  const auto& op = l1_point();
  const auto fp = fixed_point({op.p.x + 1e-6, op.p.vx - 1e-6}, kMu, op.sd);
  CHECK(dist(fp.point, op.p) < 1e-9);
  CHECK(fp.iterations > 0);
}

TEST_CASE("fixed point failure paths") {
  // Far outside the Hill region of L1 the iteration has nothing to settle on.
  CHECK_THROWS_AS(fixed_point({1.2, 0.0}, kMu, kDown, 1e-11, {}, 4), NonConvergenceError);
}

TEST_CASE("section_crossings composes the return map") {
  const SectionPoint start{-0.53, 0.02};
  const auto seq = section_crossings(start, kMu, kDown, 5);
  REQUIRE(seq.points.size() == 5);
  CHECK(seq.reason == Truncation::none);
  SectionPoint p = start;
  for (int i = 0; i < 5; ++i) p = return_map(p, kMu, kDown);
  CHECK(p.x == seq.points.back().x);
  CHECK(p.vx == seq.points.back().vx);
}

TEST_CASE("crossings from a fixed point stay put; nearby starts stay on an invariant curve") {
  const SectionPoint fp = elliptic_point();
  const auto seq = section_crossings(fp, kMu, kDown, 10);
  REQUIRE(seq.points.size() == 10);
  for (const auto& q : seq.points) CHECK(dist(q, fp) < 1e-8);

  const SectionPoint start{fp.x + 0.01, fp.vx};
  const auto ring = section_crossings(start, kMu, kDown, 60);
  REQUIRE(ring.points.size() == 60);
  double rmin = 1e300, rmax = 0;
  for (const auto& q : ring.points) {
    rmin = std::min(rmin, dist(q, fp));
    rmax = std::max(rmax, dist(q, fp));
  }
  CHECK(rmin > 1e-3);
  CHECK(rmax < 0.05);
}

TEST_CASE("the other crossing direction gives a different family") {
  const SectionPoint start{-0.53, 0.02};
  const auto down = section_crossings(start, kMu, kDown, 3);
  const auto up = section_crossings(start, kMu, SectionDef{1, kC}, 3);
  REQUIRE(down.points.size() == 3);
  REQUIRE(up.points.size() == 3);
  for (const auto& a : down.points)
    for (const auto& b : up.points) CHECK(dist(a, b) > 1e-6);
}

TEST_CASE("escape and collision truncate the sequence") {
  const auto esc = section_crossings({2.5, 0.0}, kMu, SectionDef{1, -5.0}, 3);
  CHECK(esc.reason != Truncation::none);
  CHECK(esc.points.size() < 3);
  CHECK(to_string(Truncation::escape) == "escape");
}

TEST_CASE("linearization at the Lyapunov fixed point matches the orbit monodromy") {
  const auto& op = l1_point();
  const auto rep = pcr3bp::orbit_exponents(op.orbit);
  const auto lin = linearize_map(op.p, kMu, op.sd);
  CHECK(lin.type == MapType::hyperbolic);
  CHECK(lin.method == JacobianMethod::stm);
  CHECK(std::abs(lin.det - 1.0) < 1e-6);
  CHECK(std::abs(lin.eigenvalues[0] - rep.nontrivial[0]) < 1e-4);
  CHECK(std::abs(lin.eigenvalues[1] - rep.nontrivial[1]) < 1e-4);

  SectionConfig fine;
  fine.fd_step = 1e-9;
  const auto fd = linearize_map(op.p, kMu, op.sd, fine, JacobianMethod::finite_difference);
  CHECK(fd.type == MapType::hyperbolic);
  CHECK(std::abs(fd.eigenvalues[0] / lin.eigenvalues[0] - 1.0) < 1e-3);
}

TEST_CASE("linearization at an elliptic fixed point") {
  const auto lin = linearize_map(elliptic_point(), kMu, kDown);
  CHECK(lin.type == MapType::elliptic);
  CHECK(std::abs(std::abs(lin.eigenvalues[0]) - 1.0) < 1e-8);
  CHECK(std::abs(lin.eigenvalues[0] - std::conj(lin.eigenvalues[1])) < 1e-10);
  CHECK(std::abs(lin.det - 1.0) < 1e-8);
  const auto fd = linearize_map(elliptic_point(), kMu, kDown, {}, JacobianMethod::finite_difference);
  CHECK((fd.jacobian - lin.jacobian).norm() < 1e-5);
  CHECK(to_string(MapType::elliptic) == "elliptic");
}

TEST_CASE("the unstable branch leaves along its eigenvector") {
  const auto& op = l1_point();
  ManifoldConfig mc;
  mc.steps = 1;
  mc.seeds = 5;
  const auto u = manifold_segment(op.p, kMu, op.sd, Branch::unstable_plus, mc);
  CHECK(u.reason == Truncation::none);
  REQUIRE(u.points.size() == 10);
  const Eigen::Vector2d d(u.points[5].x - op.p.x, u.points[5].vx - op.p.vx);
  const double angle = std::acos(std::min(1.0, d.normalized().dot(u.direction)));
  CHECK(angle < 5.0 * M_PI / 180.0);
  CHECK(std::abs(u.eigenvalue.real() - pcr3bp::orbit_exponents(op.orbit).lambda) < 1e-3);
}

TEST_CASE("stable branches mirror unstable ones under time reversal") {
  const auto& op = l1_point();
  ManifoldConfig mc;
  mc.steps = 2;
  mc.seeds = 40;
  const auto up = manifold_segment(op.p, kMu, op.sd, Branch::unstable_plus, mc);
  const auto um = manifold_segment(op.p, kMu, op.sd, Branch::unstable_minus, mc);
  const auto sp = manifold_segment(op.p, kMu, op.sd, Branch::stable_plus, mc);
  REQUIRE(sp.points.size() == 120);
  // (x, vx) -> (x, -vx) conjugates the map to its inverse.
  for (std::size_t i = 0; i < 80; i += 7) {
    const SectionPoint r{sp.points[i].x, -sp.points[i].vx};
    CHECK(std::min(polyline_distance(r, up.points), polyline_distance(r, um.points)) < 1e-6);
  }
  CHECK_THROWS_AS(manifold_segment(elliptic_point(), kMu, kDown, Branch::unstable_plus, mc), DomainError);
}

TEST_CASE("find_homoclinic on synthetic polylines") {
  const auto u = line({{0, 0}, {0.01, 0.01}, {0.02, 0.02}});
  const auto s = line({{0.02, 0}, {0.01, 0.01}, {0, 0.02}});
  const auto rep = find_homoclinic(u, line({{0.0, 0.015}, {0.015, 0.0}}));
  CHECK(rep.found);
  CHECK(std::abs(rep.point.x - 0.0075) < 1e-15);
  CHECK(std::abs(rep.angle - M_PI / 2) < 1e-12);
  CHECK(rep.unstable_index == 0);
  CHECK(find_homoclinic(u, s).found);
  CHECK_FALSE(find_homoclinic(u, line({{0, 0.01}, {0.02, 0.03}})).found);  // parallel
  CHECK_FALSE(find_homoclinic(u, line({{-0.1, 0.13}, {0.13, -0.1}})).found);    // chord too long
  CHECK(find_homoclinic(u, line({{-0.1, 0.13}, {0.13, -0.1}}), 1.0).found);
}

}  // TEST_SUITE
