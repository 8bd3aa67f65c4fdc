#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

#include "secular/pcr3bp.hpp"

namespace secular::section {

using pcr3bp::RotatingState;

/// The plane y = 0, crossed with sign(vy) == direction, at Jacobi constant C.
struct SectionDef {
  int direction = 1;
  double jacobi = 3.0;
};

struct SectionPoint {
  double x = 0.0;
  double vx = 0.0;
};

struct SectionConfig {
  double integrator_tol = 1e-12;
  double escape_radius = 10.0;
  double max_time = 50.0;  // per return
  double fd_step = 1e-6;   // finite-difference Jacobian
};

/// Full state on the section; vy from the Jacobi constant. DomainError if
/// the point is energetically forbidden or the direction is not +-1.
RotatingState lift(const SectionPoint& p, double mu, const SectionDef& sd);

/// One return to the section. `inverse` integrates backwards in time and
/// gives the inverse map. Throws DomainError for forbidden points,
/// SingularityError on collision, NonConvergenceError on escape or timeout.
SectionPoint return_map(const SectionPoint& p, double mu, const SectionDef& sd, const SectionConfig& cfg = {},
                        bool inverse = false);

enum class Truncation { none, escape, collision, timeout };
std::string to_string(Truncation t);

struct CrossingSequence {
  std::vector<SectionPoint> points;  // successive images, start excluded
  Truncation reason = Truncation::none;
};

/// n successive returns, built by composing return_map.
CrossingSequence section_crossings(const SectionPoint& start, double mu, const SectionDef& sd, int n,
                                   const SectionConfig& cfg = {});

enum class MapType { elliptic, hyperbolic, marginal };
std::string to_string(MapType t);

enum class JacobianMethod { stm, finite_difference };

struct MapLinearization {
  Eigen::Matrix2d jacobian;
  std::complex<double> eigenvalues[2];  // larger modulus first
  double det = 0.0;
  MapType type = MapType::marginal;
  JacobianMethod method = JacobianMethod::stm;
};

/// STM reduction: the variational flow to the next crossing, with the vy
/// perturbation fixed by the energy constraint and the time shift by y = 0.
/// Finite differences: central, step cfg.fd_step, one Richardson extrapolation.
/// Real eigenvalues within `band` of unit modulus are tagged marginal.
MapLinearization linearize_map(const SectionPoint& p, double mu, const SectionDef& sd, const SectionConfig& cfg = {},
                               JacobianMethod method = JacobianMethod::stm, double band = 1e-6);

struct FixedPointResult {
  SectionPoint point;
  double residual = 0.0;
  int iterations = 0;
};

/// Damped Newton on P(p) - p with the STM Jacobian. NonConvergenceError when
/// no step decreases the residual or the budget runs out, DegenerateError
/// when I - J is singular.
FixedPointResult fixed_point(const SectionPoint& guess, double mu, const SectionDef& sd, double tol = 1e-11,
                             const SectionConfig& cfg = {}, int max_iter = 30);

enum class Branch { unstable_plus, unstable_minus, stable_plus, stable_minus };
std::string to_string(Branch b);

struct ManifoldConfig {
  int steps = 30;          // iterates of the map
  int seeds = 200;         // per fundamental domain
  double seed_offset = 1e-7;
};

struct ManifoldPolyline {
  Branch branch;
  std::vector<SectionPoint> points;  // ordered along the manifold
  Truncation reason = Truncation::none;
  Eigen::Vector2d direction;         // seeding eigenvector (unit)
  std::complex<double> eigenvalue;
};

/// Seeds geometrically spaced points on the eigen-direction across one
/// fundamental domain and iterates them (inverse map for stable branches).
/// Requires a hyperbolic fixed point (DomainError otherwise).
ManifoldPolyline manifold_segment(const SectionPoint& fixed, double mu, const SectionDef& sd, Branch branch,
                                  const ManifoldConfig& mcfg = {}, const SectionConfig& cfg = {});

struct HomoclinicReport {
  bool found = false;
  SectionPoint point;
  std::size_t unstable_index = 0;  // segment [i, i+1] of the unstable polyline
  std::size_t stable_index = 0;
  double angle = 0.0;              // between the two segments, radians in [0, pi/2]
};

/// First intersection in unstable-polyline order between the segments of the
/// two polylines. Segments longer than max_segment are gaps where the
/// polyline under-resolves the manifold and are skipped. Empty report when
/// there is none.
HomoclinicReport find_homoclinic(const ManifoldPolyline& unstable, const ManifoldPolyline& stable,
                                 double max_segment = 0.05);

}  // namespace secular::section
