#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "secular/floquet.hpp"
#include "secular/integrator.hpp"
#include "secular/linode.hpp"
#include "secular/ratpoly.hpp"

namespace secular::pcr3bp {

/// (x, y, vx, vy) in the rotating frame; primaries at (-mu, 0) and (1 - mu, 0).
using RotatingState = Eigen::Vector4d;

inline constexpr double kCollisionRadius = 1e-6;

/// Throws DomainError unless 0 < mu <= 1/2.
void validate_mu(double mu);

/// Effective potential Omega = (x^2 + y^2)/2 + (1 - mu)/r1 + mu/r2 and its derivatives.
struct Potential {
  double omega, ox, oy, oxx, oyy, oxy;
};
Potential potential(double x, double y, double mu, double collision_radius = kCollisionRadius);

/// (vx, vy, 2 vy + Omega_x, -2 vx + Omega_y). Throws SingularityError within
/// collision_radius of a primary.
RotatingState eom(const RotatingState& s, double mu, double collision_radius = kCollisionRadius);

/// C = 2 Omega - (vx^2 + vy^2).
double jacobi_constant(const RotatingState& s, double mu, double collision_radius = kCollisionRadius);

/// Linearization of eom at s: [[0, I], [Hess Omega, 2 J]].
Eigen::Matrix4d variational_matrix(const RotatingState& s, double mu);

enum class Label { L1, L2, L3, L4, L5 };
std::string to_string(Label l);
Label parse_label(const std::string& s);

struct LibrationPoint {
  Label label;
  double x = 0.0;
  double y = 0.0;
};

/// Collinear equilibrium condition on each axis segment, cleared of
/// denominators; mu is taken as the exact value of its double.
RationalPolynomial collinear_polynomial(Label l, const Rational& mu);

/// L1..L5. Collinear points are Sturm-isolated roots of the exact quintic on
/// their segment, refined to 1e-12; L4/L5 are at (1/2 - mu, +-sqrt(3)/2).
std::vector<LibrationPoint> libration_points(double mu);
LibrationPoint libration_point(double mu, Label l);

struct LibrationStability {
  LibrationPoint point;
  Eigen::Matrix4d jacobian;
  /// Equation in S: s^4 + b s^2 + c with b = 4 - Oxx - Oyy, c = Oxx Oyy - Oxy^2.
  double b = 0.0;
  double c = 0.0;
  std::vector<std::complex<double>> roots;
  StabilityVerdict verdict;  // from the exact characteristic polynomial of the jacobian
  bool linearly_stable = false;
};

LibrationStability libration_stability(double mu, Label l);

struct VariationalResult {
  RotatingState state;
  Eigen::Matrix4d stm;
};

/// Integrates the state together with its 4x4 state-transition matrix.
VariationalResult variational_flow(const RotatingState& s0, double mu, double t, double tol = 1e-12);

/// Vector field of the 20-dimensional state + STM system (STM column-major).
VectorField variational_field(double mu);
VectorField state_field(double mu);

/// First time after t0 at which component `index` of the flow crosses zero
/// going in direction `dir` (+1 upward, -1 downward, 0 either). The crossing
/// is bracketed on the dense output, then polished by Newton steps on
/// re-integrations from the start of the bracketing step until
/// |x_index| <= 1e-12. `keep_going` may stop the search (escape tests).
struct Crossing {
  double t = 0.0;
  State x;
};
std::optional<Crossing> find_crossing(const VectorField& f, const State& x0, double t0, double t_max, int index,
                                      int dir, const IntegratorConfig& cfg,
                                      const std::function<bool(const StepRecord&)>& keep_going = {});

/// Symmetric initial guess: (x0, 0, 0, vy0), half-period estimate.
struct OrbitGuess {
  double x0 = 0.0;
  double vy0 = 0.0;
  double half_period = 0.0;
};

/// Planar Lyapunov seed from the linearized center motion at a collinear point.
OrbitGuess lyapunov_seed(double mu, Label l, double amplitude);

struct CorrectionConfig {
  double tol = 1e-11;  // |vx| at the half-period crossing
  int max_iter = 50;
  double integrator_tol = 1e-13;
  int samples = 200;   // trajectory samples over one period
};

struct OrbitSample {
  double t;
  RotatingState s;
  double jacobi;
};

struct OrbitRecord {
  double mu = 0.0;
  RotatingState initial;
  double period = 0.0;
  double jacobi = 0.0;
  int iterations = 0;
  double crossing_residual = 0.0;  // |vx| at the half-period crossing
  double closure_residual = 0.0;   // ||x(T) - x(0)||
  double jacobi_drift = 0.0;       // max |C(t) - C(0)| over the samples
  Eigen::Matrix4d monodromy;
  std::vector<OrbitSample> samples;
};

/// Newton on vx at the next x-axis crossing, keeping x0 fixed and adjusting vy0.
/// NonConvergenceError (best iterate in the message) when max_iter runs out
/// or the trajectory collides or misses the axis; DegenerateError when the
/// correction derivative falls below 1e-12.
OrbitRecord correct_periodic(const OrbitGuess& guess, double mu, const CorrectionConfig& cfg = {});

struct OrbitExponentReport {
  ExponentSet exponents;
  double lambda = 0.0;  // largest multiplier modulus
  double unit_cluster_tol = 0.0;
  int unit_multiplicity = 0;
  double unit_deviation = 0.0;  // max |s - 1| over the unit pair
  bool unit_pair_ok = false;
  double reciprocal_error = 0.0;  // |s3 s4 - 1|
  bool reciprocal_ok = false;
  double det_error = 0.0;  // |prod s - 1|
  bool det_ok = false;
  /// Nontrivial pair, larger modulus first.
  std::complex<double> nontrivial[2];
  StabilityVerdict verdict;
  std::vector<std::string> flags;  // failed assertions
};

/// Cluster tolerance for the unit pair: unit_scale * max(1, Lambda).
OrbitExponentReport orbit_exponents(const OrbitRecord& orbit, double unit_scale = 1e-5, double reciprocal_tol = 1e-6,
                                    double det_tol = 1e-6);

/// Trajectory samples (t, state, C) from s0 over [0, t].
std::vector<OrbitSample> propagate(const RotatingState& s0, double mu, double t, int samples, double tol = 1e-12);

}  // namespace secular::pcr3bp
