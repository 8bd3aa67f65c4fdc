#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "secular/exact_matrix.hpp"
#include "secular/integrator.hpp"
#include "secular/jordan.hpp"
#include "secular/linode.hpp"

namespace secular {

/// x' = A(t) x with A(t + T) = A(t).
struct PeriodicLinearSystem {
  std::function<Eigen::MatrixXd(double)> a;
  double period = 0.0;
  Eigen::Index dim = 0;
};

/// Throws DomainError if A(t + T) differs from A(t) at a few sample times.
void check_periodicity(const PeriodicLinearSystem& sys, double rel_tol = 1e-9);

/// Fundamental solution X(t) with X(0) = I.
Eigen::MatrixXd fundamental_matrix(const PeriodicLinearSystem& sys, double t, const IntegratorConfig& cfg = {});

struct Monodromy {
  Eigen::MatrixXd m;
  double period = 0.0;
  IntegratorConfig config;
};

Monodromy monodromy(const PeriodicLinearSystem& sys, double tol = 1e-10);

struct ExponentSet {
  double period = 0.0;
  /// Multipliers with multiplicity and their principal exponents
  /// (Im alpha in (-pi/T, pi/T]), sorted by (Re alpha, Im alpha).
  std::vector<std::complex<double>> multipliers;
  std::vector<std::complex<double>> exponents;
  /// Multiplier clusters with Jordan block sizes, in the order of `transform`'s columns.
  std::vector<NumericJordanBlock> blocks;
  ComplexMatrix transform;
  bool ill_conditioned = false;
  std::vector<std::string> warnings;
};

/// Principal branch: log(s) / T with the argument in (-pi, pi].
std::complex<double> principal_exponent(std::complex<double> s, double period);

/// Multipliers cluster when closer than cluster_tol * max(1, max|s|).
/// Throws DegenerateError for a (numerically) zero multiplier.
ExponentSet characteristic_exponents(const Eigen::MatrixXd& m, double period, double cluster_tol = 1e-8);
ExponentSet characteristic_exponents(const Monodromy& m, double cluster_tol = 1e-8);

/// Bounded iff every multiplier has modulus within `band` of 1 and those
/// multipliers are semisimple; exponentially unstable iff some |s| > 1 + band;
/// secular iff a unit-modulus multiplier carries a block of size >= 2;
/// decaying iff every |s| < 1 - band. `marginal` is set when any multiplier
/// lies inside the band.
StabilityVerdict classify_periodic_stability(const ExponentSet& exps, double band = 1e-6);

struct FloquetSolution {
  std::vector<double> times;              // grid over [0, n_periods * T]
  std::vector<Eigen::VectorXd> states;    // x(t) on the grid, integrated directly
  /// amplitudes[j] = k_j in x(t) = sum_j k_j e^{alpha_j t} p_j(t).
  ComplexVector amplitudes;
  std::vector<std::complex<double>> exponents;
  /// periodic_factors[i][j] = p_j(times[i]) = e^{-alpha_j t} theta_j(t).
  std::vector<ComplexMatrix> periodic_factors;
  /// max over grid points and j of |p_j(t + T) - p_j(t)| / max|p_j|.
  double periodicity_residual = 0.0;
  /// max relative difference between the Floquet sum and the direct states.
  double reconstruction_residual = 0.0;
};

/// Requires distinct multipliers; clustered ones give UnsupportedError.
FloquetSolution floquet_solution(const PeriodicLinearSystem& sys, const Eigen::VectorXd& x0, const ExponentSet& exps,
                                 int n_periods, int samples_per_period = 32, double tol = 1e-11);

/// x'' + (a - 2 q cos 2t) x = 0 as a first-order system with T = pi.
PeriodicLinearSystem hill_system(double a, double q);

struct HillSweepRow {
  double a = 0.0;
  double q = 0.0;
  double max_modulus = 0.0;
  StabilityVerdict verdict;
};

/// Grid over a x q, rows ordered a-major regardless of scheduling. threads <= 0
/// reads SECULAR_THREADS (default: hardware concurrency).
std::vector<HillSweepRow> hill_sweep(const std::vector<double>& a_values, const std::vector<double>& q_values,
                                     double tol = 1e-10, int threads = 0);

}  // namespace secular
