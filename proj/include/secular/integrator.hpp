#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace secular {

using State = Eigen::VectorXd;
/// Right-hand side f(t, x) -> dx/dt. May throw SingularityError.
using VectorField = std::function<State(double, const State&)>;

struct IntegratorConfig {
  /// Per-step error bound, relative with an equal absolute floor.
  double tol = 1e-10;
  /// Initial step; 0 picks one from the local scale of f.
  double initial_step = 0.0;
  long max_steps = 5'000'000;
  /// Keep every accepted step for dense output.
  bool store_steps = true;
};

/// One accepted step with endpoint derivatives for cubic Hermite dense output.
struct StepRecord {
  double t0, t1;
  State x0, x1, f0, f1;

  State interpolate(double t) const;
};

/// Called after each accepted step; returning false stops the integration.
using StepObserver = std::function<bool(const StepRecord&)>;

struct Trajectory {
  std::vector<StepRecord> steps;  // empty unless store_steps
  double t_end = 0.0;
  State x_end;
  long n_steps = 0;
  long n_rejected = 0;
  bool stopped = false;  // observer requested a stop

  /// Dense output on [t_start, t_end] (either time direction).
  State at(double t) const;
};

/// Dormand-Prince 5(4) with error-per-step control: every accepted step has
/// max_i |err_i| / (tol * (1 + max(|x_i|, |x_new_i|))) <= 1. Runs backwards
/// when t1 < t0. Throws SingularityError when the step falls below 1e-14 of
/// the span or the state stops being finite, and NonConvergenceError when
/// max_steps is exhausted.
Trajectory integrate(const VectorField& f, const State& x0, double t0, double t1, const IntegratorConfig& cfg = {},
                     const StepObserver& observer = {});

}  // namespace secular
