#include "secular/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "secular/errors.hpp"

namespace secular {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

bool finite(const State& x) { return x.allFinite(); }

double error_norm(const State& err, const State& x, const State& xn, double tol) {
  double e = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = tol * (1.0 + std::max(std::abs(x(i)), std::abs(xn(i))));
    e = std::max(e, std::abs(err(i)) / sc);
  }
  return e;
}

double initial_step(const VectorField& f, double t0, const State& x0, const State& f0, double dir, double tol,
                    double span) {
  const double d0 = x0.cwiseAbs().maxCoeff(), d1 = f0.cwiseAbs().maxCoeff();
  double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h = std::min(h, span);
  const State x1 = x0 + dir * h * f0;
  const State f1 = f(t0 + dir * h, x1);
  const double d2 = (f1 - f0).cwiseAbs().maxCoeff() / h;
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(tol / dm, 1.0 / 5.0);
  return std::min({100 * h, h1, span});
}

}  // namespace

State StepRecord::interpolate(double t) const {
  const double h = t1 - t0;
  if (h == 0.0) return x0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * x0 + (h10 * h) * f0 + h01 * x1 + (h11 * h) * f1;
}

State Trajectory::at(double t) const {
  if (steps.empty()) {
    if (t == t_end) return x_end;
    throw DomainError("trajectory has no stored steps for dense output");
  }
  const bool forward = steps.front().t1 >= steps.front().t0;
  // Steps are monotone in time; find the one containing t.
  auto contains = [&](const StepRecord& s) {
    return forward ? (t >= s.t0 && t <= s.t1) : (t <= s.t0 && t >= s.t1);
  };
  auto it = std::lower_bound(steps.begin(), steps.end(), t, [&](const StepRecord& s, double v) {
    return forward ? s.t1 < v : s.t1 > v;
  });
  if (it == steps.end() || !contains(*it)) throw DomainError("time outside the integrated span");
  return it->interpolate(t);
}

Trajectory integrate(const VectorField& f, const State& x0, double t0, double t1, const IntegratorConfig& cfg,
                     const StepObserver& observer) {
  if (!(cfg.tol > 0)) throw DomainError("integrator tolerance must be positive");
  Trajectory traj;
  traj.t_end = t0;
  traj.x_end = x0;
  if (t1 == t0) return traj;
  if (!finite(x0)) throw SingularityError("non-finite initial state", t0);

  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  const double h_min = 1e-14 * span;
  double t = t0;
  State x = x0;
  State k1 = f(t, x);
  double h = cfg.initial_step > 0 ? std::min(cfg.initial_step, span) : initial_step(f, t, x, k1, dir, cfg.tol, span);
  double err_prev = 1e-4;

  while (dir * (t1 - t) > 0) {
    if (traj.n_steps + traj.n_rejected >= cfg.max_steps) throw NonConvergenceError("integrator step budget exhausted");
    bool last = false;
    if (h >= std::abs(t1 - t)) {
      h = std::abs(t1 - t);
      last = true;
    }
    if (h < h_min) {
      std::ostringstream msg;
      msg << "step size underflow at t=" << t;
      throw SingularityError(msg.str(), t);
    }
    const double hs = dir * h;
    const State k2 = f(t + c2 * hs, x + hs * (a21 * k1));
    const State k3 = f(t + c3 * hs, x + hs * (a31 * k1 + a32 * k2));
    const State k4 = f(t + c4 * hs, x + hs * (a41 * k1 + a42 * k2 + a43 * k3));
    const State k5 = f(t + c5 * hs, x + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const State k6 = f(t + hs, x + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    State xn = x + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double tn = last ? t1 : t + hs;
    if (!finite(xn)) {
      // Treat as a rejected step; repeated failure ends in underflow.
      h *= 0.1;
      ++traj.n_rejected;
      continue;
    }
    const State k7 = f(tn, xn);
    const State err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = error_norm(err, x, xn, cfg.tol);

    if (en <= 1.0) {
      StepRecord rec{t, tn, x, xn, k1, k7};
      t = tn;
      x = std::move(xn);
      k1 = k7;
      ++traj.n_steps;
      // PI controller (Hairer & Wanner, beta = 0.04).
      const double e = std::max(en, 1e-10);
      double fac = 0.9 * std::pow(e, -0.7 / 5.0) * std::pow(err_prev, 0.04);
      fac = std::clamp(fac, 0.2, 5.0);
      err_prev = e;
      h *= fac;
      const bool keep_going = observer ? observer(rec) : true;
      if (cfg.store_steps) traj.steps.push_back(std::move(rec));
      if (!keep_going) {
        traj.stopped = true;
        break;
      }
    } else {
      ++traj.n_rejected;
      h *= std::max(0.2, 0.9 * std::pow(en, -1.0 / 5.0));
    }
  }
  traj.t_end = t;
  traj.x_end = x;
  return traj;
}

}  // namespace secular
