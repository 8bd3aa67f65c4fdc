#include "secular/pcr3bp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "secular/errors.hpp"
#include "secular/matrixcore.hpp"

namespace secular::pcr3bp {

namespace {

const double kSqrt3Half = std::sqrt(3.0) / 2.0;

Eigen::Matrix4d unflatten4(const State& x) { return Eigen::Map<const Eigen::Matrix4d>(x.data() + 4); }

State pack(const RotatingState& s, const Eigen::Matrix4d& phi) {
  State x(20);
  x.head<4>() = s;
  Eigen::Map<Eigen::Matrix4d>(x.data() + 4) = phi;
  return x;
}

}  // namespace

void validate_mu(double mu) {
  if (!(mu > 0.0 && mu <= 0.5)) throw DomainError("mass ratio must lie in (0, 1/2]");
}

Potential potential(double x, double y, double mu, double collision_radius) {
  const double dx1 = x + mu, dx2 = x - 1.0 + mu;
  const double r1 = std::hypot(dx1, y), r2 = std::hypot(dx2, y);
  if (r1 < collision_radius || r2 < collision_radius) throw SingularityError("collision with a primary", 0.0);
  const double m1 = 1.0 - mu;
  const double r13 = r1 * r1 * r1, r23 = r2 * r2 * r2;
  const double r15 = r13 * r1 * r1, r25 = r23 * r2 * r2;
  Potential p;
  p.omega = 0.5 * (x * x + y * y) + m1 / r1 + mu / r2;
  p.ox = x - m1 * dx1 / r13 - mu * dx2 / r23;
  p.oy = y - m1 * y / r13 - mu * y / r23;
  const double base = 1.0 - m1 / r13 - mu / r23;
  p.oxx = base + 3.0 * m1 * dx1 * dx1 / r15 + 3.0 * mu * dx2 * dx2 / r25;
  p.oyy = base + 3.0 * m1 * y * y / r15 + 3.0 * mu * y * y / r25;
  p.oxy = 3.0 * m1 * dx1 * y / r15 + 3.0 * mu * dx2 * y / r25;
  return p;
}

RotatingState eom(const RotatingState& s, double mu, double collision_radius) {
  const Potential p = potential(s(0), s(1), mu, collision_radius);
  return {s(2), s(3), 2.0 * s(3) + p.ox, -2.0 * s(2) + p.oy};
}

double jacobi_constant(const RotatingState& s, double mu, double collision_radius) {
  return 2.0 * potential(s(0), s(1), mu, collision_radius).omega - (s(2) * s(2) + s(3) * s(3));
}

Eigen::Matrix4d variational_matrix(const RotatingState& s, double mu) {
  const Potential p = potential(s(0), s(1), mu);
  Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
  a(0, 2) = 1.0;
  a(1, 3) = 1.0;
  a(2, 0) = p.oxx;
  a(2, 1) = p.oxy;
  a(3, 0) = p.oxy;
  a(3, 1) = p.oyy;
  a(2, 3) = 2.0;
  a(3, 2) = -2.0;
  return a;
}

std::string to_string(Label l) {
  static const char* names[] = {"L1", "L2", "L3", "L4", "L5"};
  return names[static_cast<int>(l)];
}

Label parse_label(const std::string& s) {
  for (int i = 0; i < 5; ++i)
    if (s == to_string(static_cast<Label>(i))) return static_cast<Label>(i);
  throw DomainError("unknown libration point '" + s + "'");
}

RationalPolynomial collinear_polynomial(Label l, const Rational& mu) {
  const RationalPolynomial x{0, 1};
  const RationalPolynomial r1 = x + RationalPolynomial::constant(mu);
  const RationalPolynomial r2 = x + RationalPolynomial::constant(mu - 1);
  const RationalPolynomial r1s = r1 * r1, r2s = r2 * r2;
  const Rational m1 = 1 - mu;
  const RationalPolynomial lead = x * r1s * r2s;
  switch (l) {
    case Label::L1: return lead - m1 * r2s + mu * r1s;
    case Label::L2: return lead - m1 * r2s - mu * r1s;
    case Label::L3: return lead + m1 * r2s + mu * r1s;
    default: throw DomainError("collinear polynomial only exists for L1, L2, L3");
  }
}

LibrationPoint libration_point(double mu, Label l) {
  validate_mu(mu);
  if (l == Label::L4) return {l, 0.5 - mu, kSqrt3Half};
  if (l == Label::L5) return {l, 0.5 - mu, -kSqrt3Half};
  const Rational m = from_double(mu);
  const RationalPolynomial p = collinear_polynomial(l, m);
  Rational lo, hi;
  switch (l) {
    case Label::L1: lo = -m; hi = 1 - m; break;
    case Label::L2: lo = 1 - m; hi = 2 - m; break;
    default: lo = -2 - m; hi = -m; break;
  }
  const auto ivs = isolate_real_roots(p, lo, hi);
  if (ivs.size() != 1) throw InternalError("collinear segment does not hold exactly one equilibrium");
  const Rational root = refine_root(p, ivs.front(), Rational(1, 1000000000000L));
  return {l, to_double(root), 0.0};
}

std::vector<LibrationPoint> libration_points(double mu) {
  std::vector<LibrationPoint> out;
  for (int i = 0; i < 5; ++i) out.push_back(libration_point(mu, static_cast<Label>(i)));
  return out;
}

LibrationStability libration_stability(double mu, Label l) {
  LibrationStability out;
  out.point = libration_point(mu, l);
  const RotatingState s(out.point.x, out.point.y, 0.0, 0.0);
  out.jacobian = variational_matrix(s, mu);
  const Potential p = potential(s(0), s(1), mu);
  out.b = 4.0 - p.oxx - p.oyy;
  out.c = p.oxx * p.oyy - p.oxy * p.oxy;
  // u = s^2 solves u^2 + b u + c = 0.
  const std::complex<double> disc = std::sqrt(std::complex<double>(out.b * out.b - 4.0 * out.c));
  for (const auto u : {(-out.b + disc) / 2.0, (-out.b - disc) / 2.0}) {
    const auto r = std::sqrt(u);
    out.roots.push_back(r);
    out.roots.push_back(-r);
  }
  std::sort(out.roots.begin(), out.roots.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  ExactMatrix exact(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) exact(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = from_double(out.jacobian(i, j));
  out.verdict = classify_stability(exact, SystemForm::first_order);
  out.linearly_stable = out.verdict.tag == StabilityTag::bounded_oscillatory;
  return out;
}

VectorField state_field(double mu) {
  return [mu](double t, const State& x) -> State {
    try {
      return eom(x.head<4>(), mu);
    } catch (const SingularityError& e) {
      throw SingularityError(e.what(), t);
    }
  };
}

VectorField variational_field(double mu) {
  return [mu](double t, const State& x) -> State {
    const RotatingState s = x.head<4>();
    State dx(20);
    try {
      dx.head<4>() = eom(s, mu);
      Eigen::Map<Eigen::Matrix4d>(dx.data() + 4) = variational_matrix(s, mu) * unflatten4(x);
    } catch (const SingularityError& e) {
      throw SingularityError(e.what(), t);
    }
    return dx;
  };
}

VariationalResult variational_flow(const RotatingState& s0, double mu, double t, double tol) {
  validate_mu(mu);
  IntegratorConfig cfg;
  cfg.tol = tol;
  cfg.store_steps = false;
  const Trajectory tr = integrate(variational_field(mu), pack(s0, Eigen::Matrix4d::Identity()), 0.0, t, cfg);
  return {tr.x_end.head<4>(), unflatten4(tr.x_end)};
}

std::optional<Crossing> find_crossing(const VectorField& f, const State& x0, double t0, double t_max, int index,
                                      int dir, const IntegratorConfig& cfg,
                                      const std::function<bool(const StepRecord&)>& keep_going) {
  IntegratorConfig c = cfg;
  c.store_steps = false;
  std::optional<StepRecord> bracket;
  integrate(f, x0, t0, t_max, c, [&](const StepRecord& r) {
    const double y0 = r.x0(index), y1 = r.x1(index);
    const bool up = y0 < 0.0 && y1 >= 0.0;
    const bool down = y0 > 0.0 && y1 <= 0.0;
    if ((up && dir >= 0) || (down && dir <= 0)) {
      bracket = r;
      return false;
    }
    return keep_going ? keep_going(r) : true;
  });
  if (!bracket) return std::nullopt;

  // Bisection on the cubic Hermite interpolant.
  const StepRecord& r = *bracket;
  double a = r.t0, b = r.t1;
  const double sa = r.x0(index) < 0.0 ? -1.0 : 1.0;
  for (int it = 0; it < 200 && std::abs(b - a) > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
    const double m = 0.5 * (a + b);
    if (r.interpolate(m)(index) * sa > 0.0) a = m; else b = m;
  }
  double tc = 0.5 * (a + b);
  // Newton polish on accurate re-integrations from the start of the step.
  State xc = r.x0;
  for (int it = 0; it < 8; ++it) {
    xc = integrate(f, r.x0, r.t0, tc, c).x_end;
    const double y = xc(index);
    if (std::abs(y) <= 1e-12) break;
    const double dy = f(tc, xc)(index);
    if (dy == 0.0) break;
    tc -= y / dy;
  }
  return Crossing{tc, xc};
}

OrbitGuess lyapunov_seed(double mu, Label l, double amplitude) {
  if (l == Label::L4 || l == Label::L5) throw DomainError("Lyapunov seeds exist only at collinear points");
  const LibrationStability st = libration_stability(mu, l);
  double omega = 0.0;
  for (const auto& r : st.roots)
    if (std::abs(r.real()) < 1e-12 && r.imag() > 0) omega = r.imag();
  if (omega == 0.0) throw InternalError("collinear point without a center direction");
  const Potential p = potential(st.point.x, 0.0, mu);
  OrbitGuess g;
  g.x0 = st.point.x + amplitude;
  g.vy0 = -amplitude * (omega * omega + p.oxx) / 2.0;
  g.half_period = std::numbers::pi / omega;
  return g;
}

std::vector<OrbitSample> propagate(const RotatingState& s0, double mu, double t, int samples, double tol) {
  validate_mu(mu);
  if (samples < 1) throw DomainError("need at least one sample interval");
  IntegratorConfig cfg;
  cfg.tol = tol;
  cfg.store_steps = false;
  std::vector<OrbitSample> out{{0.0, s0, jacobi_constant(s0, mu)}};
  State x = s0;
  for (int i = 1; i <= samples; ++i) {
    const double t0 = t * (i - 1) / samples, t1 = t * i / samples;
    x = integrate(state_field(mu), x, t0, t1, cfg).x_end;
    out.push_back({t1, x.head<4>(), jacobi_constant(x.head<4>(), mu)});
  }
  return out;
}

OrbitRecord correct_periodic(const OrbitGuess& guess, double mu, const CorrectionConfig& cfg) {
  validate_mu(mu);
  IntegratorConfig icfg;
  icfg.tol = cfg.integrator_tol;
  double vy0 = guess.vy0;
  const int dir = vy0 > 0 ? -1 : 1;  // the next x-axis crossing goes the other way
  const double t_max = std::max(4.0 * guess.half_period, 1.0);

  double best_res = INFINITY, best_vy = vy0;
  auto fail = [&](const std::string& why) -> NonConvergenceError {
    std::ostringstream o;
    o.precision(17);
    o << why << "; best iterate x0=" << guess.x0 << " vy0=" << best_vy << " |vx|=" << best_res;
    return NonConvergenceError(o.str());
  };

  OrbitRecord rec;
  rec.mu = mu;
  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    const RotatingState s0(guess.x0, 0.0, 0.0, vy0);
    std::optional<Crossing> cr;
    try {
      cr = find_crossing(variational_field(mu), pack(s0, Eigen::Matrix4d::Identity()), 0.0, t_max, 1, dir, icfg);
    } catch (const SingularityError& e) {
      throw fail(std::string("trajectory hit a singularity: ") + e.what());
    }
    if (!cr) throw fail("no x-axis crossing within the time budget");
    const RotatingState sf = cr->x.head<4>();
    const Eigen::Matrix4d phi = unflatten4(cr->x);
    const double vx = sf(2);
    if (std::abs(vx) < best_res) {
      best_res = std::abs(vx);
      best_vy = vy0;
    }
    if (std::abs(vx) <= cfg.tol) {
      rec.initial = s0;
      rec.period = 2.0 * cr->t;
      rec.iterations = iter;
      rec.crossing_residual = std::abs(vx);
      break;
    }
    const RotatingState fs = eom(sf, mu);
    const double denom = phi(2, 3) - fs(2) / fs(1) * phi(1, 3);
    if (!(std::abs(denom) >= 1e-12)) throw DegenerateError("singular correction derivative (family bifurcation?)");
    vy0 -= vx / denom;
    if (!std::isfinite(vy0)) throw fail("correction diverged");
    if (iter == cfg.max_iter) throw fail("maximum iterations reached");
  }

  rec.jacobi = jacobi_constant(rec.initial, mu);
  const VariationalResult full = variational_flow(rec.initial, mu, rec.period, cfg.integrator_tol);
  rec.monodromy = full.stm;
  rec.closure_residual = (full.state - rec.initial).norm();
  rec.samples = propagate(rec.initial, mu, rec.period, cfg.samples, cfg.integrator_tol);
  for (const auto& s : rec.samples) rec.jacobi_drift = std::max(rec.jacobi_drift, std::abs(s.jacobi - rec.jacobi));
  return rec;
}

OrbitExponentReport orbit_exponents(const OrbitRecord& orbit, double unit_scale, double reciprocal_tol,
                                    double det_tol) {
  OrbitExponentReport rep;
  Eigen::EigenSolver<Eigen::Matrix4d> es(orbit.monodromy, false);
  std::vector<std::complex<double>> s(es.eigenvalues().data(), es.eigenvalues().data() + 4);
  for (const auto& v : s) rep.lambda = std::max(rep.lambda, std::abs(v));
  rep.unit_cluster_tol = unit_scale * std::max(1.0, rep.lambda);

  // Unit pair: the two multipliers closest to 1; the other two form the nontrivial pair.
  std::sort(s.begin(), s.end(), [](auto a, auto b) { return std::abs(a - 1.0) < std::abs(b - 1.0); });
  rep.unit_deviation = std::max(std::abs(s[0] - 1.0), std::abs(s[1] - 1.0));
  rep.unit_multiplicity = 0;
  for (const auto& v : s)
    if (std::abs(v - 1.0) <= rep.unit_cluster_tol) ++rep.unit_multiplicity;
  rep.unit_pair_ok = rep.unit_multiplicity == 2;
  rep.nontrivial[0] = std::abs(s[2]) >= std::abs(s[3]) ? s[2] : s[3];
  rep.nontrivial[1] = std::abs(s[2]) >= std::abs(s[3]) ? s[3] : s[2];
  rep.reciprocal_error = std::abs(s[2] * s[3] - 1.0);
  rep.reciprocal_ok = rep.reciprocal_error <= reciprocal_tol;
  rep.det_error = std::abs(s[0] * s[1] * s[2] * s[3] - 1.0);
  rep.det_ok = rep.det_error <= det_tol && std::abs(orbit.monodromy.determinant() - 1.0) <= det_tol;

  // Cluster relative to max(1, max|s|) = Lambda, which scales the unit-pair radius as documented.
  rep.exponents = characteristic_exponents(orbit.monodromy, orbit.period, unit_scale);
  rep.verdict = classify_periodic_stability(rep.exponents);
  if (!rep.unit_pair_ok) rep.flags.push_back("unit multiplier multiplicity is not 2");
  if (!rep.reciprocal_ok) rep.flags.push_back("nontrivial pair not reciprocal");
  if (!rep.det_ok) rep.flags.push_back("determinant differs from 1");
  return rep;
}

}  // namespace secular::pcr3bp
