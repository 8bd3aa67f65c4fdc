#include "secular/section.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <thread>

#include "secular/errors.hpp"

namespace secular::section {

namespace {

using cd = std::complex<double>;

struct Step {
  SectionPoint point;
  Truncation reason = Truncation::none;
  std::string message;
};

Step advance(const SectionPoint& p, double mu, const SectionDef& sd, const SectionConfig& cfg, bool inverse) {
  const RotatingState s0 = lift(p, mu, sd);
  IntegratorConfig icfg;
  icfg.tol = cfg.integrator_tol;
  bool escaped = false;
  auto keep_going = [&](const StepRecord& r) {
    if (r.x1.head<2>().norm() > cfg.escape_radius) {
      escaped = true;
      return false;
    }
    return true;
  };
  // Backward in time the crossing runs the other way through y = 0.
  const int dir = inverse ? -sd.direction : sd.direction;
  const double t_max = inverse ? -cfg.max_time : cfg.max_time;
  std::optional<pcr3bp::Crossing> cr;
  try {
    cr = pcr3bp::find_crossing(pcr3bp::state_field(mu), State(s0), 0.0, t_max, 1, dir, icfg, keep_going);
  } catch (const SingularityError& e) {
    std::ostringstream os;
    os << "collision at t=" << e.time() << " from (" << p.x << ", " << p.vx << ")";
    return {{}, Truncation::collision, os.str()};
  }
  if (!cr) {
    std::ostringstream os;
    os << (escaped ? "escape beyond radius " : "no section crossing within time ")
       << (escaped ? cfg.escape_radius : cfg.max_time) << " from (" << p.x << ", " << p.vx << ")";
    return {{}, escaped ? Truncation::escape : Truncation::timeout, os.str()};
  }
  return {{cr->x(0), cr->x(2)}, Truncation::none, {}};
}

SectionPoint checked(const Step& s) {
  switch (s.reason) {
    case Truncation::none:
      return s.point;
    case Truncation::collision:
      throw SingularityError(s.message, 0.0);
    default:
      throw NonConvergenceError(s.message);
  }
}

bool lift_ok(const SectionPoint& p, double mu, const SectionDef& sd) {
  try {
    lift(p, mu, sd);
    return true;
  } catch (const DomainError&) {
    return false;
  }
}

Eigen::Vector2d vec(const SectionPoint& p) { return {p.x, p.vx}; }
SectionPoint pt(const Eigen::Vector2d& v) { return {v(0), v(1)}; }

Eigen::Matrix2d stm_jacobian(const SectionPoint& p, double mu, const SectionDef& sd, const SectionConfig& cfg) {
  const RotatingState s0 = lift(p, mu, sd);
  const pcr3bp::Potential pot = pcr3bp::potential(s0(0), 0.0, mu);
  IntegratorConfig icfg;
  icfg.tol = cfg.integrator_tol;
  State x0(20);
  x0.head<4>() = s0;
  Eigen::Map<Eigen::Matrix4d>(x0.data() + 4).setIdentity();
  std::optional<pcr3bp::Crossing> cr;
  try {
    cr = pcr3bp::find_crossing(pcr3bp::variational_field(mu), x0, 0.0, cfg.max_time, 1, sd.direction, icfg);
  } catch (const SingularityError& e) {
    throw SingularityError(std::string("collision while linearizing the map: ") + e.what(), e.time());
  }
  if (!cr) throw NonConvergenceError("no section crossing while linearizing the map");
  const RotatingState sf = cr->x.head<4>();
  const Eigen::Matrix4d phi = Eigen::Map<const Eigen::Matrix4d>(cr->x.data() + 4);
  const RotatingState ff = pcr3bp::eom(sf, mu);

  // Initial perturbations (dx, 0, dvx, dvy) tangent to the energy surface.
  Eigen::Matrix<double, 4, 2> d0 = Eigen::Matrix<double, 4, 2>::Zero();
  d0(0, 0) = 1.0;
  d0(3, 0) = pot.ox / s0(3);
  d0(2, 1) = 1.0;
  d0(3, 1) = -s0(2) / s0(3);
  const Eigen::Matrix<double, 4, 2> d1 = phi * d0;
  Eigen::Matrix2d j;
  for (int c = 0; c < 2; ++c) {
    const double dtau = -d1(1, c) / ff(1);
    j(0, c) = d1(0, c) + ff(0) * dtau;
    j(1, c) = d1(2, c) + ff(2) * dtau;
  }
  return j;
}

Eigen::Matrix2d fd_jacobian(const SectionPoint& p, double mu, const SectionDef& sd, const SectionConfig& cfg) {
  auto central = [&](double h) {
    Eigen::Matrix2d d;
    for (int c = 0; c < 2; ++c) {
      Eigen::Vector2d e = Eigen::Vector2d::Zero();
      e(c) = h;
      const Eigen::Vector2d fp = vec(return_map(pt(vec(p) + e), mu, sd, cfg));
      const Eigen::Vector2d fm = vec(return_map(pt(vec(p) - e), mu, sd, cfg));
      d.col(c) = (fp - fm) / (2.0 * h);
    }
    return d;
  };
  const double h = cfg.fd_step;
  return (4.0 * central(h / 2.0) - central(h)) / 3.0;
}

int thread_count(std::size_t work) {
  int threads = 0;
  if (const char* env = std::getenv("SECULAR_THREADS")) threads = std::atoi(env);
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), std::max<std::size_t>(work, 1)));
}

template <class F>
void parallel_for(std::size_t n, F&& body) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) body(i);
  };
  std::vector<std::thread> pool;
  for (int k = 1; k < thread_count(n); ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a(0) * b(1) - a(1) * b(0); }

}  // namespace

std::string to_string(Truncation t) {
  switch (t) {
    case Truncation::none: return "none";
    case Truncation::escape: return "escape";
    case Truncation::collision: return "collision";
    case Truncation::timeout: return "timeout";
  }
  return "?";
}

std::string to_string(MapType t) {
  switch (t) {
    case MapType::elliptic: return "elliptic";
    case MapType::hyperbolic: return "hyperbolic";
    case MapType::marginal: return "marginal";
  }
  return "?";
}

std::string to_string(Branch b) {
  switch (b) {
    case Branch::unstable_plus: return "unstable+";
    case Branch::unstable_minus: return "unstable-";
    case Branch::stable_plus: return "stable+";
    case Branch::stable_minus: return "stable-";
  }
  return "?";
}

RotatingState lift(const SectionPoint& p, double mu, const SectionDef& sd) {
  pcr3bp::validate_mu(mu);
  if (sd.direction != 1 && sd.direction != -1) throw DomainError("section direction must be +1 or -1");
  if (!std::isfinite(p.x) || !std::isfinite(p.vx)) throw DomainError("section point is not finite");
  const pcr3bp::Potential pot = pcr3bp::potential(p.x, 0.0, mu);
  const double vy2 = 2.0 * pot.omega - p.vx * p.vx - sd.jacobi;
  if (!(vy2 > 0.0)) {
    std::ostringstream os;
    os << "section point (" << p.x << ", " << p.vx << ") is energetically forbidden at C=" << sd.jacobi
       << " (vy^2=" << vy2 << ")";
    throw DomainError(os.str());
  }
  return {p.x, 0.0, p.vx, sd.direction * std::sqrt(vy2)};
}

SectionPoint return_map(const SectionPoint& p, double mu, const SectionDef& sd, const SectionConfig& cfg,
                        bool inverse) {
  return checked(advance(p, mu, sd, cfg, inverse));
}

CrossingSequence section_crossings(const SectionPoint& start, double mu, const SectionDef& sd, int n,
                                   const SectionConfig& cfg) {
  if (n < 0) throw DomainError("number of crossings must be non-negative");
  lift(start, mu, sd);
  CrossingSequence out;
  SectionPoint p = start;
  for (int i = 0; i < n; ++i) {
    const Step s = advance(p, mu, sd, cfg, false);
    if (s.reason != Truncation::none) {
      out.reason = s.reason;
      break;
    }
    p = s.point;
    out.points.push_back(p);
  }
  return out;
}

MapLinearization linearize_map(const SectionPoint& p, double mu, const SectionDef& sd, const SectionConfig& cfg,
                               JacobianMethod method, double band) {
  MapLinearization out;
  out.method = method;
  out.jacobian = method == JacobianMethod::stm ? stm_jacobian(p, mu, sd, cfg) : fd_jacobian(p, mu, sd, cfg);
  out.det = out.jacobian.determinant();
  const double tr = out.jacobian.trace();
  const cd disc = std::sqrt(cd(tr * tr / 4.0 - out.det));
  cd l1 = tr / 2.0 + disc, l2 = tr / 2.0 - disc;
  if (std::abs(l2) > std::abs(l1)) std::swap(l1, l2);
  out.eigenvalues[0] = l1;
  out.eigenvalues[1] = l2;
  auto near = [band](cd l, double target) { return std::abs(l - target) <= band; };
  if ((near(l1, 1.0) && near(l2, 1.0)) || (near(l1, -1.0) && near(l2, -1.0)))
    out.type = MapType::marginal;
  else if (disc.real() == 0.0 && disc.imag() != 0.0)
    out.type = MapType::elliptic;
  else if (std::abs(l1) > 1.0 + band)
    out.type = MapType::hyperbolic;
  else
    out.type = MapType::marginal;
  return out;
}

FixedPointResult fixed_point(const SectionPoint& guess, double mu, const SectionDef& sd, double tol,
                             const SectionConfig& cfg, int max_iter) {
  if (!(tol > 0)) throw DomainError("tolerance must be positive");
  auto residual = [&](const Eigen::Vector2d& q) -> std::optional<Eigen::Vector2d> {
    const Step s = lift_ok(pt(q), mu, sd) ? advance(pt(q), mu, sd, cfg, false) : Step{{}, Truncation::escape, {}};
    if (s.reason != Truncation::none) return std::nullopt;
    return vec(s.point) - q;
  };
  Eigen::Vector2d p = vec(guess);
  auto r = residual(p);
  if (!r) throw NonConvergenceError("fixed-point seed has no return to the section");
  for (int iter = 0;; ++iter) {
    const double res = r->norm();
    if (res <= tol) return {pt(p), res, iter};
    if (iter == max_iter) {
      std::ostringstream os;
      os << "fixed-point iteration ran out of iterations at (" << p(0) << ", " << p(1) << ") with residual " << res;
      throw NonConvergenceError(os.str());
    }
    const Eigen::Matrix2d a = stm_jacobian(pt(p), mu, sd, cfg) - Eigen::Matrix2d::Identity();
    if (std::abs(a.determinant()) < 1e-12) throw DegenerateError("I - J is singular at the iterate (parabolic point)");
    const Eigen::Vector2d step = -a.inverse() * *r;
    // Backtrack until the residual decreases; the map is strongly nonlinear
    // along the unstable direction.
    bool accepted = false;
    for (double alpha = 1.0; alpha >= 1.0 / 1024; alpha /= 2) {
      const Eigen::Vector2d q = p + alpha * step;
      const auto rq = residual(q);
      if (rq && rq->norm() < res) {
        p = q;
        r = rq;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      std::ostringstream os;
      os << "fixed-point iteration diverged at (" << p(0) << ", " << p(1) << ") with residual " << res;
      throw NonConvergenceError(os.str());
    }
  }
}

ManifoldPolyline manifold_segment(const SectionPoint& fixed, double mu, const SectionDef& sd, Branch branch,
                                  const ManifoldConfig& mcfg, const SectionConfig& cfg) {
  if (mcfg.steps < 0 || mcfg.seeds < 1 || !(mcfg.seed_offset > 0))
    throw DomainError("manifold budget must have steps >= 0, seeds >= 1 and a positive offset");
  const MapLinearization lin = linearize_map(fixed, mu, sd, cfg);
  if (lin.type != MapType::hyperbolic) throw DomainError("manifolds need a hyperbolic fixed point, got " + to_string(lin.type));
  const bool stable = branch == Branch::stable_plus || branch == Branch::stable_minus;
  const bool minus = branch == Branch::unstable_minus || branch == Branch::stable_minus;
  const double lambda = (stable ? lin.eigenvalues[1] : lin.eigenvalues[0]).real();

  Eigen::Vector2d v = (lin.jacobian - lambda * Eigen::Matrix2d::Identity()).fullPivLu().kernel().col(0).normalized();
  if (v(0) < 0 || (v(0) == 0 && v(1) < 0)) v = -v;
  if (minus) v = -v;

  ManifoldPolyline out;
  out.branch = branch;
  out.direction = v;
  out.eigenvalue = stable ? lin.eigenvalues[1] : lin.eigenvalues[0];

  // A reflection-hyperbolic point flips sides each iterate; the fundamental
  // domain of one branch is then spanned by the square of the map.
  const int per = lambda < 0 ? 2 : 1;
  const double stretch = std::pow(std::abs(lambda), stable ? -per : per);
  std::vector<SectionPoint> row(static_cast<std::size_t>(mcfg.seeds));
  for (int k = 0; k < mcfg.seeds; ++k)
    row[static_cast<std::size_t>(k)] =
        pt(vec(fixed) + mcfg.seed_offset * std::pow(stretch, static_cast<double>(k) / mcfg.seeds) * v);
  out.points = row;

  std::vector<Step> next(row.size());
  for (int j = 0; j < mcfg.steps; ++j) {
    parallel_for(row.size(), [&](std::size_t i) {
      Step s{row[i], Truncation::none, {}};
      for (int q = 0; q < per && s.reason == Truncation::none; ++q) {
        try {
          s = advance(s.point, mu, sd, cfg, stable);
        } catch (const DomainError& e) {
          s = {{}, Truncation::escape, e.what()};
        }
      }
      next[i] = std::move(s);
    });
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (next[i].reason != Truncation::none) {
        out.reason = next[i].reason;
        return out;
      }
      row[i] = next[i].point;
      out.points.push_back(row[i]);
    }
  }
  return out;
}

HomoclinicReport find_homoclinic(const ManifoldPolyline& unstable, const ManifoldPolyline& stable, double max_segment) {
  HomoclinicReport rep;
  const auto& u = unstable.points;
  const auto& s = stable.points;
  if (u.size() < 2 || s.size() < 2) return rep;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const Eigen::Vector2d a0 = vec(u[i]), a1 = vec(u[i + 1]);
    const Eigen::Vector2d da = a1 - a0;
    if (da.norm() > max_segment || da.norm() == 0.0) continue;
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      const Eigen::Vector2d b0 = vec(s[k]), b1 = vec(s[k + 1]);
      const Eigen::Vector2d db = b1 - b0;
      if (db.norm() > max_segment || db.norm() == 0.0) continue;
      const double den = cross(da, db);
      if (den == 0.0) continue;
      const double ta = cross(b0 - a0, db) / den;
      const double tb = cross(b0 - a0, da) / den;
      if (ta < 0.0 || ta > 1.0 || tb < 0.0 || tb > 1.0) continue;
      rep.found = true;
      rep.point = pt(a0 + ta * da);
      rep.unstable_index = i;
      rep.stable_index = k;
      const double c = std::abs(da.dot(db)) / (da.norm() * db.norm());
      rep.angle = std::acos(std::min(1.0, c));
      return rep;
    }
  }
  return rep;
}

}  // namespace secular::section
