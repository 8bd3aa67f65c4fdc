#include "secular/floquet.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>

#include "secular/errors.hpp"

namespace secular {

namespace {

using cd = std::complex<double>;

State flatten(const Eigen::MatrixXd& m) { return Eigen::Map<const State>(m.data(), m.size()); }

Eigen::MatrixXd unflatten(const State& x, Eigen::Index n) { return Eigen::Map<const Eigen::MatrixXd>(x.data(), n, n); }

VectorField matrix_field(const PeriodicLinearSystem& sys) {
  const Eigen::Index n = sys.dim;
  return [&sys, n](double t, const State& x) -> State {
    return flatten(sys.a(t) * unflatten(x, n));
  };
}

}  // namespace

void check_periodicity(const PeriodicLinearSystem& sys, double rel_tol) {
  if (!(sys.period > 0)) throw DomainError("period must be positive");
  if (!sys.a) throw DomainError("coefficient callable is empty");
  for (int k = 0; k < 5; ++k) {
    const double t = sys.period * (0.137 + 0.173 * k);
    const Eigen::MatrixXd a0 = sys.a(t), a1 = sys.a(t + sys.period);
    if (a0.rows() != sys.dim || a0.cols() != sys.dim) throw DomainError("coefficient matrix has the wrong shape");
    if ((a1 - a0).norm() > rel_tol * std::max(1.0, a0.norm()))
      throw DomainError("coefficient matrix is not periodic with the stated period");
  }
}

Eigen::MatrixXd fundamental_matrix(const PeriodicLinearSystem& sys, double t, const IntegratorConfig& cfg) {
  IntegratorConfig c = cfg;
  c.store_steps = false;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(sys.dim, sys.dim);
  const Trajectory tr = integrate(matrix_field(sys), flatten(id), 0.0, t, c);
  return unflatten(tr.x_end, sys.dim);
}

Monodromy monodromy(const PeriodicLinearSystem& sys, double tol) {
  check_periodicity(sys);
  IntegratorConfig cfg;
  cfg.tol = tol;
  return {fundamental_matrix(sys, sys.period, cfg), sys.period, cfg};
}

cd principal_exponent(cd s, double period) {
  double arg = std::arg(s);
  if (arg <= -std::numbers::pi) arg = std::numbers::pi;
  return cd(std::log(std::abs(s)), arg) / period;
}

ExponentSet characteristic_exponents(const Eigen::MatrixXd& m, double period, double cluster_tol) {
  if (m.rows() != m.cols()) throw DomainError("monodromy must be square");
  if (!(period > 0)) throw DomainError("period must be positive");
  NumericJordanOptions opts;
  opts.cluster_tol = cluster_tol;
  opts.rank_tol = std::max(opts.rank_tol, cluster_tol);
  const NumericJordan jf = jordan_form(ComplexMatrix(m.cast<cd>()), opts);
  const double scale = std::max(1.0, m.norm());
  ExponentSet out;
  out.period = period;
  out.blocks = jf.blocks;
  out.transform = jf.transform;
  out.ill_conditioned = jf.ill_conditioned;
  out.warnings = jf.warnings;
  std::vector<std::pair<cd, cd>> pairs;
  for (const auto& b : jf.blocks) {
    if (std::abs(b.eigenvalue) <= 1e-14 * scale) throw DegenerateError("monodromy has a zero multiplier");
    for (int k = 0; k < b.algebraic; ++k) pairs.emplace_back(principal_exponent(b.eigenvalue, period), b.eigenvalue);
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
    if (x.first.real() != y.first.real()) return x.first.real() < y.first.real();
    return x.first.imag() < y.first.imag();
  });
  for (const auto& [alpha, s] : pairs) {
    out.exponents.push_back(alpha);
    out.multipliers.push_back(s);
  }
  return out;
}

ExponentSet characteristic_exponents(const Monodromy& m, double cluster_tol) {
  return characteristic_exponents(m.m, m.period, cluster_tol);
}

StabilityVerdict classify_periodic_stability(const ExponentSet& exps, double band) {
  StabilityVerdict v;
  std::vector<StabilityWitness> unstable, secular, boundary;
  bool all_inside = true;
  bool strict = true;
  for (const auto& b : exps.blocks) {
    const double r = std::abs(b.eigenvalue);
    const cd alpha = principal_exponent(b.eigenvalue, exps.period);
    const int block = b.sizes.empty() ? 1 : b.sizes.front();
    if (b.algebraic > 1) strict = false;
    if (r > 1.0 + band) {
      unstable.push_back({alpha, block});
      all_inside = false;
      strict = false;
    } else if (r >= 1.0 - band) {
      v.marginal = true;
      all_inside = false;
      (block > 1 ? secular : boundary).push_back({alpha, block});
    }
  }
  v.lagrange_strict = strict && unstable.empty();
  if (!unstable.empty()) {
    v.tag = StabilityTag::exponentially_unstable;
    v.witnesses = unstable;
  } else if (!secular.empty()) {
    v.tag = StabilityTag::secular_polynomial_growth;
    v.witnesses = secular;
  } else if (all_inside) {
    v.tag = StabilityTag::decaying;
  } else {
    v.tag = StabilityTag::bounded_oscillatory;
    v.witnesses = boundary;
  }
  return v;
}

FloquetSolution floquet_solution(const PeriodicLinearSystem& sys, const Eigen::VectorXd& x0, const ExponentSet& exps,
                                 int n_periods, int samples_per_period, double tol) {
  check_periodicity(sys);
  const Eigen::Index n = sys.dim;
  if (x0.size() != n) throw DomainError("initial condition has the wrong dimension");
  if (n_periods < 1 || samples_per_period < 1) throw DomainError("need at least one period and one sample");
  for (const auto& b : exps.blocks)
    if (b.algebraic > 1) throw UnsupportedError("clustered multipliers; see the exponent block report");
  if (exps.transform.rows() != n) throw DomainError("exponent set does not match the system");

  const double T = exps.period;
  std::vector<cd> alpha;
  for (const auto& b : exps.blocks) alpha.push_back(principal_exponent(b.eigenvalue, T));
  const ComplexMatrix& v = exps.transform;

  FloquetSolution out;
  out.exponents = alpha;
  out.amplitudes = v.fullPivLu().solve(x0.cast<cd>());

  IntegratorConfig cfg;
  cfg.tol = tol;
  cfg.store_steps = false;
  const int total = n_periods * samples_per_period;
  const double dt = T / samples_per_period;
  Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(n, n);
  std::vector<Eigen::MatrixXd> phis{phi};
  for (int i = 1; i <= total; ++i) {
    const Trajectory tr = integrate(matrix_field(sys), flatten(phi), (i - 1) * dt, i * dt, cfg);
    phi = unflatten(tr.x_end, n);
    phis.push_back(phi);
  }

  double recon = 0.0;
  for (int i = 0; i <= total; ++i) {
    const double t = i * dt;
    out.times.push_back(t);
    const Eigen::VectorXd x = phis[static_cast<std::size_t>(i)] * x0;
    out.states.push_back(x);
    ComplexMatrix p = phis[static_cast<std::size_t>(i)].cast<cd>() * v;
    for (Eigen::Index j = 0; j < n; ++j) p.col(j) *= std::exp(-alpha[static_cast<std::size_t>(j)] * t);
    ComplexVector sum = ComplexVector::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) sum += out.amplitudes(j) * std::exp(alpha[static_cast<std::size_t>(j)] * t) * p.col(j);
    recon = std::max(recon, (sum - x.cast<cd>()).norm() / std::max(1.0, x.norm()));
    out.periodic_factors.push_back(std::move(p));
  }
  out.reconstruction_residual = recon;

  double res = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double scale = 0.0;
    for (const auto& p : out.periodic_factors) scale = std::max(scale, p.col(j).norm());
    for (int i = 0; i + samples_per_period <= total; ++i) {
      const auto& a = out.periodic_factors[static_cast<std::size_t>(i)];
      const auto& b = out.periodic_factors[static_cast<std::size_t>(i + samples_per_period)];
      res = std::max(res, (b.col(j) - a.col(j)).norm() / std::max(scale, 1e-300));
    }
  }
  out.periodicity_residual = res;
  return out;
}

PeriodicLinearSystem hill_system(double a, double q) {
  PeriodicLinearSystem sys;
  sys.dim = 2;
  sys.period = std::numbers::pi;
  sys.a = [a, q](double t) {
    Eigen::MatrixXd m(2, 2);
    m << 0.0, 1.0, -(a - 2.0 * q * std::cos(2.0 * t)), 0.0;
    return m;
  };
  return sys;
}

std::vector<HillSweepRow> hill_sweep(const std::vector<double>& a_values, const std::vector<double>& q_values,
                                     double tol, int threads) {
  const std::size_t total = a_values.size() * q_values.size();
  std::vector<HillSweepRow> rows(total);
  if (threads <= 0) {
    if (const char* env = std::getenv("SECULAR_THREADS")) threads = std::atoi(env);
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), std::max<std::size_t>(total, 1)));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < total && !failed; i = next++) {
      try {
        HillSweepRow row;
        row.a = a_values[i / q_values.size()];
        row.q = q_values[i % q_values.size()];
        const auto sys = hill_system(row.a, row.q);
        const auto exps = characteristic_exponents(monodromy(sys, tol));
        for (const auto& s : exps.multipliers) row.max_modulus = std::max(row.max_modulus, std::abs(s));
        row.verdict = classify_periodic_stability(exps);
        rows[i] = std::move(row);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

}  // namespace secular
