#include "secular/linode.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <optional>

#include "secular/errors.hpp"
#include "secular/matrixcore.hpp"

namespace secular {

namespace {

using cd = std::complex<double>;

struct NumericRoot {
  cd value;
  int re_sign = 0;
};

// f(i w) = R(w) + i I(w) for real w.
std::pair<RationalPolynomial, RationalPolynomial> split_on_imaginary_axis(const RationalPolynomial& f) {
  std::vector<Rational> re(f.coeffs().size()), im(f.coeffs().size());
  for (std::size_t k = 0; k < f.coeffs().size(); ++k) {
    const Rational& a = f.coeffs()[k];
    switch (k % 4) {
      case 0: re[k] = a; break;
      case 1: im[k] = a; break;
      case 2: re[k] = -a; break;
      default: im[k] = -a; break;
    }
  }
  return {RationalPolynomial(re), RationalPolynomial(im)};
}

double refined(const RationalPolynomial& f, const RootInterval& iv) {
  static const Rational tol = Rational(1, Integer(1) << 60);
  return to_double(refine_root(f, iv, tol));
}

// Roots of a square-free rational polynomial in double precision, with the
// sign of each real part decided exactly: real roots and the positions of
// imaginary-axis roots come from Sturm isolation.
std::vector<NumericRoot> numeric_roots(const RationalPolynomial& f) {
  const int d = f.degree();
  std::vector<NumericRoot> out;
  if (d <= 0) return out;

  for (const auto& iv : isolate_real_roots(f)) {
    NumericRoot r;
    if (f(0) == 0 && iv.lo < 0 && iv.hi >= 0) {
      r.value = 0.0;
      r.re_sign = 0;
    } else {
      r.value = refined(f, iv);
      // (lo, 0] only isolates this root when the interval straddles zero.
      if (iv.hi <= 0) r.re_sign = -1;
      else if (iv.lo >= 0) r.re_sign = 1;
      else r.re_sign = count_real_roots(f, iv.lo, Rational(0)) == 1 ? -1 : 1;
    }
    out.push_back(r);
  }
  const int n_pairs = (d - static_cast<int>(out.size())) / 2;
  if (n_pairs > 0) {
    // Nonzero imaginary-axis roots: positive real roots w of gcd(R, I).
    const auto [re, im] = split_on_imaginary_axis(f);
    const RationalPolynomial g = gcd(re, im);
    std::vector<double> axis;
    if (g.degree() > 0)
      for (const auto& iv : isolate_real_roots(g, Rational(0), cauchy_bound(g)))
        axis.push_back(refined(g, iv));

    const RationalPolynomial m = f.monic();
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
    for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) comp(i, d - 1) = -to_double(m.coeff(static_cast<std::size_t>(i)));
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    std::vector<cd> ev(es.eigenvalues().data(), es.eigenvalues().data() + d);
    std::sort(ev.begin(), ev.end(), [](cd a, cd b) { return a.imag() > b.imag(); });
    const RationalPolynomial df = f.derivative();
    std::vector<cd> upper;
    for (int k = 0; k < n_pairs; ++k) {
      cd z = ev[static_cast<std::size_t>(k)];
      for (int it = 0; it < 4; ++it) {
        const cd fz = f.evaluate(z), dz = df.evaluate(z);
        if (dz == 0.0) break;
        z -= fz / dz;
      }
      upper.push_back(z);
    }
    // The roots closest to the axis are the axis roots, pinned exactly.
    std::vector<std::size_t> order(upper.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::abs(upper[a].real()) < std::abs(upper[b].real()); });
    std::vector<bool> on_axis(upper.size(), false);
    for (std::size_t k = 0; k < axis.size() && k < order.size(); ++k) on_axis[order[k]] = true;
    std::vector<bool> used(axis.size(), false);
    for (std::size_t i = 0; i < upper.size(); ++i) {
      NumericRoot r;
      if (on_axis[i]) {
        std::size_t best = 0;
        double dist = INFINITY;
        for (std::size_t j = 0; j < axis.size(); ++j)
          if (!used[j] && std::abs(axis[j] - upper[i].imag()) < dist) dist = std::abs(axis[j] - upper[i].imag()), best = j;
        used[best] = true;
        r.value = cd(0.0, axis[best]);
        r.re_sign = 0;
      } else {
        r.value = upper[i];
        r.re_sign = upper[i].real() > 0 ? 1 : -1;
      }
      out.push_back(r);
      out.push_back({std::conj(r.value), r.re_sign});
    }
  }
  std::sort(out.begin(), out.end(), [](const NumericRoot& a, const NumericRoot& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  return out;
}

struct SpectralPoint {
  NumericRoot root;
  int multiplicity = 1;
  std::optional<Rational> exact;  // set when the eigenvalue is rational
};

std::vector<SpectralPoint> spectrum_of(const RationalPolynomial& cp) {
  std::vector<SpectralPoint> out;
  for (const auto& f : square_free_decomposition(cp)) {
    const auto rat = rational_roots(f.factor);
    for (const auto& r : numeric_roots(f.factor)) {
      SpectralPoint p{r, f.multiplicity, std::nullopt};
      if (r.value.imag() == 0.0)
        for (const auto& q : rat)
          if (std::abs(to_double(q) - r.value.real()) <= 1e-9 * std::max(1.0, std::abs(r.value.real()))) p.exact = q;
      out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end(), [](const SpectralPoint& a, const SpectralPoint& b) {
    if (a.root.value.real() != b.root.value.real()) return a.root.value.real() < b.root.value.real();
    return a.root.value.imag() < b.root.value.imag();
  });
  return out;
}

ComplexVector to_complex(const ExactVector& v) {
  ComplexVector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = to_double(v[i]);
  return out;
}

bool term_less(const SolutionTerm& a, const SolutionTerm& b) {
  if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
  if (a.lambda.imag() != b.lambda.imag()) return a.lambda.imag() < b.lambda.imag();
  return a.degree() < b.degree();
}

// Drops numerically vanishing trailing coefficients and empty terms.
void trim_numeric(LinearSolution& sol, double rel) {
  double scale = 0.0;
  for (const auto& t : sol.terms)
    for (const auto& c : t.coeffs) scale = std::max(scale, c.norm());
  const double cut = rel * scale;
  std::vector<SolutionTerm> kept;
  for (auto& t : sol.terms) {
    while (!t.coeffs.empty() && t.coeffs.back().norm() <= cut) t.coeffs.pop_back();
    if (!t.coeffs.empty()) kept.push_back(std::move(t));
  }
  sol.terms = std::move(kept);
  std::sort(sol.terms.begin(), sol.terms.end(), term_less);
}

constexpr double kNumericTrim = 1e-11;

LinearSolution from_exact_jordan(const ExactJordan& jf, const ExactVector& x0) {
  const std::size_t n = jf.jordan.rows();
  const ExactVector c = inverse(jf.transform) * x0;
  LinearSolution sol;
  sol.dim = n;
  std::size_t col = 0;
  for (const auto& blk : jf.blocks) {
    std::vector<ExactVector> coeffs;
    for (int size : blk.sizes) {
      const auto s = static_cast<std::size_t>(size);
      if (coeffs.size() < s) coeffs.resize(s, ExactVector(n));
      Rational fact = 1;
      for (std::size_t k = 0; k < s; ++k) {
        if (k > 0) fact *= static_cast<long>(k);
        for (std::size_t i = 0; i + k < s; ++i) {
          const Rational w = c[col + i + k] / fact;
          if (w == 0) continue;
          for (std::size_t r = 0; r < n; ++r) coeffs[k][r] += w * jf.transform(r, col + i);
        }
      }
      col += s;
    }
    while (!coeffs.empty() && is_zero(coeffs.back())) coeffs.pop_back();
    if (coeffs.empty()) continue;
    SolutionTerm t;
    t.lambda = to_double(blk.eigenvalue);
    t.real_part_sign = sgn(blk.eigenvalue);
    for (const auto& v : coeffs) t.coeffs.push_back(to_complex(v));
    sol.terms.push_back(std::move(t));
  }
  std::sort(sol.terms.begin(), sol.terms.end(), term_less);
  return sol;
}

LinearSolution from_numeric_jordan(const NumericJordan& jf, const std::vector<int>& re_signs, const ComplexVector& x0) {
  const Eigen::Index n = jf.jordan.rows();
  const ComplexVector c = jf.transform.fullPivLu().solve(x0);
  LinearSolution sol;
  sol.dim = static_cast<std::size_t>(n);
  Eigen::Index col = 0;
  for (std::size_t b = 0; b < jf.blocks.size(); ++b) {
    const auto& blk = jf.blocks[b];
    std::vector<ComplexVector> coeffs;
    for (int size : blk.sizes) {
      if (static_cast<int>(coeffs.size()) < size) coeffs.resize(static_cast<std::size_t>(size), ComplexVector::Zero(n));
      double fact = 1.0;
      for (int k = 0; k < size; ++k) {
        if (k > 0) fact *= k;
        for (int i = 0; i + k < size; ++i) coeffs[static_cast<std::size_t>(k)] += (c(col + i + k) / fact) * jf.transform.col(col + i);
      }
      col += size;
    }
    SolutionTerm t;
    t.lambda = blk.eigenvalue;
    t.real_part_sign = re_signs[b];
    t.coeffs = std::move(coeffs);
    sol.terms.push_back(std::move(t));
  }
  trim_numeric(sol, kNumericTrim);
  return sol;
}

// Decomposition reused across initial conditions.
class ConstantSolver {
 public:
  explicit ConstantSolver(const ExactMatrix& a) {
    if (!a.is_square()) throw DomainError("solve_constant needs a square matrix");
    try {
      exact_ = jordan_form(a);
    } catch (const UnsupportedError&) {
      std::vector<SpectrumEntry> spec;
      for (const auto& p : spectrum_of(char_poly(a).poly)) {
        spec.push_back({p.root.value, p.multiplicity});
        re_signs_.push_back(p.root.re_sign);
      }
      numeric_ = jordan_form(a.to_complex(), spec);
    }
  }

  LinearSolution solve(const ExactVector& x0) const {
    if (exact_) return from_exact_jordan(*exact_, x0);
    return from_numeric_jordan(*numeric_, re_signs_, to_complex(x0));
  }

 private:
  std::optional<ExactJordan> exact_;
  std::optional<NumericJordan> numeric_;
  std::vector<int> re_signs_;
};

// Coefficients of p(lambda + u) in powers of u.
template <class T>
std::vector<T> taylor_shift(std::vector<T> c, const T& lambda) {
  const std::size_t n = c.size();
  for (std::size_t k = 0; k + 1 < n; ++k)
    for (std::size_t i = n - 1; i > k; --i) c[i - 1] += lambda * c[i];
  return c;
}

// Residue at a pole of order m: numer[j][i] is component i of the u^j
// Taylor coefficient of N, denom the Taylor coefficients of det(sI - A).
template <class T>
std::vector<std::vector<T>> residue_coeffs(const std::vector<std::vector<T>>& numer, const std::vector<T>& denom,
                                           int m, std::size_t dim) {
  auto g = [&](std::size_t j) { return j + static_cast<std::size_t>(m) < denom.size() ? denom[j + static_cast<std::size_t>(m)] : T(0); };
  auto nj = [&](std::size_t j) { return j < numer.size() ? numer[j] : std::vector<T>(dim, T(0)); };
  std::vector<std::vector<T>> h(static_cast<std::size_t>(m));
  for (std::size_t j = 0; j < h.size(); ++j) {
    std::vector<T> acc = nj(j);
    for (std::size_t i = 1; i <= j; ++i)
      for (std::size_t r = 0; r < dim; ++r) acc[r] -= g(i) * h[j - i][r];
    for (auto& x : acc) x /= g(0);
    h[j] = std::move(acc);
  }
  // t^i coefficient: h_{m-1-i} / i!
  std::vector<std::vector<T>> out(static_cast<std::size_t>(m));
  T fact = 1;
  for (int i = 0; i < m; ++i) {
    if (i > 0) fact *= i;
    out[static_cast<std::size_t>(i)] = h[static_cast<std::size_t>(m - 1 - i)];
    for (auto& x : out[static_cast<std::size_t>(i)]) x /= fact;
  }
  return out;
}

double max_abs(const ComplexMatrix& a) { return a.cwiseAbs().maxCoeff(); }

// Largest Jordan block and geometric multiplicity at an eigenvalue of
// algebraic multiplicity m; exact when the eigenvalue is rational.
std::pair<int, int> block_structure(const ExactMatrix& a, const SpectralPoint& p) {
  if (p.multiplicity == 1) return {1, 1};
  if (p.exact) {
    const auto rep = multiplicity(a, *p.exact);
    return {rep.block_sizes.front(), rep.geometric};
  }
  const ComplexMatrix ca = a.to_complex();
  const Eigen::Index n = ca.rows();
  const ComplexMatrix nmat = ca - p.root.value * ComplexMatrix::Identity(n, n);
  const double scale = std::max(1.0, max_abs(ca));
  ComplexMatrix power = ComplexMatrix::Identity(n, n);
  int geometric = 0;
  for (int k = 1; k <= p.multiplicity; ++k) {
    power = nmat * power;
    Eigen::JacobiSVD<ComplexMatrix> svd(power);
    const double cut = 1e-8 * std::pow(scale, k);
    int nullity = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) <= cut) ++nullity;
    if (k == 1) geometric = std::max(1, nullity);
    if (nullity >= p.multiplicity) return {k, geometric};
  }
  return {p.multiplicity, geometric};
}

}  // namespace

ComplexVector LinearSolution::evaluate(double t) const {
  ComplexVector out = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
  for (const auto& term : terms) {
    ComplexVector poly = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t j = term.coeffs.size(); j-- > 0;) poly = poly * t + term.coeffs[j];
    out += std::exp(term.lambda * t) * poly;
  }
  return out;
}

int LinearSolution::max_degree() const {
  int d = 0;
  for (const auto& t : terms) d = std::max(d, t.degree());
  return d;
}

LinearSolution solve_constant(const ExactMatrix& a, const ExactVector& x0) {
  if (x0.size() != a.rows()) throw DomainError("initial condition has the wrong dimension");
  return ConstantSolver(a).solve(x0);
}

LinearSolution solve_constant(const ComplexMatrix& a, const ComplexVector& x0, const NumericJordanOptions& opts) {
  if (a.rows() != a.cols()) throw DomainError("solve_constant needs a square matrix");
  if (x0.size() != a.rows()) throw DomainError("initial condition has the wrong dimension");
  const NumericJordan jf = jordan_form(a, opts);
  double scale = 1.0;
  for (const auto& b : jf.blocks) scale = std::max(scale, std::abs(b.eigenvalue));
  std::vector<int> signs;
  for (const auto& b : jf.blocks) {
    const double re = b.eigenvalue.real();
    signs.push_back(std::abs(re) <= opts.cluster_tol * scale ? 0 : (re > 0 ? 1 : -1));
  }
  return from_numeric_jordan(jf, signs, x0);
}

LinearSolution solve_residue(const ExactMatrix& a, const ExactVector& x0) {
  if (!a.is_square()) throw DomainError("solve_residue needs a square matrix");
  if (x0.size() != a.rows()) throw DomainError("initial condition has the wrong dimension");
  const std::size_t n = a.rows();
  const ResolventExpansion re = resolvent_expansion(a);
  // N(s) = adj(sI - A) x0 = sum_k (B_k x0) s^k, stored per power.
  std::vector<ExactVector> numer;
  for (const auto& b : re.adjugate_coeffs) numer.push_back(b * x0);

  LinearSolution sol;
  sol.dim = n;
  bool numeric = false;
  for (const auto& p : spectrum_of(re.char_poly)) {
    SolutionTerm term;
    term.lambda = p.root.value;
    term.real_part_sign = p.root.re_sign;
    if (p.exact) {
      // Shift each component of N and the denominator to the pole.
      std::vector<std::vector<Rational>> shifted(n, std::vector<Rational>(n));
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<Rational> comp(n);
        for (std::size_t k = 0; k < n; ++k) comp[k] = numer[k][i];
        comp = taylor_shift(comp, *p.exact);
        for (std::size_t k = 0; k < n; ++k) shifted[k][i] = comp[k];
      }
      const auto denom = taylor_shift(re.char_poly.coeffs(), *p.exact);
      auto coeffs = residue_coeffs(shifted, denom, p.multiplicity, n);
      while (!coeffs.empty() && is_zero(coeffs.back())) coeffs.pop_back();
      if (coeffs.empty()) continue;
      for (const auto& v : coeffs) term.coeffs.push_back(to_complex(v));
    } else {
      numeric = true;
      std::vector<std::vector<cd>> shifted(n, std::vector<cd>(n));
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<cd> comp(n);
        for (std::size_t k = 0; k < n; ++k) comp[k] = to_double(numer[k][i]);
        comp = taylor_shift(comp, p.root.value);
        for (std::size_t k = 0; k < n; ++k) shifted[k][i] = comp[k];
      }
      std::vector<cd> cp;
      for (const auto& c : re.char_poly.coeffs()) cp.push_back(to_double(c));
      const auto denom = taylor_shift(cp, p.root.value);
      for (const auto& v : residue_coeffs(shifted, denom, p.multiplicity, n)) {
        ComplexVector cv(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) cv(static_cast<Eigen::Index>(i)) = v[i];
        term.coeffs.push_back(cv);
      }
    }
    sol.terms.push_back(std::move(term));
  }
  if (numeric) trim_numeric(sol, kNumericTrim);
  std::sort(sol.terms.begin(), sol.terms.end(), term_less);
  return sol;
}

ComplexMatrix propagator(const ExactMatrix& a, double t) {
  const ConstantSolver solver(a);
  const std::size_t n = a.rows();
  ComplexMatrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    ExactVector e(n);
    e[j] = 1;
    out.col(static_cast<Eigen::Index>(j)) = solver.solve(e).evaluate(t);
  }
  return out;
}

std::string to_string(StabilityTag tag) {
  switch (tag) {
    case StabilityTag::bounded_oscillatory: return "bounded_oscillatory";
    case StabilityTag::exponentially_unstable: return "exponentially_unstable";
    case StabilityTag::secular_polynomial_growth: return "secular_polynomial_growth";
    case StabilityTag::decaying: return "decaying";
  }
  return "unknown";
}

ExactMatrix doubled_system(const ExactMatrix& a) {
  if (!a.is_square()) throw DomainError("doubled system needs a square matrix");
  const std::size_t n = a.rows();
  ExactMatrix out(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    out(i, n + i) = 1;
    for (std::size_t j = 0; j < n; ++j) out(n + i, j) = a(i, j);
  }
  return out;
}

StabilityVerdict classify_stability(const ExactMatrix& a, SystemForm form) {
  if (!a.is_square()) throw DomainError("stability of a non-square matrix");
  const auto spectrum = spectrum_of(char_poly(a).poly);
  StabilityVerdict v;
  std::vector<StabilityWitness> unstable, secular, boundary, decaying;

  bool strict = true;
  for (const auto& p : spectrum) {
    const cd lam = p.root.value;
    const bool real = lam.imag() == 0.0;
    if (p.multiplicity > 1) strict = false;
    if (form == SystemForm::first_order) {
      if (p.root.re_sign > 0) strict = false;
      if (p.root.re_sign > 0) {
        unstable.push_back({lam, 1});
      } else if (p.root.re_sign == 0) {
        const auto [block, geo] = block_structure(a, p);
        (void)geo;
        (block > 1 ? secular : boundary).push_back({lam, block});
      } else {
        decaying.push_back({lam, 1});
      }
    } else {
      if (!(real && p.root.re_sign < 0)) strict = false;
      if (!real || p.root.re_sign > 0) {
        unstable.push_back({std::sqrt(lam), 1});  // principal root, Re > 0
      } else if (p.root.re_sign == 0) {
        const auto [block, geo] = block_structure(a, p);
        (void)geo;
        secular.push_back({0.0, 2 * block});
      } else {
        const auto [block, geo] = block_structure(a, p);
        (void)geo;
        const cd w(0.0, std::sqrt(-lam.real()));
        (block > 1 ? secular : boundary).push_back({w, block});
      }
    }
  }
  v.lagrange_strict = strict;
  if (!unstable.empty()) {
    v.tag = StabilityTag::exponentially_unstable;
    v.witnesses = unstable;
  } else if (!secular.empty()) {
    v.tag = StabilityTag::secular_polynomial_growth;
    v.witnesses = secular;
  } else if (boundary.empty()) {
    v.tag = StabilityTag::decaying;
    if (!decaying.empty()) v.witnesses = {decaying.back()};
  } else {
    v.tag = StabilityTag::bounded_oscillatory;
    v.witnesses = boundary;
  }
  return v;
}

StabilityVerdict classify_stability(const ExactMatrix& a, SystemForm form, const ExactVector& x0,
                                    const ExactVector& v0) {
  const StabilityVerdict structural = classify_stability(a, form);
  LinearSolution sol;
  if (form == SystemForm::first_order) {
    sol = solve_constant(a, x0);
  } else {
    if (v0.size() != a.rows()) throw DomainError("initial velocity has the wrong dimension");
    ExactVector z = x0;
    z.insert(z.end(), v0.begin(), v0.end());
    sol = solve_constant(doubled_system(a), z);
  }
  StabilityVerdict v;
  v.lagrange_strict = structural.lagrange_strict;
  std::vector<StabilityWitness> unstable, secular, boundary;
  for (const auto& t : sol.terms) {
    if (t.real_part_sign > 0) unstable.push_back({t.lambda, t.degree() + 1});
    else if (t.real_part_sign == 0) (t.degree() > 0 ? secular : boundary).push_back({t.lambda, t.degree() + 1});
  }
  if (!unstable.empty()) {
    v.tag = StabilityTag::exponentially_unstable;
    v.witnesses = unstable;
  } else if (!secular.empty()) {
    v.tag = StabilityTag::secular_polynomial_growth;
    v.witnesses = secular;
  } else if (boundary.empty()) {
    v.tag = StabilityTag::decaying;
  } else {
    v.tag = StabilityTag::bounded_oscillatory;
    v.witnesses = boundary;
  }
  return v;
}

LagrangeOscillation solve_lagrange_oscillation(const ExactMatrix& a, const ExactVector& x0, const ExactVector& v0) {
  if (!a.is_symmetric()) throw DomainError("Lagrange oscillations need a symmetric matrix");
  const std::size_t n = a.rows();
  if (x0.size() != n || v0.size() != n) throw DomainError("initial data has the wrong dimension");
  const Inertia in = inertia(QuadraticForm(a));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.to_double());
  const Eigen::VectorXd x = to_complex(x0).real(), v = to_complex(v0).real();

  LagrangeOscillation out;
  out.solution.dim = n;
  std::vector<SolutionTerm> raw;
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    OscillationMode mode;
    mode.shape = es.eigenvectors().col(jj);
    mode.amplitude_x = mode.shape.dot(x);
    mode.amplitude_v = mode.shape.dot(v);
    const ComplexVector u = mode.shape.cast<cd>();
    const double ax = mode.amplitude_x, av = mode.amplitude_v;
    // Eigenvalues come out ascending: negatives, then zeros, then positives.
    if (static_cast<int>(j) < in.n_neg) {
      mode.alpha = es.eigenvalues()(jj);
      mode.kind = OscillationMode::Kind::oscillatory;
      const double w = std::sqrt(-mode.alpha);
      mode.frequency = w;
      raw.push_back({cd(0, -w), {u * cd(ax / 2, av / (2 * w))}, 0});
      raw.push_back({cd(0, w), {u * cd(ax / 2, -av / (2 * w))}, 0});
    } else if (static_cast<int>(j) < in.n_neg + in.n_zero) {
      mode.alpha = 0.0;
      mode.kind = OscillationMode::Kind::drift;
      raw.push_back({0.0, {u * ax, u * av}, 0});
    } else {
      mode.alpha = es.eigenvalues()(jj);
      mode.kind = OscillationMode::Kind::exponential;
      const double k = std::sqrt(mode.alpha);
      mode.frequency = k;
      raw.push_back({-k, {u * (ax / 2 - av / (2 * k))}, -1});
      raw.push_back({k, {u * (ax / 2 + av / (2 * k))}, 1});
    }
    out.modes.push_back(std::move(mode));
  }
  // Merge terms sharing an exponent (repeated eigenvalues of A).
  std::sort(raw.begin(), raw.end(), term_less);
  double scale = 1.0;
  for (const auto& t : raw) scale = std::max(scale, std::abs(t.lambda));
  for (auto& t : raw) {
    auto& terms = out.solution.terms;
    if (!terms.empty() && std::abs(terms.back().lambda - t.lambda) <= 1e-10 * scale) {
      auto& dst = terms.back().coeffs;
      if (dst.size() < t.coeffs.size()) dst.resize(t.coeffs.size(), ComplexVector::Zero(static_cast<Eigen::Index>(n)));
      for (std::size_t k = 0; k < t.coeffs.size(); ++k) dst[k] += t.coeffs[k];
    } else {
      terms.push_back(std::move(t));
    }
  }
  trim_numeric(out.solution, 1e-14);
  out.verdict = classify_stability(a, SystemForm::second_order);
  return out;
}

}  // namespace secular
