#include "secular/matrixcore.hpp"

#include <cmath>

#include "secular/errors.hpp"

namespace secular {

ResolventExpansion resolvent_expansion(const ExactMatrix& a) {
  if (!a.is_square()) throw DomainError("characteristic polynomial of a non-square matrix");
  const std::size_t n = a.rows();
  std::vector<Rational> c(n + 1);
  c[n] = 1;
  std::vector<ExactMatrix> m(n + 1);
  // M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k, with M_0 = 0.
  ExactMatrix mk(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    ExactMatrix next = a * mk;
    for (std::size_t i = 0; i < n; ++i) next(i, i) += c[n - k + 1];
    mk = std::move(next);
    m[k] = mk;
    c[n - k] = -(a * mk).trace() / static_cast<long>(k);
  }
  ResolventExpansion out{RationalPolynomial(c), std::vector<ExactMatrix>(n, ExactMatrix(n, n))};
  for (std::size_t k = 1; k <= n; ++k) out.adjugate_coeffs[n - k] = m[k];
  return out;
}

CharPoly char_poly(const ExactMatrix& a) { return {resolvent_expansion(a).char_poly}; }

std::vector<std::complex<double>> char_poly(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw DomainError("characteristic polynomial of a non-square matrix");
  const Eigen::Index n = a.rows();
  std::vector<std::complex<double>> c(static_cast<std::size_t>(n) + 1);
  c[static_cast<std::size_t>(n)] = 1.0;
  ComplexMatrix mk = ComplexMatrix::Zero(n, n);
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    mk = a * mk + c[static_cast<std::size_t>(n - k + 1)] * id;
    c[static_cast<std::size_t>(n - k)] = -(a * mk).trace() / static_cast<double>(k);
  }
  return c;
}

MinorSequence minor_sequence(const ExactMatrix& a) {
  if (!a.is_square()) throw DomainError("minor sequence of a non-square matrix");
  const std::size_t n = a.rows();
  MinorSequence out;
  for (std::size_t k = 0; k <= n; ++k) {
    std::vector<std::size_t> drop(k);
    for (std::size_t i = 0; i < k; ++i) drop[i] = i;
    ExactMatrix sub = a.without(drop, drop);
    RationalPolynomial p = char_poly(sub).poly;  // det(S I - A_k)
    if ((n - k) % 2 == 1) p = -p;                // det(A_k - S I)
    out.minors.push_back(std::move(p));
  }
  return out;
}

ExactVector lagrange_eigenvector(const ExactMatrix& a, const Rational& lambda) {
  if (!a.is_symmetric()) throw DomainError("Lagrange eigenvector formula requires a symmetric matrix");
  const ExactMatrix shifted = a.shifted(lambda);
  if (determinant(shifted) != 0) throw DomainError("value is not an eigenvalue of the matrix");
  const ExactMatrix adj = adjugate(shifted);
  for (std::size_t j = 0; j < adj.cols(); ++j) {
    ExactVector v = adj.column(j);
    if (!is_zero(v)) return v;
  }
  throw DefersToJordanError("eigenvalue is multiple; every cofactor column vanishes");
}

QuadraticForm::QuadraticForm(ExactMatrix gram) : gram_(std::move(gram)) {
  if (!gram_.is_symmetric()) throw DomainError("quadratic form needs a symmetric gram matrix");
}

SquaresReduction reduce_to_squares(const QuadraticForm& q) {
  const std::size_t n = q.dim();
  ExactMatrix g = q.gram();
  ExactMatrix t = ExactMatrix::identity(n);

  auto swap_index = [&](std::size_t i, std::size_t j) {
    for (std::size_t c = 0; c < n; ++c) std::swap(g(i, c), g(j, c));
    for (std::size_t r = 0; r < n; ++r) std::swap(g(r, i), g(r, j));
    for (std::size_t r = 0; r < n; ++r) std::swap(t(r, i), t(r, j));
  };
  // Congruence by E = I + f e_src e_dst^T: column dst += f column src, same for rows.
  auto add_index = [&](std::size_t dst, std::size_t src, const Rational& f) {
    for (std::size_t r = 0; r < n; ++r) g(r, dst) += f * g(r, src);
    for (std::size_t c = 0; c < n; ++c) g(dst, c) += f * g(src, c);
    for (std::size_t r = 0; r < n; ++r) t(r, dst) += f * t(r, src);
  };

  for (std::size_t k = 0; k < n; ++k) {
    if (g(k, k) == 0) {
      std::size_t j = k + 1;
      while (j < n && g(j, j) == 0) ++j;
      if (j < n) {
        swap_index(k, j);
      } else {
        j = k + 1;
        while (j < n && g(k, j) == 0) ++j;
        if (j == n) continue;  // row k already zero
        add_index(k, j, 1);    // new pivot 2 g(k, j) != 0
      }
    }
    const Rational pivot = g(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (g(i, k) == 0) continue;
      add_index(i, k, -g(i, k) / pivot);
    }
  }
  SquaresReduction out;
  out.coefficients.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.coefficients[i] = g(i, i);
  out.transform = std::move(t);
  return out;
}

Inertia inertia(const QuadraticForm& q) {
  Inertia in;
  for (const auto& c : reduce_to_squares(q).coefficients) {
    const int s = sgn(c);
    if (s > 0) ++in.n_pos; else if (s < 0) ++in.n_neg; else ++in.n_zero;
  }
  return in;
}

HermiteCount hermite_root_count(const RationalPolynomial& p) {
  if (p.is_zero()) throw DomainError("Hermite count of the zero polynomial");
  HermiteCount out;
  const int d = p.degree();
  if (d == 0) return out;
  const RationalPolynomial m = p.monic();
  auto a = [&](int i) { return m.coeff(static_cast<std::size_t>(i)); };
  const int count = 2 * d - 1;
  std::vector<Rational> s(static_cast<std::size_t>(count));
  s[0] = d;
  for (int k = 1; k < count; ++k) {
    Rational acc = 0;
    if (k <= d) acc += k * a(d - k);
    for (int i = 1; i <= std::min(k - 1, d); ++i) acc += a(d - i) * s[static_cast<std::size_t>(k - i)];
    s[static_cast<std::size_t>(k)] = -acc;
  }
  out.power_sums = s;
  out.hankel = ExactMatrix(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      out.hankel(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = s[static_cast<std::size_t>(i + j)];
  const Inertia in = inertia(QuadraticForm(out.hankel));
  out.distinct = in.n_pos + in.n_neg;
  out.distinct_real = in.n_pos - in.n_neg;
  return out;
}

namespace {

// Number of roots, with multiplicity, at or below x (x must not be a root).
int roots_at_or_below(const std::vector<SquareFreeFactor>& factors, const Rational& x) {
  int n = 0;
  for (const auto& f : factors) n += f.multiplicity * count_real_roots(f.factor, Endpoint::minus_infinity(), x);
  return n;
}

void require_real_spectrum(const RationalPolynomial& p) {
  if (p.degree() <= 0) return;
  const RationalPolynomial sf = square_free_part(p);
  if (count_real_roots(sf) != sf.degree())
    throw InternalError("symmetric matrix produced a non-real eigenvalue");
}

}  // namespace

InterlacingReport interlacing_check(const ExactMatrix& a) {
  if (!a.is_symmetric()) throw DomainError("interlacing check requires a symmetric matrix");
  const std::size_t n = a.rows();
  InterlacingReport rep;
  if (n == 0) {
    rep.passed = true;
    return rep;
  }
  const MinorSequence seq = minor_sequence(a);
  const RationalPolynomial& full = seq.minors[0];
  const RationalPolynomial& sub = seq.minors[1];
  require_real_spectrum(full);
  require_real_spectrum(sub);

  rep.full_roots = isolate_real_roots(full);
  if (sub.degree() > 0) rep.sub_roots = isolate_real_roots(sub);

  const auto full_factors = square_free_decomposition(full);
  const auto sub_factors = sub.degree() > 0 ? square_free_decomposition(sub) : std::vector<SquareFreeFactor>{};

  // Both counting functions are right-continuous steps that only move at
  // roots of Delta_0 * Delta_1, so one probe per gap decides the inequality.
  const auto joint = isolate_real_roots(full * sub);
  std::vector<Rational> probes;
  if (!joint.empty()) probes.push_back(joint.front().lo);
  for (const auto& iv : joint) probes.push_back(iv.hi);

  rep.passed = true;
  for (const auto& x : probes) {
    InterlacingGap g;
    g.probe = x;
    g.below_full = roots_at_or_below(full_factors, x);
    g.below_sub = roots_at_or_below(sub_factors, x);
    g.ok = g.below_full - 1 <= g.below_sub && g.below_sub <= g.below_full;
    rep.passed = rep.passed && g.ok;
    rep.gaps.push_back(g);
  }
  return rep;
}

PowerIterationResult power_iteration(const ComplexMatrix& a, double tol, int max_iter) {
  if (a.rows() != a.cols()) throw DomainError("power iteration needs a square matrix");
  if ((a - a.adjoint()).norm() > 1e-12 * std::max(1.0, a.norm()))
    throw DomainError("power iteration needs a Hermitian matrix");
  const Eigen::Index n = a.rows();
  const double scale = a.norm();
  PowerIterationResult res;
  if (n == 0) {
    res.converged = true;
    return res;
  }

  ComplexVector v = ComplexVector::Ones(n).normalized();
  for (int it = 1; it <= max_iter; ++it) {
    ComplexVector w = a * v;
    if (w.norm() <= 1e-14 * std::max(scale, 1e-300)) {
      if (!res.restarted && scale > 0) {
        ComplexVector alt(n);
        for (Eigen::Index i = 0; i < n; ++i) alt(i) = ((i % 2 == 0) ? 1.0 : -1.0) / static_cast<double>(i + 1);
        v = alt.normalized();
        res.restarted = true;
        continue;
      }
    }
    const double lambda = v.dot(w).real();
    res.eigenvalue = lambda;
    res.vector = v;
    res.iterations = it;
    res.residual = (w - lambda * v).norm();
    if (res.residual <= tol * scale) {
      res.converged = true;
      return res;
    }
    v = w.normalized();
  }
  return res;
}

}  // namespace secular
