#include "secular/jordan.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "secular/errors.hpp"
#include "secular/matrixcore.hpp"

namespace secular {

namespace {

// Calls f(indices) for every increasing k-subset of {0..n-1}; stops when f returns false.
template <class F>
bool for_each_subset(std::size_t n, std::size_t k, F&& f) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (k > n) return true;
  while (true) {
    if (!f(idx)) return false;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return true;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

bool independent_of(const std::vector<ExactVector>& basis, const ExactVector& v) {
  if (basis.empty()) return !is_zero(v);
  std::vector<ExactVector> cols = basis;
  cols.push_back(v);
  return rank(ExactMatrix::from_columns(cols)) == cols.size();
}

// Chains of (A - lambda I) in the generalized eigenspace of dimension m.
// Returns the columns of P for this eigenvalue and the block sizes.
void exact_chains(const ExactMatrix& a, const Rational& lambda, int m, std::vector<ExactVector>& columns,
                  std::vector<int>& sizes) {
  const std::size_t n = a.rows();
  const ExactMatrix nmat = a.shifted(lambda);
  std::vector<std::vector<ExactVector>> kernels{{}};  // kernels[k] = basis of ker N^k
  ExactMatrix power = ExactMatrix::identity(n);
  while (static_cast<int>(kernels.back().size()) < m) {
    power = nmat * power;
    kernels.push_back(nullspace(power));
    if (kernels.size() > n + 1) throw InternalError("kernel chain did not reach the algebraic multiplicity");
  }
  const std::size_t q = kernels.size() - 1;

  struct Chain {
    ExactVector top;
    std::size_t length;
  };
  std::vector<Chain> chains;
  for (std::size_t k = q; k >= 1; --k) {
    // Span of ker N^{k-1} plus the level-k images of the chains already chosen.
    std::vector<ExactVector> span = kernels[k - 1];
    for (const auto& c : chains) {
      ExactVector v = c.top;
      for (std::size_t j = k; j < c.length; ++j) v = nmat * v;
      span.push_back(std::move(v));
    }
    for (const auto& cand : kernels[k]) {
      if (independent_of(span, cand)) {
        span.push_back(cand);
        chains.push_back({cand, k});
      }
    }
  }
  for (const auto& c : chains) {
    std::vector<ExactVector> chain(c.length);
    ExactVector v = c.top;
    for (std::size_t j = c.length; j-- > 0;) {
      chain[j] = v;
      v = nmat * v;
    }
    for (auto& col : chain) columns.push_back(std::move(col));
    sizes.push_back(static_cast<int>(c.length));
  }
}

template <class Scalar, class Matrix>
void place_block(Matrix& j, std::size_t& offset, const Scalar& lambda, int size) {
  for (int i = 0; i < size; ++i) {
    j(offset + static_cast<std::size_t>(i), offset + static_cast<std::size_t>(i)) = lambda;
    if (i + 1 < size) j(offset + static_cast<std::size_t>(i), offset + static_cast<std::size_t>(i) + 1) = 1;
  }
  offset += static_cast<std::size_t>(size);
}

bool lex_less(std::complex<double> a, std::complex<double> b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// Orthonormal basis of the numerical kernel of m (columns).
ComplexMatrix numeric_kernel(const ComplexMatrix& m, double threshold) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > threshold) ++r;
  return svd.matrixV().rightCols(m.cols() - r);
}

double residual_after_projection(const ComplexMatrix& q, const ComplexVector& v) {
  if (q.cols() == 0) return v.norm();
  return (v - q * (q.adjoint() * v)).norm();
}

// Appends v to the orthonormal set q (modified Gram-Schmidt, twice).
void extend_orthonormal(ComplexMatrix& q, ComplexVector v) {
  for (int pass = 0; pass < 2; ++pass)
    if (q.cols() > 0) v -= q * (q.adjoint() * v);
  q.conservativeResize(q.rows(), q.cols() + 1);
  q.col(q.cols() - 1) = v.normalized();
}

}  // namespace

bool all_minors_vanish(const ExactMatrix& m, std::size_t size) {
  if (size == 0) return false;
  if (size > m.rows() || size > m.cols()) return true;
  return for_each_subset(m.rows(), size, [&](const std::vector<std::size_t>& rows) {
    return for_each_subset(m.cols(), size, [&](const std::vector<std::size_t>& cols) {
      return determinant(m.select(rows, cols)) == 0;
    });
  });
}

ExactMatrix evaluate_at(const RationalPolynomial& f, const ExactMatrix& a) {
  if (!a.is_square()) throw DomainError("polynomial of a non-square matrix");
  const std::size_t n = a.rows();
  ExactMatrix acc(n, n);
  for (std::size_t i = f.coeffs().size(); i-- > 0;) {
    acc = a * acc;
    for (std::size_t d = 0; d < n; ++d) acc(d, d) += f.coeffs()[i];
  }
  return acc;
}

MultiplicityReport multiplicity(const ExactMatrix& a, const Rational& lambda) {
  if (!a.is_square()) throw DomainError("multiplicity of a non-square matrix");
  const std::size_t n = a.rows();
  const RationalPolynomial cp = char_poly(a).poly;
  MultiplicityReport rep;
  rep.eigenvalue = lambda;
  rep.algebraic = root_multiplicity(cp, lambda);
  if (rep.algebraic == 0) throw DomainError("value is not an eigenvalue of the matrix");

  const ExactMatrix nmat = a.shifted(lambda);
  ExactMatrix power = ExactMatrix::identity(n);
  rep.rank_sequence.push_back(n);
  const std::size_t target = n - static_cast<std::size_t>(rep.algebraic);
  while (rep.rank_sequence.back() > target) {
    power = nmat * power;
    const std::size_t r = rank(power);
    if (r == rep.rank_sequence.back()) throw InternalError("rank sequence stalled above n - algebraic");
    rep.rank_sequence.push_back(r);
  }
  rep.geometric = static_cast<int>(n - rep.rank_sequence[1]);
  // Blocks of size >= k: r_{k-1} - r_k; blocks of size exactly k: difference of consecutive counts.
  const std::size_t q = rep.rank_sequence.size() - 1;
  for (std::size_t k = q; k >= 1; --k) {
    const long at_least_k = static_cast<long>(rep.rank_sequence[k - 1] - rep.rank_sequence[k]);
    const long at_least_k1 = k < q ? static_cast<long>(rep.rank_sequence[k] - rep.rank_sequence[k + 1]) : 0;
    for (long b = 0; b < at_least_k - at_least_k1; ++b) rep.block_sizes.push_back(static_cast<int>(k));
  }

  // Darboux: all minors of order n-k of A - lambda I vanish iff geometric > k.
  int depth = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!all_minors_vanish(nmat, n - k)) break;
    ++depth;
  }
  rep.minor_vanishing_depth = depth;
  if (depth != rep.geometric) throw InternalError("minor vanishing order disagrees with the nullity");
  return rep;
}

ExactJordan jordan_form(const ExactMatrix& a) {
  if (!a.is_square()) throw DomainError("Jordan form of a non-square matrix");
  const std::size_t n = a.rows();
  const RationalPolynomial cp = char_poly(a).poly;
  std::vector<std::pair<Rational, int>> spectrum;
  int found = 0;
  for (const auto& f : square_free_decomposition(cp)) {
    for (const auto& r : rational_roots(f.factor)) {
      spectrum.emplace_back(r, f.multiplicity);
      found += f.multiplicity;
    }
  }
  if (found != static_cast<int>(n))
    throw UnsupportedError("exact Jordan form needs rational eigenvalues; use the numeric flavor");
  std::sort(spectrum.begin(), spectrum.end(), [](const auto& x, const auto& y) { return x.first < y.first; });

  ExactJordan out;
  out.jordan = ExactMatrix(n, n);
  std::vector<ExactVector> columns;
  std::size_t offset = 0;
  for (const auto& [lambda, m] : spectrum) {
    ExactJordanBlock blk;
    blk.eigenvalue = lambda;
    exact_chains(a, lambda, m, columns, blk.sizes);
    for (int s : blk.sizes) place_block(out.jordan, offset, lambda, s);
    out.blocks.push_back(std::move(blk));
  }
  out.transform = ExactMatrix::from_columns(columns);
  if (!(a * out.transform == out.transform * out.jordan) || determinant(out.transform) == 0)
    throw InternalError("Jordan chains do not reproduce the matrix");
  return out;
}

std::vector<SpectrumEntry> cluster_eigenvalues(const std::vector<std::complex<double>>& values, double cluster_tol,
                                               bool* ill_conditioned) {
  const std::size_t n = values.size();
  double scale = 1.0;
  for (const auto& v : values) scale = std::max(scale, std::abs(v));
  const double radius = cluster_tol * scale;

  // Single linkage via union-find.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(values[i] - values[j]) <= radius) parent[find(i)] = find(j);

  std::vector<std::complex<double>> sums(n);
  std::vector<int> counts(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    sums[find(i)] += values[i];
    ++counts[find(i)];
  }
  std::vector<SpectrumEntry> out;
  for (std::size_t i = 0; i < n; ++i)
    if (counts[i] > 0) out.push_back({sums[i] / static_cast<double>(counts[i]), counts[i]});
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return lex_less(x.eigenvalue, y.eigenvalue); });

  if (ill_conditioned) {
    *ill_conditioned = false;
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t j = i + 1; j < out.size(); ++j)
        if (std::abs(out[i].eigenvalue - out[j].eigenvalue) <= 10.0 * radius) *ill_conditioned = true;
  }
  return out;
}

NumericJordan jordan_form(const ComplexMatrix& a, const NumericJordanOptions& opts) {
  if (a.rows() != a.cols()) throw DomainError("Jordan form of a non-square matrix");
  if (a.rows() == 0) return {};
  Eigen::ComplexEigenSolver<ComplexMatrix> es(a, false);
  if (es.info() != Eigen::Success) throw NonConvergenceError("eigenvalue iteration failed");
  std::vector<std::complex<double>> values(es.eigenvalues().data(), es.eigenvalues().data() + a.rows());
  bool ill = false;
  const auto spectrum = cluster_eigenvalues(values, opts.cluster_tol, &ill);
  NumericJordan out = jordan_form(a, spectrum, opts);
  if (ill) {
    out.ill_conditioned = true;
    out.warnings.insert(out.warnings.begin(), "eigenvalue clusters within 10x the clustering tolerance");
  }
  return out;
}

NumericJordan jordan_form(const ComplexMatrix& a, const std::vector<SpectrumEntry>& spectrum,
                          const NumericJordanOptions& opts) {
  if (a.rows() != a.cols()) throw DomainError("Jordan form of a non-square matrix");
  const Eigen::Index n = a.rows();
  int total = 0;
  for (const auto& e : spectrum) total += e.algebraic;
  if (total != n) throw DomainError("spectrum multiplicities do not add up to the dimension");

  const double anorm = std::max(1.0, a.operatorNorm());
  NumericJordan out;
  out.jordan = ComplexMatrix::Zero(n, n);
  out.transform = ComplexMatrix::Zero(n, n);
  Eigen::Index col = 0;
  std::size_t offset = 0;
  const double rank_tol = std::max(opts.rank_tol, 0.0);

  for (const auto& entry : spectrum) {
    const int m = entry.algebraic;
    const ComplexMatrix nmat = a - entry.eigenvalue * ComplexMatrix::Identity(n, n);
    std::vector<ComplexMatrix> kernels{ComplexMatrix(n, 0)};
    ComplexMatrix power = ComplexMatrix::Identity(n, n);
    double threshold = rank_tol;
    for (int k = 1; k <= m; ++k) {
      power = nmat * power;
      threshold *= anorm;
      ComplexMatrix ker = numeric_kernel(power, threshold);
      if (ker.cols() > m) ker = numeric_kernel(power, 0.0).rightCols(m);
      if (ker.cols() <= kernels.back().cols()) break;  // stalled
      kernels.push_back(std::move(ker));
      if (kernels.back().cols() == m) break;
    }
    if (kernels.back().cols() < m) {
      out.ill_conditioned = true;
      out.warnings.push_back("generalized eigenspace dimension below the cluster size");
    }

    NumericJordanBlock blk;
    blk.eigenvalue = entry.eigenvalue;
    blk.algebraic = m;
    struct Chain {
      ComplexVector top;
      std::size_t length;
    };
    std::vector<Chain> chains;
    int covered = 0;
    for (std::size_t k = kernels.size() - 1; k >= 1; --k) {
      ComplexMatrix q(n, 0);
      for (Eigen::Index c = 0; c < kernels[k - 1].cols(); ++c) extend_orthonormal(q, kernels[k - 1].col(c));
      for (const auto& c : chains) {
        ComplexVector v = c.top;
        for (std::size_t j = k; j < c.length; ++j) v = nmat * v;
        extend_orthonormal(q, v);
      }
      for (Eigen::Index c = 0; c < kernels[k].cols() && q.cols() < kernels[k].cols(); ++c) {
        const ComplexVector cand = kernels[k].col(c);
        if (residual_after_projection(q, cand) > 1e-6) {
          extend_orthonormal(q, cand);
          chains.push_back({cand, k});
          covered += static_cast<int>(k);
        }
      }
    }
    // Fewer generalized vectors than the cluster size: pad with 1-blocks
    // from the numerical kernel so that P stays square.
    for (const auto& c : chains) {
      std::vector<ComplexVector> chain(c.length);
      ComplexVector v = c.top;
      for (std::size_t j = c.length; j-- > 0;) {
        chain[j] = v;
        v = nmat * v;
      }
      for (auto& cv : chain) out.transform.col(col++) = cv;
      blk.sizes.push_back(static_cast<int>(c.length));
    }
    if (covered < m) {
      const ComplexMatrix extra = numeric_kernel(nmat, 0.0).rightCols(m - covered);
      for (Eigen::Index c = 0; c < extra.cols(); ++c) {
        out.transform.col(col++) = extra.col(c);
        blk.sizes.push_back(1);
      }
    }
    for (int s : blk.sizes) place_block(out.jordan, offset, entry.eigenvalue, s);
    out.blocks.push_back(std::move(blk));
  }
  out.residual = (a * out.transform - out.transform * out.jordan).norm() / anorm;
  return out;
}

CanonicalType3 classify_3x3(const ExactMatrix& a) {
  if (a.rows() != 3 || a.cols() != 3) throw DomainError("classify_3x3 needs a 3x3 matrix");
  const auto factors = square_free_decomposition(char_poly(a).poly);
  int top = 1;
  for (const auto& f : factors) top = std::max(top, f.multiplicity);
  if (top == 1) return {'A', false};
  // A repeated root of a rational cubic is rational.
  Rational lambda;
  for (const auto& f : factors)
    if (f.multiplicity == top) lambda = rational_roots(f.factor).at(0);
  const std::size_t r = rank(a.shifted(lambda));
  if (top == 2) return {r == 2 ? 'B' : 'C', false};
  if (r == 2) return {'D', false};
  if (r == 1) return {'E', false};
  return {'C', true};
}

CanonicalType3 classify_3x3(const ComplexMatrix& a, const NumericJordanOptions& opts) {
  if (a.rows() != 3 || a.cols() != 3) throw DomainError("classify_3x3 needs a 3x3 matrix");
  const NumericJordan jf = jordan_form(a, opts);
  for (const auto& b : jf.blocks) {
    if (b.algebraic == 2) return {b.sizes.size() == 1 ? 'B' : 'C', false};
    if (b.algebraic == 3) {
      if (b.sizes.size() == 1) return {'D', false};
      if (b.sizes.size() == 2) return {'E', false};
      return {'C', true};
    }
  }
  return {'A', false};
}

DiagonalizabilityReport diagonalizability(const ExactMatrix& a) {
  if (!a.is_square()) throw DomainError("diagonalizability of a non-square matrix");
  const std::size_t n = a.rows();
  DiagonalizabilityReport rep;
  rep.diagonalizable = true;
  if (n == 0) return rep;
  for (const auto& f : square_free_decomposition(char_poly(a).poly)) {
    SemisimplicityEvidence ev;
    ev.factor = f.factor;
    ev.multiplicity = f.multiplicity;
    ev.expected_nullity = f.multiplicity * f.factor.degree();
    ev.nullity = static_cast<int>(n - rank(evaluate_at(f.factor, a)));
    ev.semisimple = ev.nullity == ev.expected_nullity;
    for (const auto& r : rational_roots(f.factor)) ev.rational_roots.push_back(multiplicity(a, r));
    rep.diagonalizable = rep.diagonalizable && ev.semisimple;
    rep.factors.push_back(std::move(ev));
  }
  return rep;
}

DiagonalizabilityReport symmetric_diagonalizability_check(const ExactMatrix& a) {
  if (!a.is_symmetric()) throw DomainError("symmetric diagonalizability check needs a symmetric matrix");
  DiagonalizabilityReport rep = diagonalizability(a);
  if (!rep.diagonalizable) throw InternalError("symmetric matrix with a nontrivial Jordan block");
  for (const auto& ev : rep.factors)
    for (const auto& m : ev.rational_roots)
      if (m.geometric != m.algebraic) throw InternalError("symmetric matrix with geometric < algebraic");
  return rep;
}

}  // namespace secular
