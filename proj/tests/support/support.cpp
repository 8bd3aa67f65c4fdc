#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

namespace secular::testing {

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Rational random_rational(Rng& rng, int num_range, int den_max) {
  Rational q(Integer(uniform_int(rng, -num_range, num_range)), Integer(uniform_int(rng, 1, den_max)));
  q.canonicalize();
  return q;
}

PlantedPolynomial planted_polynomial(Rng& rng, int max_degree) {
  static const int kNonSquares[] = {2, 3, 5, 6, 7, 8, 10, 11, 12, 13};
  const int target = uniform_int(rng, 1, max_degree);
  std::map<Rational, int> rational_roots;
  std::map<int, int> surds;
  std::set<std::pair<int, int>> complex_pairs;
  RationalPolynomial p{Rational(1)};
  int degree = 0;
  while (degree < target) {
    const int kind = target - degree >= 2 ? uniform_int(rng, 0, 3) : 0;
    if (kind <= 1) {
      const Rational r = random_rational(rng, 4, 3);
      const int k = std::min(uniform_int(rng, 1, 3), target - degree);
      p *= pow(RationalPolynomial::linear_factor(r), static_cast<unsigned>(k));
      rational_roots[r] += k;
      degree += k;
    } else if (kind == 2) {
      const int d = kNonSquares[uniform_int(rng, 0, 9)];
      p *= RationalPolynomial{Rational(-d), Rational(0), Rational(1)};
      ++surds[d];
      degree += 2;
    } else {
      const int b = uniform_int(rng, -3, 3);
      const int c = b * b / 4 + 1 + uniform_int(rng, 0, 3);
      p *= RationalPolynomial{Rational(c), Rational(b), Rational(1)};
      complex_pairs.insert({b, c});
      degree += 2;
    }
  }
  Rational lead = random_rational(rng, 5, 4);
  if (lead == 0) lead = Rational(Integer(-3), Integer(2));
  PlantedPolynomial out;
  out.poly = p * lead;
  out.distinct_real = static_cast<int>(rational_roots.size() + 2 * surds.size());
  out.distinct = out.distinct_real + static_cast<int>(2 * complex_pairs.size());
  out.rational_roots.assign(rational_roots.begin(), rational_roots.end());
  out.surds.assign(surds.begin(), surds.end());
  return out;
}

int planted_count(const PlantedPolynomial& p, const Rational& lo, const Rational& hi, bool with_multiplicity) {
  // x in (lo, hi] for x = +-sqrt(d), decided exactly by comparing squares.
  const auto inside = [&](int d, int sign) {
    const auto above = [&](const Rational& e) {  // x > e
      if (sign > 0) return e < 0 || e * e < d;
      return e < 0 && e * e > d;
    };
    return above(lo) && !above(hi);
  };
  int count = 0;
  for (const auto& [r, k] : p.rational_roots)
    if (lo < r && r <= hi) count += with_multiplicity ? k : 1;
  for (const auto& [d, k] : p.surds)
    for (int sign : {-1, 1})
      if (inside(d, sign)) count += with_multiplicity ? k : 1;
  return count;
}

ExactMatrix random_integer_matrix(Rng& rng, std::size_t n, int range) {
  ExactMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = uniform_int(rng, -range, range);
  return m;
}

ExactMatrix random_symmetric(Rng& rng, std::size_t n, int range) {
  ExactMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = uniform_int(rng, -range, range);
  return m;
}

ExactMatrix random_invertible(Rng& rng, std::size_t n, int range) {
  for (;;) {
    ExactMatrix m = random_integer_matrix(rng, n, range);
    if (determinant(m) != 0) return m;
  }
}

ExactMatrix rational_orthogonal(Rng& rng, std::size_t n) {
  ExactMatrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      s(i, j) = uniform_int(rng, -2, 2);
      s(j, i) = -s(i, j);
    }
  const ExactMatrix id = ExactMatrix::identity(n);
  return (id - s) * inverse(id + s);
}

PlantedSpectrum planted_symmetric(Rng& rng, std::size_t n, bool repeated) {
  PlantedSpectrum out;
  for (std::size_t i = 0; i < n; ++i) out.eigenvalues.push_back(random_rational(rng, 5, 2));
  if (repeated && n >= 2) {
    const std::size_t copies = static_cast<std::size_t>(uniform_int(rng, 2, static_cast<int>(n)));
    for (std::size_t i = 1; i < copies; ++i) out.eigenvalues[i] = out.eigenvalues[0];
  }
  std::shuffle(out.eigenvalues.begin(), out.eigenvalues.end(), rng);
  const ExactMatrix q = rational_orthogonal(rng, n);
  out.a = q * ExactMatrix::diagonal(out.eigenvalues) * q.transpose();
  return out;
}

PlantedJordan planted_jordan(Rng& rng, std::size_t n) {
  PlantedJordan out;
  out.jordan = ExactMatrix(n, n);
  std::size_t at = 0;
  while (at < n) {
    const int size = uniform_int(rng, 1, static_cast<int>(std::min<std::size_t>(3, n - at)));
    Rational lambda;
    if (!out.blocks.empty() && uniform_int(rng, 0, 2) == 0)
      lambda = out.blocks[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(out.blocks.size()) - 1))].first;
    else
      lambda = random_rational(rng, 3, 2);
    for (int k = 0; k < size; ++k) {
      out.jordan(at + k, at + k) = lambda;
      if (k + 1 < size) out.jordan(at + k, at + k + 1) = 1;
    }
    out.blocks.emplace_back(lambda, size);
    at += static_cast<std::size_t>(size);
  }
  const ExactMatrix p = random_invertible(rng, n, 2);
  out.a = p * out.jordan * inverse(p);
  return out;
}

namespace {

RationalPolynomial cofactor_det(const std::vector<std::vector<RationalPolynomial>>& m, std::vector<std::size_t>& cols,
                                std::size_t row) {
  if (cols.empty()) return RationalPolynomial{Rational(1)};
  RationalPolynomial sum;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const std::size_t c = cols[k];
    if (m[row][c].is_zero()) continue;
    cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(k));
    RationalPolynomial term = m[row][c] * cofactor_det(m, cols, row + 1);
    cols.insert(cols.begin() + static_cast<std::ptrdiff_t>(k), c);
    if (k % 2 == 0) sum += term;
    else sum -= term;
  }
  return sum;
}

}  // namespace

RationalPolynomial cofactor_char_poly(const ExactMatrix& a) {
  const std::size_t n = a.rows();
  std::vector<std::vector<RationalPolynomial>> m(n, std::vector<RationalPolynomial>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m[i][j] = i == j ? RationalPolynomial{-a(i, j), Rational(1)} : RationalPolynomial{-a(i, j)};
  std::vector<std::size_t> cols(n);
  for (std::size_t j = 0; j < n; ++j) cols[j] = j;
  return cofactor_det(m, cols, 0);
}

Eigen::VectorXd rk4(const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& f,
                    const Eigen::VectorXd& x0, double t0, double t1, int steps) {
  const double h = (t1 - t0) / steps;
  Eigen::VectorXd x = x0;
  for (int i = 0; i < steps; ++i) {
    const double t = t0 + i * h;
    const Eigen::VectorXd k1 = f(t, x);
    const Eigen::VectorXd k2 = f(t + h / 2, x + h / 2 * k1);
    const Eigen::VectorXd k3 = f(t + h / 2, x + h / 2 * k2);
    const Eigen::VectorXd k4 = f(t + h, x + h * k3);
    x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return x;
}

Eigen::MatrixXcd expm_taylor(const Eigen::MatrixXcd& a) {
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  const Eigen::MatrixXcd b = a / std::ldexp(1.0, squarings);
  const Eigen::Index n = a.rows();
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(n, n);
  for (int k = 1; k <= 24; ++k) {
    term = term * b / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) s += f(a + i * h);
  return s * h;
}

double rel_diff(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) { return (a - b).norm() / b.norm(); }

double rel_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return (a - b).norm() / b.norm(); }

}  // namespace secular::testing
