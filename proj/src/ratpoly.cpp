#include "secular/ratpoly.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "secular/errors.hpp"

namespace secular {

// ---------------------------------------------------------------------------
// RationalPolynomial

RationalPolynomial::RationalPolynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

RationalPolynomial::RationalPolynomial(std::initializer_list<Rational> coeffs) : coeffs_(coeffs) { trim(); }

RationalPolynomial RationalPolynomial::constant(const Rational& c) { return RationalPolynomial({c}); }

RationalPolynomial RationalPolynomial::monomial(const Rational& c, std::size_t degree) {
  std::vector<Rational> v(degree + 1);
  v[degree] = c;
  return RationalPolynomial(std::move(v));
}

RationalPolynomial RationalPolynomial::linear_factor(const Rational& root) {
  return RationalPolynomial({Rational(-root), Rational(1)});
}

RationalPolynomial RationalPolynomial::from_roots(std::span<const Rational> roots) {
  RationalPolynomial p = constant(1);
  for (const auto& r : roots) p *= linear_factor(r);
  return p;
}

void RationalPolynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational RationalPolynomial::coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : Rational(0); }

const Rational& RationalPolynomial::leading() const {
  if (is_zero()) throw DomainError("leading coefficient of the zero polynomial");
  return coeffs_.back();
}

Rational RationalPolynomial::operator()(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double RationalPolynomial::evaluate(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + it->get_d();
  return acc;
}

std::complex<double> RationalPolynomial::evaluate(std::complex<double> z) const {
  std::complex<double> acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + it->get_d();
  return acc;
}

RationalPolynomial RationalPolynomial::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<Rational> d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * static_cast<long>(i);
  return RationalPolynomial(std::move(d));
}

RationalPolynomial RationalPolynomial::monic() const {
  if (is_zero()) return {};
  RationalPolynomial r = *this;
  const Rational lead = leading();
  for (auto& c : r.coeffs_) c /= lead;
  return r;
}

RationalPolynomial RationalPolynomial::reflected() const {
  RationalPolynomial r = *this;
  for (std::size_t i = 1; i < r.coeffs_.size(); i += 2) r.coeffs_[i] = -r.coeffs_[i];
  return r;
}

RationalPolynomial RationalPolynomial::operator-() const {
  RationalPolynomial r = *this;
  for (auto& c : r.coeffs_) c = -c;
  return r;
}

RationalPolynomial& RationalPolynomial::operator+=(const RationalPolynomial& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  trim();
  return *this;
}

RationalPolynomial& RationalPolynomial::operator-=(const RationalPolynomial& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  trim();
  return *this;
}

RationalPolynomial& RationalPolynomial::operator*=(const RationalPolynomial& o) {
  if (is_zero() || o.is_zero()) {
    coeffs_.clear();
    return *this;
  }
  std::vector<Rational> r(coeffs_.size() + o.coeffs_.size() - 1);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0) continue;
    for (std::size_t j = 0; j < o.coeffs_.size(); ++j) r[i + j] += coeffs_[i] * o.coeffs_[j];
  }
  coeffs_ = std::move(r);
  trim();
  return *this;
}

RationalPolynomial& RationalPolynomial::operator*=(const Rational& c) {
  for (auto& x : coeffs_) x *= c;
  trim();
  return *this;
}

std::string RationalPolynomial::to_string(const std::string& var) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    const Rational& c = coeffs_[static_cast<std::size_t>(i)];
    if (c == 0) continue;
    Rational mag = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    if (mag != 1 || i == 0) os << mag.get_str();
    if (i >= 1) os << var;
    if (i >= 2) os << "^" << i;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Euclidean machinery

PolynomialDivision divmod(const RationalPolynomial& a, const RationalPolynomial& b) {
  if (b.is_zero()) throw DomainError("polynomial division by zero");
  std::vector<Rational> r = a.coeffs();
  const int db = b.degree();
  const Rational& lb = b.leading();
  if (a.degree() < db) return {RationalPolynomial{}, a};
  std::vector<Rational> q(static_cast<std::size_t>(a.degree() - db + 1));
  for (int k = a.degree() - db; k >= 0; --k) {
    const Rational& top = r[static_cast<std::size_t>(k + db)];
    if (top == 0) continue;
    Rational f = top / lb;
    q[static_cast<std::size_t>(k)] = f;
    for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(k + j)] -= f * b.coeffs()[static_cast<std::size_t>(j)];
  }
  r.resize(static_cast<std::size_t>(db));
  return {RationalPolynomial(std::move(q)), RationalPolynomial(std::move(r))};
}

RationalPolynomial gcd(const RationalPolynomial& a, const RationalPolynomial& b) {
  RationalPolynomial x = a, y = b;
  while (!y.is_zero()) {
    RationalPolynomial r = divmod(x, y).remainder;
    x = std::move(y);
    y = r.monic();  // keeps coefficient growth in check
  }
  return x.monic();
}

RationalPolynomial pow(const RationalPolynomial& p, unsigned k) {
  RationalPolynomial r = RationalPolynomial::constant(1);
  for (unsigned i = 0; i < k; ++i) r *= p;
  return r;
}

RationalPolynomial exact_quotient(const RationalPolynomial& a, const RationalPolynomial& b) {
  auto [q, r] = divmod(a, b);
  if (!r.is_zero()) throw InternalError("polynomial division was expected to be exact");
  return q;
}

std::vector<Integer> primitive_integer_coeffs(const RationalPolynomial& p) {
  if (p.is_zero()) throw DomainError("zero polynomial has no primitive part");
  Integer l = 1;
  for (const auto& c : p.coeffs()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  std::vector<Integer> z;
  z.reserve(p.coeffs().size());
  Integer g = 0;
  for (const auto& c : p.coeffs()) {
    Integer v = c.get_num() * (l / c.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    z.push_back(v);
  }
  if (z.back() < 0) g = -g;
  for (auto& v : z) v /= g;
  return z;
}

RationalPolynomial square_free_part(const RationalPolynomial& p) {
  if (p.is_zero()) throw DomainError("square-free part of the zero polynomial");
  if (p.degree() == 0) return p;
  return exact_quotient(p, gcd(p, p.derivative()));
}

std::vector<SquareFreeFactor> square_free_decomposition(const RationalPolynomial& p) {
  if (p.is_zero()) throw DomainError("square-free decomposition of the zero polynomial");
  std::vector<SquareFreeFactor> out;
  if (p.degree() == 0) return out;
  RationalPolynomial a = p.monic();
  RationalPolynomial b = a.derivative();
  RationalPolynomial c = gcd(a, b);
  RationalPolynomial w = exact_quotient(a, c);
  RationalPolynomial y = exact_quotient(b, c);
  RationalPolynomial z = y - w.derivative();
  int k = 1;
  while (w.degree() > 0) {
    RationalPolynomial g = gcd(w, z);
    if (g.degree() > 0) out.push_back({g, k});
    w = exact_quotient(w, g);
    y = exact_quotient(z, g);
    z = y - w.derivative();
    ++k;
  }
  return out;
}

int root_multiplicity(const RationalPolynomial& p, const Rational& root) {
  if (p.is_zero()) throw DomainError("root multiplicity in the zero polynomial");
  int m = 0;
  RationalPolynomial q = p;
  const RationalPolynomial f = RationalPolynomial::linear_factor(root);
  while (q.degree() > 0 && q(root) == 0) {
    q = exact_quotient(q, f);
    ++m;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Sign variations

bool operator<(const Endpoint& a, const Endpoint& b) {
  if (a.kind_ != b.kind_) return static_cast<int>(a.kind_) < static_cast<int>(b.kind_);
  return a.is_finite() && a.value_ < b.value_;
}

namespace {

int sign_at(const RationalPolynomial& p, const Endpoint& x) {
  if (p.is_zero()) return 0;
  switch (x.kind()) {
    case Endpoint::Kind::finite:
      return sgn(p(x.value()));
    case Endpoint::Kind::plus_infinity:
      return sgn(p.leading());
    case Endpoint::Kind::minus_infinity:
      return (p.degree() % 2 == 0 ? 1 : -1) * sgn(p.leading());
  }
  return 0;
}

template <class Signs>
int count_variations(const Signs& signs) {
  int v = 0, last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++v;
    last = s;
  }
  return v;
}

}  // namespace

int SturmChain::variations(const Endpoint& x) const {
  std::vector<int> s;
  s.reserve(polys.size());
  for (const auto& p : polys) s.push_back(sign_at(p, x));
  return count_variations(s);
}

SturmChain sturm_chain(const RationalPolynomial& p) {
  if (p.is_zero()) throw DomainError("Sturm chain of the zero polynomial");
  SturmChain chain;
  chain.polys.push_back(square_free_part(p));
  RationalPolynomial d = chain.polys.front().derivative();
  if (d.is_zero()) return chain;
  chain.polys.push_back(d);
  while (true) {
    const auto& a = chain.polys[chain.polys.size() - 2];
    const auto& b = chain.polys.back();
    RationalPolynomial r = -divmod(a, b).remainder;
    if (r.is_zero()) break;
    chain.polys.push_back(std::move(r));
  }
  if (chain.polys.back().degree() != 0) throw InternalError("Sturm chain of a square-free polynomial must end in a constant");
  return chain;
}

Rational cauchy_bound(const RationalPolynomial& p) {
  if (p.is_zero()) throw DomainError("root bound of the zero polynomial");
  Rational m = 0;
  const Rational lead = abs(p.leading());
  for (int i = 0; i < p.degree(); ++i) m = std::max(m, Rational(abs(p.coeffs()[static_cast<std::size_t>(i)]) / lead));
  return 1 + m;
}

Rational root_separation_bound(const RationalPolynomial& p) {
  RationalPolynomial q = square_free_part(p);
  const int d = q.degree();
  if (d <= 1) return Rational(1);
  // Mahler: sep > sqrt(3) d^{-(d+2)/2} ||q||_2^{1-d} for square-free integer q.
  // Weakened to a rational: sqrt(3) -> 1, ||.||_2 -> ||.||_1, exponent rounded up.
  Integer norm1 = 0;
  for (const auto& c : primitive_integer_coeffs(q)) norm1 += abs(c);
  Integer dpow, npow;
  mpz_ui_pow_ui(dpow.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>((d + 3) / 2));
  mpz_pow_ui(npow.get_mpz_t(), norm1.get_mpz_t(), static_cast<unsigned long>(d - 1));
  Rational bound(1, dpow * npow);
  bound.canonicalize();
  return bound;
}

int count_real_roots(const RationalPolynomial& p, const Endpoint& lo, const Endpoint& hi) {
  if (p.is_zero()) throw DomainError("root count of the zero polynomial");
  if (!(lo < hi)) throw DomainError("degenerate interval: lo must be below hi");
  SturmChain chain = sturm_chain(p);
  const RationalPolynomial& q = chain.polys.front();
  Endpoint a = lo, b = hi;
  const bool lo_root = a.is_finite() && q(a.value()) == 0;
  const bool hi_root = b.is_finite() && q(b.value()) == 0;
  if (lo_root || hi_root) {
    const Rational nudge = root_separation_bound(q) / 2;
    if (lo_root) {
      a = Endpoint(a.value() + nudge);
      if (!(a < b) && !hi_root) return 0;
    }
    if (hi_root) b = Endpoint(b.value() + nudge);
  }
  return chain.variations(a) - chain.variations(b);
}

int VariationBounds::budan_fourier(const Rational& lo, const Rational& hi) const {
  if (!(lo < hi)) throw DomainError("degenerate interval: lo must be below hi");
  std::vector<int> slo, shi;
  RationalPolynomial d = poly;
  while (!d.is_zero()) {
    slo.push_back(sgn(d(lo)));
    shi.push_back(sgn(d(hi)));
    d = d.derivative();
  }
  return count_variations(slo) - count_variations(shi);
}

VariationBounds variation_bounds(const RationalPolynomial& p) {
  if (p.is_zero()) throw DomainError("variation bounds of the zero polynomial");
  std::vector<int> s;
  for (const auto& c : p.coeffs()) s.push_back(sgn(c));
  return {count_variations(s), p};
}

// ---------------------------------------------------------------------------
// Isolation and refinement

namespace {

// A split point strictly inside (lo, hi) that is not a root of q.
Rational split_point(const RationalPolynomial& q, const Rational& lo, const Rational& hi) {
  const Rational w = hi - lo;
  for (long den = 2;; ++den) {
    for (long num = 1; num < den; ++num) {
      if (std::gcd(num, den) != 1) continue;
      Rational m = lo + w * Rational(num, den);
      if (q(m) != 0) return m;
    }
  }
}

void bisect(const SturmChain& chain, const Rational& lo, const Rational& hi, int vlo, int vhi,
            std::vector<RootInterval>& out) {
  const int n = vlo - vhi;
  if (n == 0) return;
  if (n == 1) {
    out.push_back({lo, hi, 1});
    return;
  }
  Rational mid = split_point(chain.polys.front(), lo, hi);
  const int vmid = chain.variations(mid);
  bisect(chain, lo, mid, vlo, vmid, out);
  bisect(chain, mid, hi, vmid, vhi, out);
}

}  // namespace

std::vector<RootInterval> isolate_real_roots(const RationalPolynomial& p) {
  if (p.is_zero()) throw DomainError("root isolation of the zero polynomial");
  std::vector<RootInterval> out;
  if (p.degree() == 0) return out;
  SturmChain chain = sturm_chain(p);
  const Rational b = cauchy_bound(chain.polys.front());
  bisect(chain, -b, b, chain.variations(Rational(-b)), chain.variations(b), out);
  return out;
}

std::vector<RootInterval> isolate_real_roots(const RationalPolynomial& p, const Rational& lo, const Rational& hi) {
  if (!(lo < hi)) throw DomainError("degenerate interval: lo must be below hi");
  std::vector<RootInterval> out;
  for (const auto& iv : isolate_real_roots(p)) {
    if (iv.hi <= lo || iv.lo >= hi) continue;
    Rational a = std::max(iv.lo, lo);
    Rational b = std::min(iv.hi, hi);
    if (count_real_roots(p, a, b) == 1) out.push_back({a, b, 1});
  }
  return out;
}

Rational refine_root(const RationalPolynomial& p, const RootInterval& iv, const Rational& tol) {
  if (tol <= 0) throw DomainError("refinement tolerance must be positive");
  if (!(iv.lo < iv.hi)) throw DomainError("degenerate root interval");
  const RationalPolynomial q = square_free_part(p);
  if (count_real_roots(q, iv.lo, iv.hi) != 1) throw DomainError("interval does not isolate exactly one root");
  const RationalPolynomial dq = q.derivative();

  Rational a = iv.lo, b = iv.hi;
  if (q(b) == 0) return b;
  while (q(a) == 0) {  // root at a is outside (a, b]; move a inward without losing the root
    Rational m = (a + b) / 2;
    if (q(m) == 0) return m;
    if (count_real_roots(q, m, b) == 1) a = m; else b = m;
  }
  int sa = sgn(q(a));

  // Work precision for Newton iterates: a few bits beyond the tolerance.
  unsigned bits = 64;
  {
    Rational t = tol;
    while (t < 1 && bits < 4096) { t *= 2; ++bits; }
  }
  const Rational two_tol = 2 * tol;
  const Rational half_tol = tol / 2;
  const Rational flat = Rational(1, Integer(1) << 40);

  Rational x = (a + b) / 2;
  int stalled = 0;
  for (int iter = 0; iter < 100000; ++iter) {
    if (b - a <= two_tol) return (a + b) / 2;
    const Rational width = b - a;

    bool newton_ok = false;
    Rational xn;
    const Rational dx = dq(x);
    Rational dmax = std::max({abs(dq(a)), abs(dq(b)), abs(dq((a + b) / 2))});
    if (dx != 0 && abs(dx) >= flat * dmax && stalled < 4) {
      xn = round_dyadic(x - q(x) / dx, bits);
      newton_ok = a < xn && xn < b;
    }
    if (!newton_ok) xn = (a + b) / 2;

    const int sx = sgn(q(xn));
    if (sx == 0) return xn;
    if (sx == sa) a = xn; else b = xn;

    if (newton_ok) {
      // Close the bracket from the far side once Newton has settled.
      if (abs(xn - x) <= half_tol) {
        Rational lo_probe = xn - half_tol, hi_probe = xn + half_tol;
        if (a < lo_probe && lo_probe < b) {
          int s = sgn(q(lo_probe));
          if (s == 0) return lo_probe;
          if (s == sa) a = lo_probe; else b = lo_probe;
        }
        if (a < hi_probe && hi_probe < b) {
          int s = sgn(q(hi_probe));
          if (s == 0) return hi_probe;
          if (s == sa) a = hi_probe; else b = hi_probe;
        }
      }
      stalled = (b - a) * 2 > width ? stalled + 1 : 0;
    } else {
      stalled = 0;
    }
    x = (a < xn && xn < b) ? xn : (a + b) / 2;
  }
  throw NonConvergenceError("root refinement exceeded its iteration budget");
}

std::vector<Rational> rational_roots(const RationalPolynomial& p) {
  if (p.is_zero()) throw DomainError("rational roots of the zero polynomial");
  std::vector<Rational> roots;
  if (p.degree() <= 0) return roots;
  const RationalPolynomial q = square_free_part(p);
  const auto z = primitive_integer_coeffs(q);
  const Integer lead = z.back();  // positive
  // A rational root r = u/v in lowest terms has v | lead, so lead*r is an integer.
  for (auto iv : isolate_real_roots(q)) {
    bool exact_hit = false;
    while ((iv.hi - iv.lo) * lead >= Rational(1, 2)) {
      Rational m = (iv.lo + iv.hi) / 2;
      if (q(m) == 0) {
        roots.push_back(m);
        exact_hit = true;
        break;
      }
      if (count_real_roots(q, iv.lo, m) == 1) iv.hi = m; else iv.lo = m;
    }
    if (exact_hit) continue;
    Rational scaled_hi = iv.hi * lead;
    Integer k;
    mpz_fdiv_q(k.get_mpz_t(), scaled_hi.get_num_mpz_t(), scaled_hi.get_den_mpz_t());
    Rational cand(k, lead);
    cand.canonicalize();
    if (cand > iv.lo && cand <= iv.hi && q(cand) == 0) roots.push_back(cand);
  }
  return roots;
}

}  // namespace secular
