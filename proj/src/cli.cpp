#include "secular/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "secular/errors.hpp"
#include "secular/floquet.hpp"
#include "secular/jordan.hpp"
#include "secular/linode.hpp"
#include "secular/matrixcore.hpp"
#include "secular/pcr3bp.hpp"
#include "secular/ratpoly.hpp"
#include "secular/section.hpp"

namespace secular::cli {

using io::Json;

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "usage"; }
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Json>> rows;
  std::vector<std::pair<std::string, std::string>> notes;  // "# key: value" lines
};

struct Result {
  Json doc = Json::object();
  std::optional<Table> table;
};

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

std::string cell(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return io::format_double(v.get<double>());
  return v.dump();
}

std::string render(const RunConfig& cfg, const Result& r) {
  if (cfg.format == "csv") {
    if (!r.table) throw DomainError("subcommand '" + cfg.subcommand + "' has no CSV form");
    std::ostringstream os;
    os << "# config: " << cfg.to_json().dump() << "\n";
    for (const auto& [k, v] : r.table->notes) os << "# " << k << ": " << v << "\n";
    for (std::size_t i = 0; i < r.table->header.size(); ++i) os << (i ? "," : "") << r.table->header[i];
    os << "\n";
    for (const auto& row : r.table->rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell(row[i]);
      os << "\n";
    }
    return os.str();
  }
  Json out = Json::object();
  out["config"] = cfg.to_json();
  for (const auto& [k, v] : r.doc.items()) out[k] = v;
  if (r.table) {
    for (const auto& [k, v] : r.table->notes) out[k] = v;
    out["columns"] = r.table->header;
    out["rows"] = r.table->rows;
  }
  return out.dump(2) + "\n";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot write '" + path + "'");
  f << text;
  if (!f) throw DomainError("failed writing '" + path + "'");
}

const std::string& need(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string("missing required option ") + flag);
  return value;
}

Endpoint parse_endpoint(const std::string& s, bool upper) {
  if (s.empty()) return upper ? Endpoint::plus_infinity() : Endpoint::minus_infinity();
  if (s == "-inf") return Endpoint::minus_infinity();
  if (s == "inf" || s == "+inf") return Endpoint::plus_infinity();
  return Endpoint(parse_rational(s));
}

std::string endpoint_str(const Endpoint& e) {
  switch (e.kind()) {
    case Endpoint::Kind::minus_infinity: return "-inf";
    case Endpoint::Kind::plus_infinity: return "inf";
    default: return to_string(e.value());
  }
}

io::MatrixDocument load_matrix(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') return io::matrix_from_json(io::parse_json(arg, "matrix"));
  return io::read_matrix_file(arg);
}

RationalPolynomial load_polynomial(const std::string& arg) {
  if (!arg.empty() && arg.front() == '@') return io::parse_polynomial(io::read_file(arg.substr(1)));
  return io::parse_polynomial(arg);
}

const ExactMatrix& exact_of(const io::MatrixDocument& m, const std::string& what) {
  if (m.flavor != io::Flavor::exact) throw UnsupportedError(what + " needs an exact matrix");
  return m.exact;
}

Json intervals_json(const std::vector<RootInterval>& ivs) {
  Json out = Json::array();
  for (const auto& iv : ivs) out.push_back({{"lo", to_string(iv.lo)}, {"hi", to_string(iv.hi)}});
  return out;
}

Json verdict_json(const StabilityVerdict& v) {
  Json w = Json::array();
  for (const auto& x : v.witnesses) w.push_back({{"exponent", io::to_json(x.exponent)}, {"block_size", x.block_size}});
  return {{"tag", to_string(v.tag)}, {"lagrange_strict", v.lagrange_strict}, {"marginal", v.marginal}, {"witnesses", w}};
}

Json solution_json(const LinearSolution& s) {
  Json terms = Json::array();
  for (const auto& t : s.terms) {
    Json poly = Json::array();
    for (const auto& c : t.coeffs) poly.push_back(io::to_json(c));
    terms.push_back({{"lambda", io::to_json(t.lambda)}, {"real_part_sign", t.real_part_sign}, {"poly", poly}});
  }
  return {{"dim", s.dim}, {"max_degree", s.max_degree()}, {"secular", s.has_secular_terms()}, {"terms", terms}};
}

Json complex_list(const std::vector<std::complex<double>>& v) {
  Json out = Json::array();
  for (const auto& z : v) out.push_back(io::to_json(z));
  return out;
}

Json numeric_blocks_json(const std::vector<NumericJordanBlock>& blocks) {
  Json out = Json::array();
  for (const auto& b : blocks)
    out.push_back({{"lambda", io::to_json(b.eigenvalue)}, {"algebraic", b.algebraic}, {"sizes", b.sizes}});
  return out;
}

Json real_matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw UsageError("grid counts must be positive");
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  return out;
}

// "a0:a1:na,q0:q1:nq"
std::pair<std::vector<double>, std::vector<double>> parse_grid(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw ParseError("grid must look like a0:a1:na,q0:q1:nq");
  auto axis = [](const std::string& part) {
    std::vector<std::string> f;
    std::stringstream ss(part);
    for (std::string x; std::getline(ss, x, ':');) f.push_back(x);
    if (f.size() != 3) throw ParseError("grid axis '" + part + "' must look like lo:hi:count");
    const double n = io::parse_double(f[2]);
    if (n != std::floor(n) || n < 1 || n > 1e6) throw ParseError("grid count '" + f[2] + "' must be a positive integer");
    return linspace(io::parse_double(f[0]), io::parse_double(f[1]), static_cast<int>(n));
  };
  return {axis(s.substr(0, comma)), axis(s.substr(comma + 1))};
}

section::SectionPoint parse_section_point(const std::string& s, const char* flag) {
  const auto v = io::parse_doubles(need(s, flag));
  if (v.size() != 2) throw ParseError(std::string(flag) + " needs two values x,vx");
  return {v[0], v[1]};
}

Json section_point_json(const section::SectionPoint& p) { return {{"x", p.x}, {"vx", p.vx}}; }

Json linearization_json(const section::MapLinearization& lin) {
  return {{"method", lin.method == section::JacobianMethod::stm ? "stm" : "finite_difference"},
          {"jacobian", real_matrix_json(lin.jacobian)},
          {"eigenvalues", Json::array({io::to_json(lin.eigenvalues[0]), io::to_json(lin.eigenvalues[1])})},
          {"det", lin.det},
          {"type", to_string(lin.type)}};
}

// Option storage for every subcommand.
struct Options {
  std::string poly, lo, hi, tol = "1e-12";
  std::string matrix, flavor, x0, v0, method = "jordan", form = "first";
  bool classify3 = false;
  std::string system = "hill", a, q, grid;
  std::string mu, point, amplitude, state, t;
  int samples = 100;
  std::string jacobi, start, fixed, guess, side = "plus", prefix = "manifold", jacobian = "stm";
  int direction = 1, n = 10, steps = 30, seeds = 200;
  double offset = 1e-7;
  double fd_step = 1e-6;
};

Result sturm(const std::string& which, const Options& o) {
  const RationalPolynomial p = load_polynomial(need(o.poly, "--poly"));
  Result r;
  r.doc["poly"] = io::to_json(p);
  if (which == "count") {
    const Endpoint lo = parse_endpoint(o.lo, false), hi = parse_endpoint(o.hi, true);
    r.doc["lo"] = endpoint_str(lo);
    r.doc["hi"] = endpoint_str(hi);
    r.doc["count"] = count_real_roots(p, lo, hi);
  } else if (which == "isolate") {
    std::vector<RootInterval> ivs;
    if (o.lo.empty() && o.hi.empty()) {
      ivs = isolate_real_roots(p);
    } else {
      ivs = isolate_real_roots(p, parse_rational(need(o.lo, "--lo")), parse_rational(need(o.hi, "--hi")));
      r.doc["lo"] = o.lo;
      r.doc["hi"] = o.hi;
    }
    Json out = intervals_json(ivs);
    for (std::size_t i = 0; i < ivs.size(); ++i)
      out[i]["approx"] = to_double(refine_root(p, ivs[i], Rational(Integer(1), Integer(1) << 40)));
    r.doc["intervals"] = out;
  } else {
    const RootInterval iv{parse_rational(need(o.lo, "--lo")), parse_rational(need(o.hi, "--hi")), 1};
    const Rational tol = parse_rational(o.tol);
    if (tol <= 0) throw DomainError("--tol must be positive");
    const Rational root = refine_root(p, iv, tol);
    r.doc["lo"] = to_string(iv.lo);
    r.doc["hi"] = to_string(iv.hi);
    r.doc["tol"] = to_string(tol);
    r.doc["root"] = to_string(root);
    r.doc["approx"] = to_double(root);
  }
  return r;
}

Result charpoly(const Options& o) {
  const auto m = load_matrix(need(o.matrix, "--matrix"));
  Result r;
  r.doc["flavor"] = io::to_string(m.flavor);
  r.doc["variable"] = "S";
  if (m.flavor == io::Flavor::exact) {
    const RationalPolynomial cp = char_poly(m.exact).poly;
    r.doc["char_poly"] = io::to_json(cp);
    Json sq = Json::array();
    for (const auto& f : square_free_decomposition(cp))
      sq.push_back({{"factor", io::to_json(f.factor)}, {"multiplicity", f.multiplicity}});
    r.doc["square_free"] = sq;
    r.doc["distinct_real_roots"] = count_real_roots(cp);
  } else {
    r.doc["char_poly_numeric"] = complex_list(char_poly(m.numeric));
  }
  return r;
}

Result inertia_cmd(const Options& o) {
  const auto m = load_matrix(need(o.matrix, "--matrix"));
  const QuadraticForm q(exact_of(m, "inertia"));
  const SquaresReduction red = reduce_to_squares(q);
  const Inertia in = inertia(q);
  Result r;
  r.doc["n_pos"] = in.n_pos;
  r.doc["n_neg"] = in.n_neg;
  r.doc["n_zero"] = in.n_zero;
  r.doc["coefficients"] = io::to_json(red.coefficients);
  r.doc["transform"] = io::to_json(red.transform);
  return r;
}

Result hermite(const Options& o) {
  RationalPolynomial p;
  Result r;
  if (!o.poly.empty()) {
    p = load_polynomial(o.poly);
  } else {
    p = char_poly(exact_of(load_matrix(need(o.matrix, "--matrix or --poly")), "hermite-count")).poly;
  }
  const HermiteCount h = hermite_root_count(p);
  r.doc["poly"] = io::to_json(p);
  r.doc["distinct"] = h.distinct;
  r.doc["distinct_real"] = h.distinct_real;
  r.doc["power_sums"] = io::to_json(ExactVector(h.power_sums));
  r.doc["hankel"] = io::to_json(h.hankel);
  return r;
}

Result interlace(const Options& o) {
  const auto m = load_matrix(need(o.matrix, "--matrix"));
  const InterlacingReport rep = interlacing_check(exact_of(m, "interlace"));
  Result r;
  r.doc["passed"] = rep.passed;
  r.doc["full_roots"] = intervals_json(rep.full_roots);
  r.doc["sub_roots"] = intervals_json(rep.sub_roots);
  Json gaps = Json::array();
  for (const auto& g : rep.gaps)
    gaps.push_back({{"probe", to_string(g.probe)}, {"below_full", g.below_full}, {"below_sub", g.below_sub}, {"ok", g.ok}});
  r.doc["gaps"] = gaps;
  return r;
}

Result jordan(const Options& o, const RunConfig& cfg) {
  const auto m = load_matrix(need(o.matrix, "--matrix"));
  const std::string flavor = o.flavor.empty() ? io::to_string(m.flavor) : o.flavor;
  if (flavor != "exact" && flavor != "numeric") throw UsageError("--flavor must be exact or numeric");
  NumericJordanOptions opts;
  opts.cluster_tol = cfg.cluster_tol;
  opts.rank_tol = cfg.rank_tol;
  Result r;
  r.doc["flavor"] = flavor;
  if (flavor == "exact") {
    const ExactJordan jf = jordan_form(exact_of(m, "exact Jordan form"));
    r.doc["J"] = io::to_json(jf.jordan);
    r.doc["P"] = io::to_json(jf.transform);
    Json blocks = Json::array();
    for (const auto& b : jf.blocks) blocks.push_back({{"lambda", to_string(b.eigenvalue)}, {"sizes", b.sizes}});
    r.doc["blocks"] = blocks;
  } else {
    const NumericJordan jf = jordan_form(m.as_complex(), opts);
    r.doc["J"] = io::to_json(jf.jordan);
    r.doc["P"] = io::to_json(jf.transform);
    r.doc["blocks"] = numeric_blocks_json(jf.blocks);
    r.doc["residual"] = jf.residual;
    r.doc["ill_conditioned"] = jf.ill_conditioned;
    r.doc["warnings"] = jf.warnings;
  }
  if (o.classify3) {
    if (m.dim() != 3) throw DomainError("--classify3 needs a 3x3 matrix");
    const CanonicalType3 t =
        flavor == "exact" ? classify_3x3(exact_of(m, "exact classification")) : classify_3x3(m.as_complex(), opts);
    r.doc["type3"] = {{"tag", std::string(1, t.tag)}, {"scalar", t.scalar}};
  }
  return r;
}

Result linsolve(const Options& o, const RunConfig& cfg) {
  const auto m = load_matrix(need(o.matrix, "--matrix"));
  if (o.method != "jordan" && o.method != "residue") throw UsageError("--method must be jordan or residue");
  if (o.form != "first" && o.form != "second") throw UsageError("--form must be first or second");
  const bool second = o.form == "second";
  Result r;
  r.doc["method"] = o.method;
  r.doc["form"] = o.form;
  if (m.flavor == io::Flavor::numeric) {
    if (o.method == "residue" || second) throw UnsupportedError("numeric matrices support only --method jordan --form first");
    const auto x = io::parse_doubles(need(o.x0, "--x0"));
    if (x.size() != m.dim()) throw DomainError("--x0 has the wrong dimension");
    NumericJordanOptions opts;
    opts.cluster_tol = cfg.cluster_tol;
    opts.rank_tol = cfg.rank_tol;
    const ComplexVector x0 = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())).cast<std::complex<double>>();
    r.doc["solution"] = solution_json(solve_constant(m.numeric, x0, opts));
    return r;
  }
  const ExactMatrix& a = m.exact;
  const ExactVector x0 = io::parse_rationals(need(o.x0, "--x0"));
  if (x0.size() != a.rows()) throw DomainError("--x0 has the wrong dimension");
  auto solve = [&](const ExactMatrix& sys, const ExactVector& init) {
    return o.method == "jordan" ? solve_constant(sys, init) : solve_residue(sys, init);
  };
  if (!second) {
    r.doc["solution"] = solution_json(solve(a, x0));
    r.doc["verdict"] = verdict_json(classify_stability(a, SystemForm::first_order, x0));
    return r;
  }
  ExactVector v0 = o.v0.empty() ? ExactVector(a.rows(), Rational(0)) : io::parse_rationals(o.v0);
  if (v0.size() != a.rows()) throw DomainError("--v0 has the wrong dimension");
  ExactVector init = x0;
  init.insert(init.end(), v0.begin(), v0.end());
  r.doc["solution"] = solution_json(solve(doubled_system(a), init));
  r.doc["verdict"] = verdict_json(classify_stability(a, SystemForm::second_order, x0, v0));
  if (a.is_symmetric()) {
    const LagrangeOscillation lo = solve_lagrange_oscillation(a, x0, v0);
    Json modes = Json::array();
    for (const auto& md : lo.modes) {
      const char* kind = md.kind == OscillationMode::Kind::oscillatory  ? "oscillatory"
                         : md.kind == OscillationMode::Kind::exponential ? "exponential"
                                                                         : "drift";
      Json shape = Json::array();
      for (Eigen::Index i = 0; i < md.shape.size(); ++i) shape.push_back(md.shape(i));
      modes.push_back({{"alpha", md.alpha}, {"frequency", md.frequency}, {"kind", kind}, {"shape", shape},
                       {"amplitude_x", md.amplitude_x}, {"amplitude_v", md.amplitude_v}});
    }
    r.doc["modes"] = modes;
  }
  return r;
}

Result floquet_cmd(const Options& o, const RunConfig& cfg) {
  if (o.system != "hill") throw UsageError("only --system hill is built in");
  Result r;
  if (!o.grid.empty()) {
    const auto [as, qs] = parse_grid(o.grid);
    const auto rows = hill_sweep(as, qs, cfg.integrator_tol);
    Table t;
    t.header = {"a", "q", "max_modulus", "verdict"};
    for (const auto& row : rows) t.rows.push_back({row.a, row.q, row.max_modulus, to_string(row.verdict.tag)});
    r.table = std::move(t);
    return r;
  }
  const double a = io::parse_double(need(o.a, "--a")), q = io::parse_double(need(o.q, "--q"));
  const Monodromy mono = monodromy(hill_system(a, q), cfg.integrator_tol);
  const ExponentSet exps = characteristic_exponents(mono, cfg.cluster_tol);
  r.doc["system"] = "hill";
  r.doc["a"] = a;
  r.doc["q"] = q;
  r.doc["period"] = mono.period;
  r.doc["monodromy"] = real_matrix_json(mono.m);
  r.doc["multipliers"] = complex_list(exps.multipliers);
  r.doc["exponents"] = complex_list(exps.exponents);
  r.doc["blocks"] = numeric_blocks_json(exps.blocks);
  r.doc["verdict"] = verdict_json(classify_periodic_stability(exps, cfg.band));
  return r;
}

Result pcr3bp_cmd(const std::string& which, const Options& o, const RunConfig& cfg) {
  using namespace pcr3bp;
  const double mu = io::parse_double(need(o.mu, "--mu"));
  validate_mu(mu);
  Result r;
  r.doc["mu"] = mu;
  if (which == "lagrange") {
    Json pts = Json::array();
    for (const auto& p : libration_points(mu))
      pts.push_back({{"label", to_string(p.label)}, {"x", p.x}, {"y", p.y},
                     {"jacobi", jacobi_constant(RotatingState(p.x, p.y, 0, 0), mu)}});
    r.doc["points"] = pts;
  } else if (which == "stability") {
    const LibrationStability st = libration_stability(mu, parse_label(need(o.point, "--point")));
    r.doc["point"] = {{"label", to_string(st.point.label)}, {"x", st.point.x}, {"y", st.point.y}};
    r.doc["b"] = st.b;
    r.doc["c"] = st.c;
    r.doc["roots"] = complex_list(st.roots);
    r.doc["verdict"] = st.linearly_stable ? "stable" : "unstable";
    r.doc["classification"] = verdict_json(st.verdict);
  } else if (which == "orbit") {
    const Label l = parse_label(o.point.empty() ? std::string("L1") : o.point);
    const OrbitGuess g = lyapunov_seed(mu, l, io::parse_double(need(o.amplitude, "--seed-amplitude")));
    CorrectionConfig cc;
    cc.integrator_tol = cfg.orbit_tol;
    const OrbitRecord orb = correct_periodic(g, mu, cc);
    const OrbitExponentReport rep = orbit_exponents(orb, cfg.unit_scale);
    r.doc["point"] = to_string(l);
    r.doc["x0"] = {orb.initial(0), orb.initial(1), orb.initial(2), orb.initial(3)};
    r.doc["T"] = orb.period;
    r.doc["C"] = orb.jacobi;
    r.doc["iterations"] = orb.iterations;
    r.doc["crossing_residual"] = orb.crossing_residual;
    r.doc["closure_residual"] = orb.closure_residual;
    r.doc["jacobi_drift"] = orb.jacobi_drift;
    r.doc["multipliers"] = complex_list(rep.exponents.multipliers);
    r.doc["exponents"] = complex_list(rep.exponents.exponents);
    r.doc["verdict"] = to_string(rep.verdict.tag);
    r.doc["report"] = {{"lambda", rep.lambda},
                       {"unit_cluster_tol", rep.unit_cluster_tol},
                       {"unit_multiplicity", rep.unit_multiplicity},
                       {"unit_deviation", rep.unit_deviation},
                       {"reciprocal_error", rep.reciprocal_error},
                       {"det_error", rep.det_error},
                       {"flags", rep.flags}};
  } else {
    const auto s = io::parse_doubles(need(o.state, "--state"));
    if (s.size() != 4) throw ParseError("--state needs four values x,y,vx,vy");
    const double t = io::parse_double(need(o.t, "--t"));
    if (o.samples < 1) throw UsageError("--samples must be positive");
    Table tab;
    tab.header = {"t", "x", "y", "vx", "vy", "C"};
    for (const auto& smp : propagate(RotatingState(s[0], s[1], s[2], s[3]), mu, t, o.samples, cfg.orbit_tol))
      tab.rows.push_back({smp.t, smp.s(0), smp.s(1), smp.s(2), smp.s(3), smp.jacobi});
    r.doc.erase("mu");
    r.table = std::move(tab);
  }
  return r;
}

Result section_cmd(const std::string& which, const Options& o, const RunConfig& cfg) {
  using namespace section;
  const double mu = io::parse_double(need(o.mu, "--mu"));
  const SectionDef sd{o.direction, io::parse_double(need(o.jacobi, "--C"))};
  SectionConfig sc;
  sc.integrator_tol = cfg.section_tol;
  if (!(o.fd_step > 0)) throw UsageError("--fd-step must be positive");
  sc.fd_step = o.fd_step;
  Result r;
  if (which == "crossings") {
    const SectionPoint start = parse_section_point(o.start, "--start");
    if (o.n < 0) throw UsageError("--n must be non-negative");
    const CrossingSequence seq = section_crossings(start, mu, sd, o.n, sc);
    Table t;
    t.header = {"i", "x", "vx"};
    t.notes.push_back({"truncation", to_string(seq.reason)});
    t.rows.push_back({0, start.x, start.vx});
    for (std::size_t i = 0; i < seq.points.size(); ++i)
      t.rows.push_back({static_cast<int>(i + 1), seq.points[i].x, seq.points[i].vx});
    r.table = std::move(t);
    return r;
  }
  if (which == "fixed") {
    if (o.jacobian != "stm" && o.jacobian != "fd") throw UsageError("--jacobian must be stm or fd");
    const FixedPointResult fp = fixed_point(parse_section_point(o.guess, "--guess"), mu, sd, 1e-11, sc);
    r.doc["point"] = section_point_json(fp.point);
    r.doc["residual"] = fp.residual;
    r.doc["iterations"] = fp.iterations;
    r.doc["linearization"] = linearization_json(linearize_map(
        fp.point, mu, sd, sc, o.jacobian == "stm" ? JacobianMethod::stm : JacobianMethod::finite_difference, cfg.band));
    return r;
  }
  if (o.side != "plus" && o.side != "minus") throw UsageError("--side must be plus or minus");
  const SectionPoint fixed = parse_section_point(o.fixed, "--fixed");
  ManifoldConfig mc;
  mc.steps = o.steps;
  mc.seeds = o.seeds;
  mc.seed_offset = o.offset;
  const bool plus = o.side == "plus";
  const ManifoldPolyline wu =
      manifold_segment(fixed, mu, sd, plus ? Branch::unstable_plus : Branch::unstable_minus, mc, sc);
  const ManifoldPolyline ws = manifold_segment(fixed, mu, sd, plus ? Branch::stable_plus : Branch::stable_minus, mc, sc);
  const HomoclinicReport h = find_homoclinic(wu, ws);
  r.doc["fixed"] = section_point_json(fixed);
  r.doc["linearization"] = linearization_json(linearize_map(fixed, mu, sd, sc, JacobianMethod::stm, cfg.band));
  auto poly = [&](const ManifoldPolyline& m, const std::string& tag) {
    Json j = {{"branch", to_string(m.branch)},
              {"points", m.points.size()},
              {"truncation", to_string(m.reason)},
              {"direction", {m.direction(0), m.direction(1)}},
              {"eigenvalue", io::to_json(m.eigenvalue)}};
    if (!o.prefix.empty()) {
      Result csv;
      Table t;
      t.header = {"k", "x", "vx"};
      t.notes.push_back({"branch", to_string(m.branch)});
      t.notes.push_back({"truncation", to_string(m.reason)});
      for (std::size_t k = 0; k < m.points.size(); ++k)
        t.rows.push_back({static_cast<int>(k), m.points[k].x, m.points[k].vx});
      csv.table = std::move(t);
      RunConfig c = cfg;
      c.format = "csv";
      const std::string path = o.prefix + "-" + tag + ".csv";
      write_text(path, render(c, csv));
      j["file"] = path;
    } else {
      Json pts = Json::array();
      for (const auto& p : m.points) pts.push_back({p.x, p.vx});
      j["polyline"] = pts;
    }
    return j;
  };
  r.doc["unstable"] = poly(wu, "unstable");
  r.doc["stable"] = poly(ws, "stable");
  Json hj = {{"found", h.found}};
  if (h.found) {
    hj["x"] = h.point.x;
    hj["vx"] = h.point.vx;
    hj["angle"] = h.angle;
    hj["unstable_index"] = h.unstable_index;
    hj["stable_index"] = h.stable_index;
  }
  r.doc["homoclinic"] = hj;
  return r;
}

void collect_params(const CLI::App* app, Json& params) {
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help") continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      params[name] = res.size() == 1 ? Json(res.front()) : Json(res);
    } else if (!opt->get_default_str().empty()) {
      params[name] = opt->get_default_str();
    }
  }
}

}  // namespace

void RunConfig::validate() const {
  for (double v : {integrator_tol, orbit_tol, section_tol, cluster_tol, rank_tol, unit_scale, band})
    if (!(v > 0) || !std::isfinite(v)) throw DomainError("tolerances must be positive and finite");
  if (!format.empty() && format != "json" && format != "csv") throw DomainError("--format must be json or csv");
}

Json RunConfig::to_json() const {
  return {{"version", kVersion},         {"subcommand", subcommand},   {"integrator_tol", integrator_tol},
          {"orbit_tol", orbit_tol},      {"section_tol", section_tol}, {"cluster_tol", cluster_tol},
          {"rank_tol", rank_tol},        {"unit_scale", unit_scale},   {"band", band},
          {"format", format},            {"params", params}};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact root counting, canonical forms and stability of linear and three-body systems", "secular"};
  app.set_version_flag("--version", std::string("secular ") + kVersion);
  app.fallthrough();
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  RunConfig cfg;
  Options o;
  app.add_option("--tol", cfg.integrator_tol, "Integrator tolerance for periodic systems");
  app.add_option("--orbit-tol", cfg.orbit_tol, "Integrator tolerance for three-body orbits");
  app.add_option("--section-tol", cfg.section_tol, "Integrator tolerance for return maps");
  app.add_option("--cluster-tol", cfg.cluster_tol, "Eigenvalue cluster tolerance");
  app.add_option("--rank-tol", cfg.rank_tol, "Numeric rank tolerance");
  app.add_option("--unit-scale", cfg.unit_scale, "Unit multiplier cluster tolerance per unit of Lambda");
  app.add_option("--band", cfg.band, "Marginal band around the unit circle");
  app.add_option("--format", cfg.format, "json or csv");
  app.add_option("--output", cfg.output, "Write the result to this path");

  auto* st = app.add_subcommand("sturm", "Real root counting and isolation");
  st->require_subcommand(1);
  std::vector<std::pair<std::string, CLI::App*>> leaves;
  for (const char* name : {"count", "isolate", "refine"}) {
    auto* s = st->add_subcommand(name, std::string(name) + " real roots");
    s->add_option("--poly", o.poly, "Polynomial as JSON, comma list, or @file");
    s->add_option("--lo", o.lo, "Lower end (rational, -inf)");
    s->add_option("--hi", o.hi, "Upper end (rational, inf)");
    if (std::string(name) == "refine") s->add_option("--tol", o.tol, "Rational tolerance");
    leaves.emplace_back(std::string("sturm ") + name, s);
  }
  for (const char* name : {"charpoly", "inertia", "hermite-count", "interlace"}) {
    auto* s = app.add_subcommand(name);
    s->add_option("--matrix", o.matrix, "Matrix JSON file or inline JSON");
    if (std::string(name) == "hermite-count") s->add_option("--poly", o.poly, "Polynomial instead of a matrix");
    leaves.emplace_back(name, s);
  }
  app.get_subcommand("charpoly")->description("Characteristic polynomial det(S I - A)");
  app.get_subcommand("inertia")->description("Inertia of the quadratic form with the given gram matrix");
  app.get_subcommand("hermite-count")->description("Distinct and distinct real roots from power sums");
  app.get_subcommand("interlace")->description("Interlacing of a symmetric matrix and its trailing minor");

  auto* jo = app.add_subcommand("jordan", "Jordan canonical form");
  jo->add_option("--matrix", o.matrix, "Matrix JSON file or inline JSON");
  jo->add_option("--flavor", o.flavor, "exact or numeric (default: the matrix flavor)");
  jo->add_flag("--classify3", o.classify3, "Report the 3x3 canonical type");
  leaves.emplace_back("jordan", jo);

  auto* ls = app.add_subcommand("linsolve", "Closed-form solution of x' = A x or x'' = A x");
  ls->add_option("--matrix", o.matrix, "Matrix JSON file or inline JSON");
  ls->add_option("--x0", o.x0, "Initial state, comma list");
  ls->add_option("--v0", o.v0, "Initial velocity for --form second");
  ls->add_option("--method", o.method, "jordan or residue");
  ls->add_option("--form", o.form, "first or second");
  leaves.emplace_back("linsolve", ls);

  auto* fl = app.add_subcommand("floquet", "Monodromy and characteristic exponents of a periodic system");
  fl->add_option("--system", o.system, "Built-in system (hill)");
  fl->add_option("--a", o.a, "Hill parameter a");
  fl->add_option("--q", o.q, "Hill parameter q");
  fl->add_option("--grid", o.grid, "Sweep a0:a1:na,q0:q1:nq (CSV)");
  leaves.emplace_back("floquet", fl);

  auto* pc = app.add_subcommand("pcr3bp", "Planar circular restricted three-body problem");
  pc->require_subcommand(1);
  {
    auto* s = pc->add_subcommand("lagrange", "Libration points");
    s->add_option("--mu", o.mu, "Mass ratio");
    leaves.emplace_back("pcr3bp lagrange", s);
    s = pc->add_subcommand("stability", "Linear stability of a libration point");
    s->add_option("--mu", o.mu, "Mass ratio");
    s->add_option("--point", o.point, "L1..L5");
    leaves.emplace_back("pcr3bp stability", s);
    s = pc->add_subcommand("orbit", "Lyapunov orbit by differential correction");
    s->add_option("--mu", o.mu, "Mass ratio");
    s->add_option("--seed-amplitude", o.amplitude, "Seed amplitude along x");
    s->add_option("--point", o.point, "L1, L2 or L3 (default L1)");
    leaves.emplace_back("pcr3bp orbit", s);
    s = pc->add_subcommand("propagate", "Trajectory samples");
    s->add_option("--mu", o.mu, "Mass ratio");
    s->add_option("--state", o.state, "x,y,vx,vy");
    s->add_option("--t", o.t, "Final time");
    s->add_option("--samples", o.samples, "Sample intervals");
    leaves.emplace_back("pcr3bp propagate", s);
  }

  auto* se = app.add_subcommand("section", "Surface of section y = 0");
  se->require_subcommand(0, 1);
  se->add_option("--mu", o.mu, "Mass ratio");
  se->add_option("--C", o.jacobi, "Jacobi constant");
  se->add_option("--direction", o.direction, "Sign of vy at the crossing")->check(CLI::IsMember({-1, 1}));
  se->add_option("--start", o.start, "x,vx");
  se->add_option("--n", o.n, "Number of returns");
  auto* sf = se->add_subcommand("fixed", "Fixed point of the return map and its linearization");
  sf->add_option("--guess", o.guess, "x,vx");
  sf->add_option("--jacobian", o.jacobian, "stm or fd");
  sf->add_option("--fd-step", o.fd_step, "Finite-difference step for --jacobian fd");
  auto* sm = se->add_subcommand("manifolds", "Stable and unstable manifold polylines");
  sm->add_option("--fixed", o.fixed, "Hyperbolic fixed point x,vx");
  sm->add_option("--steps", o.steps, "Map iterates");
  sm->add_option("--seeds", o.seeds, "Seeds per fundamental domain");
  sm->add_option("--offset", o.offset, "Seed offset along the eigenvector");
  sm->add_option("--side", o.side, "plus or minus branch pair");
  sm->add_option("--prefix", o.prefix, "Polyline CSV prefix (empty embeds them in the JSON)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: kind=usage message=" << one_line(e.what()) << "\n" << app.help();
    return 1;
  }

  try {
    cfg.validate();
    std::function<Result()> job;
    std::string natural = "json";
    const CLI::App* leaf = nullptr;
    for (const auto& [name, s] : leaves)
      if (s->parsed()) {
        cfg.subcommand = name;
        leaf = s;
      }
    if (leaf) {
      const std::string& name = cfg.subcommand;
      if (name.rfind("sturm ", 0) == 0) job = [&] { return sturm(name.substr(6), o); };
      else if (name == "charpoly") job = [&] { return charpoly(o); };
      else if (name == "inertia") job = [&] { return inertia_cmd(o); };
      else if (name == "hermite-count") job = [&] { return hermite(o); };
      else if (name == "interlace") job = [&] { return interlace(o); };
      else if (name == "jordan") job = [&] { return jordan(o, cfg); };
      else if (name == "linsolve") job = [&] { return linsolve(o, cfg); };
      else if (name == "floquet") {
        job = [&] { return floquet_cmd(o, cfg); };
        if (!o.grid.empty()) natural = "csv";
      } else {
        job = [&] { return pcr3bp_cmd(name.substr(7), o, cfg); };
        if (name == "pcr3bp propagate") natural = "csv";
      }
      collect_params(leaf, cfg.params);
    } else {
      const std::string which = sf->parsed() ? "fixed" : sm->parsed() ? "manifolds" : "crossings";
      cfg.subcommand = which == "crossings" ? "section" : "section " + which;
      collect_params(se, cfg.params);
      if (which == "fixed") collect_params(sf, cfg.params);
      if (which == "manifolds") collect_params(sm, cfg.params);
      if (which == "crossings") {
        natural = "csv";
      } else {
        cfg.params.erase("start");
        cfg.params.erase("n");
      }
      job = [&, which] { return section_cmd(which, o, cfg); };
    }
    if (cfg.format.empty()) cfg.format = natural;
    const Result res = job();
    const std::string text = render(cfg, res);
    if (cfg.output.empty()) out << text;
    else write_text(cfg.output, text);
    return 0;
  } catch (const NonConvergenceError& e) {
    err << "error: kind=" << e.kind() << " message=" << one_line(e.what()) << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: kind=" << e.kind() << " message=" << one_line(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: kind=internal message=" << one_line(e.what()) << "\n";
    return 1;
  }
}

}  // namespace secular::cli
