#pragma once

#include <complex>
#include <string>
#include <vector>

#include "secular/exact_matrix.hpp"
#include "secular/jordan.hpp"

namespace secular {

/// poly(t) * e^{lambda t}; coeffs[j] is the vector coefficient of t^j.
struct SolutionTerm {
  std::complex<double> lambda;
  std::vector<ComplexVector> coeffs;
  /// Sign of Re(lambda), decided exactly whenever the matrix is exact.
  int real_part_sign = 0;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// Closed-form solution of x' = A x as a sum of terms, ordered by
/// (Re lambda, Im lambda, degree). A t^k factor with k >= 1 is a secular term.
struct LinearSolution {
  std::size_t dim = 0;
  std::vector<SolutionTerm> terms;

  ComplexVector evaluate(double t) const;
  int max_degree() const;
  bool has_secular_terms() const { return max_degree() > 0; }
};

/// Via the Jordan decomposition. Exact rational spectra use the exact
/// decomposition; otherwise the eigenvalues are the roots of the exact
/// square-free factors (approximated in double) with their exact
/// multiplicities, and the chains come from the numeric Jordan routine.
LinearSolution solve_constant(const ExactMatrix& a, const ExactVector& x0);
LinearSolution solve_constant(const ComplexMatrix& a, const ComplexVector& x0, const NumericJordanOptions& opts = {});

/// Cauchy's residue form: x(t) = sum over poles of Res adj(sI - A) x0 e^{st} / det(sI - A).
LinearSolution solve_residue(const ExactMatrix& a, const ExactVector& x0);

/// e^{A t} assembled column by column from solve_constant.
ComplexMatrix propagator(const ExactMatrix& a, double t);

enum class SystemForm { first_order, second_order };

enum class StabilityTag { bounded_oscillatory, exponentially_unstable, secular_polynomial_growth, decaying };

std::string to_string(StabilityTag tag);

struct StabilityWitness {
  std::complex<double> exponent;
  int block_size = 1;
};

struct StabilityVerdict {
  StabilityTag tag = StabilityTag::bounded_oscillatory;
  std::vector<StabilityWitness> witnesses;
  /// The older, stricter predicate. Second order: every eigenvalue of A is
  /// real, negative and simple. First order: every eigenvalue is simple with
  /// nonpositive real part.
  bool lagrange_strict = false;
  /// Only set by the periodic classifier: some multiplier sits within the
  /// boundary band around the unit circle.
  bool marginal = false;
};

/// Structural classification, worst case over initial conditions. In second
/// order form the matrix means x'' = A x and each eigenvalue alpha of A
/// yields the exponents +-sqrt(alpha).
StabilityVerdict classify_stability(const ExactMatrix& a, SystemForm form);

/// Classification restricted to the modes excited by the given initial
/// data; v0 is used only in second order form.
StabilityVerdict classify_stability(const ExactMatrix& a, SystemForm form, const ExactVector& x0,
                                    const ExactVector& v0 = {});

/// One proper oscillation of x'' = A x.
struct OscillationMode {
  enum class Kind { oscillatory, exponential, drift };
  double alpha = 0.0;      // eigenvalue of A
  double frequency = 0.0;  // sqrt(|alpha|)
  Kind kind = Kind::oscillatory;
  Eigen::VectorXd shape;   // unit eigenvector
  double amplitude_x = 0.0;
  double amplitude_v = 0.0;
};

struct LagrangeOscillation {
  LinearSolution solution;
  std::vector<OscillationMode> modes;  // ascending alpha
  StabilityVerdict verdict;
};

/// x'' = A x for symmetric exact A, as a real combination of proper
/// oscillations. Signs of the eigenvalues come from the exact inertia of A.
LagrangeOscillation solve_lagrange_oscillation(const ExactMatrix& a, const ExactVector& x0, const ExactVector& v0);

/// [[0, I], [A, 0]]: the first-order form of x'' = A x.
ExactMatrix doubled_system(const ExactMatrix& a);

}  // namespace secular
