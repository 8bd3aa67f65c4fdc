#pragma once

#include <complex>
#include <string>
#include <vector>

#include "secular/exact_matrix.hpp"
#include "secular/ratpoly.hpp"

namespace secular {

/// Multiplicity structure of one exact eigenvalue.
struct MultiplicityReport {
  Rational eigenvalue;
  int algebraic = 0;
  int geometric = 0;
  std::vector<int> block_sizes;            // decreasing, sums to `algebraic`
  std::vector<std::size_t> rank_sequence;  // rank((A - lambda I)^k), k = 0, 1, ...
  /// Number of orders k for which every minor of size n-k of A - lambda*I
  /// vanishes. Always equals `geometric`; computed independently from minors.
  int minor_vanishing_depth = 0;
};

/// Throws DomainError when lambda is not an eigenvalue.
MultiplicityReport multiplicity(const ExactMatrix& a, const Rational& lambda);

/// True if every size x size minor of m vanishes.
bool all_minors_vanish(const ExactMatrix& m, std::size_t size);

/// f(A) for an exact polynomial f.
ExactMatrix evaluate_at(const RationalPolynomial& f, const ExactMatrix& a);

struct ExactJordanBlock {
  Rational eigenvalue;
  std::vector<int> sizes;  // decreasing
};

/// A P = P J with J in Jordan form. Blocks are ordered by ascending
/// eigenvalue, then by decreasing size; 1s sit on the superdiagonal.
struct ExactJordan {
  ExactMatrix jordan;
  ExactMatrix transform;
  std::vector<ExactJordanBlock> blocks;
};

/// Exact Jordan decomposition; every eigenvalue must be rational, otherwise
/// UnsupportedError points at the numeric flavor.
ExactJordan jordan_form(const ExactMatrix& a);

struct NumericJordanOptions {
  /// Eigenvalues closer than cluster_tol * max(1, max|lambda|) merge.
  double cluster_tol = 1e-8;
  /// Singular values of (A - lambda I)^k below rank_tol * max(1, ||A||)^k count as zero.
  double rank_tol = 1e-10;
};

struct NumericJordanBlock {
  std::complex<double> eigenvalue;
  int algebraic = 0;
  std::vector<int> sizes;
};

struct NumericJordan {
  ComplexMatrix jordan;
  ComplexMatrix transform;
  std::vector<NumericJordanBlock> blocks;  // ordered by (real, imaginary)
  /// ||A P - P J|| / max(1, ||A||).
  double residual = 0.0;
  /// Set when two clusters sit within 10x the clustering radius of each
  /// other, or when the kernel dimensions do not reach the cluster size.
  bool ill_conditioned = false;
  std::vector<std::string> warnings;
};

NumericJordan jordan_form(const ComplexMatrix& a, const NumericJordanOptions& opts = {});

/// Numeric chains around eigenvalues whose algebraic multiplicities are
/// already known (e.g. from an exact square-free factorization).
struct SpectrumEntry {
  std::complex<double> eigenvalue;
  int algebraic = 0;
};
NumericJordan jordan_form(const ComplexMatrix& a, const std::vector<SpectrumEntry>& spectrum,
                          const NumericJordanOptions& opts = {});

/// Clusters eigenvalues of a numeric matrix: cluster means with sizes, in
/// (real, imaginary) order. `ill_conditioned` flags near-merging clusters.
std::vector<SpectrumEntry> cluster_eigenvalues(const std::vector<std::complex<double>>& values, double cluster_tol,
                                               bool* ill_conditioned = nullptr);

/// The five canonical types of a 3x3 linear substitution.
///   A: three distinct eigenvalues
///   B: double eigenvalue, one 2-block
///   C: double eigenvalue, diagonalizable (also the scalar matrix, flagged)
///   D: triple eigenvalue, one 3-block
///   E: triple eigenvalue, a 2-block and a 1-block
struct CanonicalType3 {
  char tag = 'A';
  bool scalar = false;
};

CanonicalType3 classify_3x3(const ExactMatrix& a);
CanonicalType3 classify_3x3(const ComplexMatrix& a, const NumericJordanOptions& opts = {});

/// Evidence for one square-free factor f of multiplicity k in the
/// characteristic polynomial: A is semisimple on the roots of f exactly when
/// nullity(f(A)) = k * deg f.
struct SemisimplicityEvidence {
  RationalPolynomial factor;
  int multiplicity = 0;
  int nullity = 0;
  int expected_nullity = 0;
  bool semisimple = false;
  /// Per-root multiplicity reports for the rational roots of the factor.
  std::vector<MultiplicityReport> rational_roots;
};

struct DiagonalizabilityReport {
  std::vector<SemisimplicityEvidence> factors;
  bool diagonalizable = false;
};

/// Exact semisimplicity test, valid for any square matrix.
DiagonalizabilityReport diagonalizability(const ExactMatrix& a);

/// Symmetric matrices are always diagonalizable; a failure here is reported
/// as InternalError.
DiagonalizabilityReport symmetric_diagonalizability_check(const ExactMatrix& a);

}  // namespace secular
