#pragma once

#include <stdexcept>
#include <string>

namespace secular {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  /// Short machine-readable category, e.g. "domain".
  virtual const char* kind() const noexcept { return "error"; }
};

/// Input outside an operation's precondition.
class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

/// Malformed textual input (JSON, CSV, numeric literals).
class ParseError : public DomainError {
 public:
  using DomainError::DomainError;
  const char* kind() const noexcept override { return "parse"; }
};

/// Request that the chosen flavor cannot serve (e.g. exact Jordan form of a
/// matrix with irrational eigenvalues).
class UnsupportedError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "unsupported"; }
};

/// The eigenvalue is multiple, so the cofactor formula gives nothing; the
/// caller should use the Jordan machinery instead.
class DefersToJordanError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "defers-to-jordan"; }
};

/// A theorem that must hold was violated; indicates a bug, not bad input.
class InternalError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "internal"; }
};

/// Iterative method ran out of budget.
class NonConvergenceError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "non-convergence"; }
};

/// Integration hit a singularity: step size underflow, non-finite state or a
/// collision with a primary.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, double t) : Error(what), t_(t) {}
  const char* kind() const noexcept override { return "singularity"; }
  double time() const noexcept { return t_; }

 private:
  double t_;
};

/// Degenerate linear algebra: singular monodromy, singular Newton system.
class DegenerateError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "degenerate"; }
};

}  // namespace secular
