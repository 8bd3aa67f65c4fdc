#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "secular/io.hpp"

namespace secular::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Every numeric default the front end uses. The resolved values are echoed
/// into each output under "config".
struct RunConfig {
  double integrator_tol = 1e-10;  // periodic systems
  double orbit_tol = 1e-13;       // three-body orbits and trajectories
  double section_tol = 1e-12;     // return maps
  double cluster_tol = 1e-8;
  double rank_tol = 1e-10;
  double unit_scale = 1e-5;       // unit-pair cluster tolerance per unit of Lambda
  double band = 1e-6;             // marginal band around the unit circle
  std::string format;             // json | csv; empty picks the subcommand's natural format
  std::string output;             // empty for standard output
  std::string subcommand;
  io::Json params = io::Json::object();

  /// Throws DomainError for non-positive tolerances or an unknown format.
  void validate() const;
  io::Json to_json() const;
};

/// Exit codes: 0 success, 1 input/domain error or usage error, 2 numeric
/// non-convergence. Errors print one line "error: kind=<kind> message=<text>"
/// on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace secular::cli
