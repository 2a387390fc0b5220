#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace adaloc {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Fast invariant suite behind the CLI `check` subcommand: analytic gradient
/// vs central finite differences, Schur-product PSD preservation, Arakawa
/// conservation sums, Helmholtz manufactured solution, RK4 convergence
/// order and the mean-function axioms. Runs in seconds.
std::vector<CheckResult> run_fast_checks(std::uint64_t seed = 987654321);

}  // namespace adaloc
