#pragma once

#include <string>
#include <vector>

// Self-check suite behind the `verify` CLI subcommand: algebraic
// identities of the Kronecker utilities, the finite-difference gradient
// check, update-law consistency, the multiplication census and the
// zero fixed point, plus large-sample statistics checks at full scale.

namespace sml {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  bool full = false;             // adds the 1e5-sample statistics checks
  // Fault-injection hook: negates the closed-form gradient inside the
  // finite-difference check, which must then fail.
  bool mutate_grad_sign = false;
};

std::vector<CheckResult> run_verification(const VerifyOptions& opts);

}  // namespace sml
