#pragma once

// Self-contained invariant suites behind the `check` subcommand: analytic
// derivatives vs central finite differences, kernel-row normalization,
// the dual Beta phi formulas, score-sum exchange of derivatives, and
// quantile round-trips.

#include <string>
#include <vector>

namespace rwre {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;  // short failure description or summary stats
};

SuiteResult check_finite_differences(int triples_per_family = 200);
SuiteResult check_kernel_normalization(int max_x = 30);
SuiteResult check_beta_dual_formula();
SuiteResult check_derivative_exchange(int max_x = 20);
SuiteResult check_quantile_roundtrip();

std::vector<SuiteResult> run_all_checks();

}  // namespace rwre
