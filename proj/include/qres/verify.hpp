#ifndef QRES_VERIFY_HPP
#define QRES_VERIFY_HPP

// Built-in acceptance checks shared by `qres verify` and the test suite.

#include <ostream>
#include <string>
#include <vector>

namespace qres {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;  ///< a check that runs longer fails
};

struct VerifyOptions {
  /// qres executable used by the determinism check.
  std::string qres_binary;
};

/// Names of all checks in execution order.
std::vector<std::string> check_names();

/// Runs every check whose name contains filter (all when empty).
std::vector<CheckResult> run_checks(const std::string& filter, const VerifyOptions& options);

/// One "PASS"/"FAIL" line per check, then a summary line.
void print_results(std::ostream& out, const std::vector<CheckResult>& results);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace qres

#endif  // QRES_VERIFY_HPP
