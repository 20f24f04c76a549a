#pragma once

// The numbered acceptance checks of the repository, each with pinned
// tolerances and a runtime budget.

#include <set>
#include <string>
#include <vector>

namespace ladder::cli {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string measured;  // the numbers the verdict rests on
  std::string notes;     // diagnostics that do not enter the verdict
  double seconds = 0.0;
  double budget_seconds = 0.0;  // 0 when the check has no runtime limit
};

inline constexpr int kCriteriaCount = 11;

// Runs the selected criteria (all when `only` is empty) in order.
std::vector<CriterionResult> run_acceptance(int threads = 1, const std::set<int>& only = {});

// "PASS  3 trotter-scaling ..." on one line.
std::string format_line(const CriterionResult& result);

}  // namespace ladder::cli
