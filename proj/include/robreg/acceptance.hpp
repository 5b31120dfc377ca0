#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace robreg {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  double seconds = 0.0;
  double budget_seconds = 0.0;  // exceeding it fails the criterion
  std::string detail;           // measured values behind the verdict
};

/// Criteria 1-8; `quick` keeps the ones that finish in a few seconds.
std::vector<int> acceptance_ids(bool quick);
CriterionResult run_criterion(int id);

/// "PASS [n] title (t s, budget b s): detail"
std::string format_result(const CriterionResult& r);

/// Runs the selected criteria, printing one line each as they finish.
std::vector<CriterionResult> run_acceptance(bool quick, std::ostream& os);

}  // namespace robreg
