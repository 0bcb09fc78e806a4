#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace schwadapt {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string details;
  double seconds = 0.0;
};

/// Runs the acceptance criteria (all of them when `only` is empty); each
/// result carries observed-vs-expected details for the failing checks.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& only = {});

/// Prints one pass/fail line per criterion; returns 0 when everything
/// passed, 1 otherwise.
int print_acceptance(const std::vector<int>& only, std::ostream& os);

}  // namespace schwadapt
