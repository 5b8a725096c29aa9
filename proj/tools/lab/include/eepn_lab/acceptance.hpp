// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace eepn::lab {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  bool full = false;      // fast tier is criteria 1-4, full tier 1-10
  std::vector<int> only;  // non-empty: run just these ids
  int threads = 1;
  int genie_upsample = 200;
  std::ostream* log = nullptr;  // one line per criterion as it finishes
};

/// Ids in the order they run for the given options.
std::vector<int> selected_criteria(const AcceptanceOptions& options);

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

/// "PASS  3  title  detail  (1.2 s)".
std::string format_result(const CriterionResult& r);

/// Direct covariance of the centre residual of a unit-variance random walk,
/// by enumerating the increment weights of both instants.
double residual_covariance_bruteforce(int N, long long lag);

}  // namespace eepn::lab
