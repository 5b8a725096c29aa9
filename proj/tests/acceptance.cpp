// SPDX-License-Identifier: Apache-2.0
// Acceptance suite, one PASS/FAIL line per criterion.
// Usage: eepn_acceptance [--threads N] [id ...]   (no ids: all criteria)
#include <cstdlib>
#include <iostream>
#include <string>

#include "eepn/parallel.hpp"
#include "eepn_lab/acceptance.hpp"

int main(int argc, char** argv) {
  eepn::lab::AcceptanceOptions opt;
  opt.full = true;
  opt.threads = eepn::resolve_threads(0);
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--threads" && i + 1 < argc) {
      opt.threads = std::atoi(argv[++i]);
    } else {
      opt.only.push_back(std::atoi(a.c_str()));
    }
  }
  opt.log = &std::cout;
  const auto results = eepn::lab::run_acceptance(opt);
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << (results.size() - static_cast<std::size_t>(failed)) << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
