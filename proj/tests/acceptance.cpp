// Acceptance bundle at full scale: one PASS/FAIL line per criterion.
#include <iostream>

#include "rfbm/verification.hpp"

int main() {
  const auto results = rfbm::run_suite(rfbm::Suite::Full);
  rfbm::print_results(std::cout, results);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
