#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace haarlab::accept {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

// selectors: all, counterexample, transport, groups, ift, hensel, bch,
// walks, approxhom, entropy
std::vector<int> criteria_for_selector(const std::string& selector);
std::vector<std::string> known_selectors();

CriterionResult run_criterion(int id, std::uint64_t seed);

// runs the selected criteria, prints one pass/fail line each, returns the
// number of failures
int run_suite(const std::string& selector, std::uint64_t seed, std::ostream& out);

}  // namespace haarlab::accept
