#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace sheafnet::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  std::uint64_t seed = 0;
  std::filesystem::path fixtures;
  /// Criteria to run; empty runs all sixteen.
  std::set<int> only;
};

Options default_options();

std::vector<CriterionResult> run(const Options& opt);

/// "PASS 03 name: detail (0.12 s)".
std::string format_line(const CriterionResult& r);

/// Prints one line per criterion and returns the number of failures.
int run_and_print(const Options& opt, std::ostream& out);

}  // namespace sheafnet::acceptance
