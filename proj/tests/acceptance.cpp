#include <cstdlib>
#include <iostream>
#include <string>

#include "sheafnet/acceptance.hpp"

// Optional arguments restrict the run to the listed criterion ids.
int main(int argc, char** argv) {
  auto opt = sheafnet::acceptance::default_options();
  for (int i = 1; i < argc; ++i) opt.only.insert(std::atoi(argv[i]));
  const int failures = sheafnet::acceptance::run_and_print(opt, std::cout);
  std::cout << (failures == 0 ? "all criteria pass" : "failing criteria: " + std::to_string(failures)) << '\n';
  return failures == 0 ? 0 : 1;
}
