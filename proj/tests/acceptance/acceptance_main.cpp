// One line per acceptance criterion; exits nonzero if any fails.

#include <cstdlib>
#include <iostream>
#include <set>
#include <string>

#include "ladder/cli/acceptance.hpp"

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& r : ladder::cli::run_acceptance(1, only)) {
    std::cout << ladder::cli::format_line(r) << std::endl;
    if (!r.pass) ++failed;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << std::endl;
  return failed ? 1 : 0;
}
