// Runs every acceptance criterion against the reference preset and prints one
// line per criterion. Exit status is the number of failed criteria (capped).

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "dftrap/acceptance.hpp"
#include "dftrap/config.hpp"

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const auto cfg = dftrap::config::preset("paper");
  int failed = 0;
  dftrap::acceptance::run(cfg, only, [&](const dftrap::acceptance::CriterionResult& r) {
    fmt::print("{}\n", dftrap::acceptance::format_line(r));
    std::fflush(stdout);
    failed += !r.passed;
  });
  return failed > 100 ? 100 : failed;
}
