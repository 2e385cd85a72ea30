#include <cstdio>
#include <cstdlib>

#include "saddle/acceptance.hpp"

int main(int argc, char** argv) {
  saddle::AcceptanceOptions options;
  if (argc > 1) options.seed = std::strtoull(argv[1], nullptr, 10);
  options.on_result = [](const saddle::CriterionResult& r) {
    std::printf("%s\n", saddle::summary_line(r).c_str());
    std::fflush(stdout);
  };
  const saddle::AcceptanceReport report = saddle::run_acceptance(options);
  return report.all_passed() ? 0 : 1;
}
