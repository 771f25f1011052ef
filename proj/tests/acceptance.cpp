#include <iostream>

#include "kpsim/verify.hpp"

// One line per criterion; exit status 1 if any criterion fails.
int main(int argc, char** argv) {
  const std::string suite = argc > 1 ? argv[1] : "all";
  kpsim::warnings_enabled() = false;
  const auto report = kpsim::verify(suite, &std::cerr, [](const kpsim::CriterionResult& r) {
    std::cout << r.line() << std::endl;
  });
  std::cout << "acceptance " << suite << ": " << (report.passed() ? "PASS" : "FAIL") << std::endl;
  return report.passed() ? 0 : 1;
}
