#include <cstdio>

#include "oprange/acceptance.hpp"

int main() {
  const auto results = oprange::run_acceptance();
  int failed = 0;
  for (const auto& r : results) {
    std::printf("[%s] %2d %s: %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str());
    failed += !r.passed;
  }
  std::printf("%zu criteria, %d failed\n", results.size(), failed);
  return failed ? 1 : 0;
}
