// Full acceptance battery: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <cstdio>
#include <exception>

#include "shiftconv/acceptance.hpp"

int main() {
  using namespace shiftconv;
  AcceptanceContext ctx(AcceptanceOptions{});
  int failures = 0;
  for (int id = 1; id <= kCriterionCount; ++id) {
    try {
      const auto r = run_criterion(id, ctx);
      std::printf("%s\n", format_line(r).c_str());
      if (!r.pass) ++failures;
    } catch (const std::exception& e) {
      std::printf("[FAIL] %2d threw: %s\n", id, e.what());
      ++failures;
    }
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", kCriterionCount - failures, kCriterionCount);
  return failures == 0 ? 0 : 1;
}
