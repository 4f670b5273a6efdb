// Acceptance gate: runs every ensemble at full size and prints one line per
// criterion. Any failure exits 1. Always-on checks; nothing is compiled out
// in Release.
#include <cstdio>
#include <cstdlib>

#include "tenrank/selftest.hpp"

namespace {

// Always-on requirement: never compiled out in Release.
#define REQUIRE(cond, msg)                             \
  do {                                                 \
    if (!(cond)) {                                     \
      std::fprintf(stderr, "[FAIL] %s\n", msg);        \
      std::exit(1);                                    \
    }                                                  \
  } while (0)

}  // namespace

int main() {
  int index = 0;
  bool all = true;
  const auto log = [&](const tenrank::SelfTestResult& r) {
    ++index;
    std::printf("[%s] criterion %d: %s — %s\n", r.pass ? "PASS" : "FAIL", index, r.name.c_str(),
                r.details.c_str());
    std::fflush(stdout);
    all = all && r.pass;
  };
  const auto results = tenrank::run_selftest(tenrank::kDefaultSeed, false, log);
  REQUIRE(results.size() == 10, "expected ten criteria");
  REQUIRE(all, "at least one acceptance criterion failed");
  std::printf("all %zu acceptance criteria passed\n", results.size());
  return 0;
}
