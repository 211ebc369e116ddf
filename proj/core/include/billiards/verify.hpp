#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace billiards {

struct CheckResult {
  std::string name;
  bool pass;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 0x9275b0c1d2e3f401ULL;
  unsigned threads = 0;
  bool quick = false;  // trims Monte Carlo sizes for smoke runs
};

// Runs every module's invariant battery.  Checks never throw; a failure in
// setup is reported as a failing entry.
std::vector<CheckResult> run_verification(const VerifyOptions& options = {});

}  // namespace billiards
