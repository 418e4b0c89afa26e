#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace athermal::audit {

struct Check {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;
  bool all_pass() const;
};

// Suites: monotonicity, additivity, convexity, faithfulness, weyl, golden,
// table1, diamond, oracle. Deterministic for a given seed. `samples` scales
// the sampled-instance count where a suite samples at all.
SuiteReport run_suite(const std::string& name, std::uint64_t seed, int samples);

const std::vector<std::string>& suite_names();

}  // namespace athermal::audit
