#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mimm/gaussian/transforms.hpp"

namespace mimm::app {

struct CheckResult {
  std::string name;  // group.invariant
  bool passed = false;
  double measured = 0.0;   // worst observed deviation
  double tolerance = 0.0;  // pass iff measured <= tolerance
  double seconds = 0.0;
  std::string detail;
};

struct VerifyOptions {
  RiccatiOptions riccati;  // loosen to check that the round-trip gate notices
  std::uint64_t seed = 20240611;
};

/// Names of every check run_verify performs, in run order.
std::vector<std::string> verify_check_names();

/// Runs the invariant suite against the independent oracles.
std::vector<CheckResult> run_verify(const VerifyOptions& options = {});

}  // namespace mimm::app
