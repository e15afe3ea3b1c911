#pragma once

#include <string>
#include <vector>

namespace sensorimotor {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant checks over every module (pseudo-inverse, ELM training,
/// world kinematics, controllers, closed loop). Deterministic.
std::vector<CheckResult> run_self_checks();

}  // namespace sensorimotor
