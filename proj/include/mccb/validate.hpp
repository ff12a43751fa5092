#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mccb/planner.hpp"

namespace mccb {

// planner hook so a broken recursion can be injected to prove the oracle
// check has teeth
using PlannerFn = std::function<PlanResult(const Vec&, const Vec&, int)>;

struct PropertyResult {
  std::string name;
  long long instances = 0;
  long long failures = 0;
};

struct ValidateReport {
  std::vector<PropertyResult> properties;
  std::vector<std::string> notes;

  bool pass() const;
  std::string text() const;
};

// Individual property checkers; each returns the number of failing instances.
// All draw their instances from a private deterministic generator.
long long check_planner_oracle(long long instances, std::uint64_t seed, const PlannerFn& planner,
                               double tol);
long long check_unimodality(long long instances, std::uint64_t seed, const PlannerFn& planner,
                            double tol);
long long check_arm_switch_monotonicity(long long instances, std::uint64_t seed,
                                        const PlannerFn& planner);
long long check_estimator_invariants(long long instances, std::uint64_t seed);
long long check_mt_schedule(long long instances, std::uint64_t seed);
long long check_ucb_dominance(long long instances, std::uint64_t seed);
long long check_absorption_rules(long long instances, std::uint64_t seed);

// Full randomized property suite over small instances; planner defaults to
// backward_plan when the hook is empty.
ValidateReport validate_properties(long long planner_instances, std::uint64_t seed,
                                   const PlannerFn& planner = {});

}  // namespace mccb
