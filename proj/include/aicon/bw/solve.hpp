#pragma once

#include <cstdint>
#include <optional>

#include "aicon/bw/gradients.hpp"

namespace aicon::bw {

struct Solution {
  std::vector<Action> actions;
  int steps = 0;
  enum Status { solved, step_cap_exceeded } status = solved;
  std::vector<double> costs;  // goal cost after each action
};

struct SolveOptions {
  uint64_t seed = 0;
  int step_cap = -1;  // default 4 * |B|
  ClearNorm norm = ClearNorm::crisp;
};

// Gradient-descent executor: steepest candidate each step, seeded-random
// tie-break, until the goal cost reaches 0 or the cap is hit.
Solution solve(const BwState& initial, const BwGoal& goal,
               const SolveOptions& opts);

}  // namespace aicon::bw
