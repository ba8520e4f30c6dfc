#pragma once

#include <string>

#include "aicon/bw/solve.hpp"

namespace aicon::bw {

struct Instance {
  BwState initial;
  BwGoal goal;
};

// Text format: `blocks: N`, one line per tower listing ids bottom-to-top
// (a lone block on the table is a one-id line; every block appears exactly
// once), then `goal:` followed by `on X Y` lines where Y may be `table`.
Instance parse_instance(const std::string& text);
Instance load_instance(const std::string& path);
std::string format_instance(const Instance& inst);
void save_instance(const Instance& inst, const std::string& path);

// Solution CSV: step, action, args, goal_cost.
std::string solution_csv(const BwState& initial, const BwGoal& goal,
                         const Solution& sol);

}  // namespace aicon::bw
