#include "aicon/bw/solve.hpp"

#include "aicon/util/rng.hpp"

namespace aicon::bw {

Solution solve(const BwState& initial, const BwGoal& goal,
               const SolveOptions& opts) {
  goal.validate(initial.count());
  initial.validate_crisp();

  const int cap = opts.step_cap > 0 ? opts.step_cap : 4 * initial.count();
  Rng rng(opts.seed);

  Solution sol;
  BwState s = initial;
  Action undo{Action::stack, -1, -1};  // inverse of the previous move
  while (goal.cost(s) > 0.0) {
    if (sol.steps >= cap) {
      sol.status = Solution::step_cap_exceeded;
      return sol;
    }
    auto cands = bw_gradients(s, goal, opts.norm);
    if (cands.empty())
      throw BwError("no gradient chain from an unsatisfied goal");

    double best = 0.0;
    for (const auto& c : cands) best = std::max(best, c.magnitude);
    std::vector<const Candidate*> top;
    for (const auto& c : cands)
      if (c.magnitude == best) top.push_back(&c);
    // Anti-dither: never undo the previous move while an equally steep
    // alternative exists, otherwise conflicting naive goal terms can trade
    // the same block back and forth indefinitely.
    if (top.size() > 1) {
      std::erase_if(top, [&](const Candidate* c) { return c->action == undo; });
    }
    // Unstacks first: a blocked participant has to be freed no matter what,
    // while an equally steep stack may be premature and get torn down again.
    bool any_unstack = false;
    for (const Candidate* c : top)
      any_unstack = any_unstack || c->action.kind == Action::unstack;
    if (any_unstack && top.size() > 1)
      std::erase_if(top, [](const Candidate* c) {
        return c->action.kind == Action::stack;
      });
    // Among tied stacks, prefer destinations already resting on their own
    // goal support: stacking onto an unsettled block forces a teardown later,
    // and with deep goal towers the rework would not fit any step budget.
    // Walk the physical pile under y: it only ever needs breaking up if some
    // block in it sits on the wrong goal support (unconstrained blocks are
    // stable wherever they are).
    auto settled = [&](int y) {
      int guard = s.count() + 1;
      while (y != -1 && guard-- > 0) {
        int gs = goal.goal_support(y);
        int sup = s.support_of(y);
        if (gs >= 0 && sup != gs) return false;
        if (gs == -1 && sup != -1) return false;
        y = sup;
      }
      return guard >= 0;
    };
    if (!any_unstack && top.size() > 1) {
      std::vector<const Candidate*> good;
      for (const Candidate* c : top)
        if (settled(c->action.y)) good.push_back(c);
      if (!good.empty()) top = good;
    }
    const Candidate& pick =
        *top[top.size() == 1
                 ? 0
                 : rng.uniform_int(0, static_cast<int>(top.size()) - 1)];

    undo = pick.action.kind == Action::stack
               ? Action{Action::unstack, pick.action.x, -1}
               : Action{Action::stack, pick.action.x,
                        s.support_of(pick.action.x)};
    s = apply_action(s, pick.action);
    sol.actions.push_back(pick.action);
    sol.costs.push_back(goal.cost(s));
    ++sol.steps;
  }
  sol.status = Solution::solved;
  return sol;
}

}  // namespace aicon::bw
