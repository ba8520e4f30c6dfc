#include "aicon/bw/gradients.hpp"

#include <map>

namespace aicon::bw {

namespace {

// Levels strictly above x, and the topmost (clear) block of that pile.
std::pair<int, int> pile_above(const BwState& s, int x) {
  int t = x, depth = 0;
  while (true) {
    int above = s.block_on(t);
    if (above == -1) return {t, depth};
    t = above;
    ++depth;
  }
}

// Interconnected gating: a stack target is a clean base when its own goal
// substructure is built bottom-up, and a free block only when it sits on the
// table (a free block parked on a tower blocks whatever is below it).
bool base_ok(const BwState& s, const BwGoal& goal, int y) {
  int guard = s.count() + 1;
  while (guard-- > 0) {
    if (y == -1) return true;
    int gs = goal.goal_support(y);
    if (gs == -2 || gs == -1) return s.on_table(y);
    if (!(s.on(y, gs) > 0.5)) return false;
    y = gs;
  }
  return false;
}

}  // namespace

std::vector<Candidate> bw_gradients(const BwState& s, const BwGoal& goal,
                                    ClearNorm norm) {
  const double hop = norm == ClearNorm::paper ? 1.0 / s.count() : 1.0;
  std::map<Action, Candidate> merged;
  auto emit = [&](Action a, double mag, int depth) {
    if (mag == 0.0) return;
    auto [it, fresh] = merged.try_emplace(a, Candidate{a, mag, depth});
    // On a magnitude tie keep the shallower chain, so depth labels stay
    // comparable across normalizations (crisp chains all weigh 1).
    if (!fresh && (mag > it->second.magnitude ||
                   (mag == it->second.magnitude && depth < it->second.depth))) {
      it->second.magnitude = mag;
      it->second.depth = depth;
    }
  };

  auto emit_move_to_table = [&](int w) {
    // Chain from wanting w off its support: unstack w directly when clear,
    // otherwise clear w first from the top of its pile.
    if (s.on_table(w)) return;
    auto [t, depth] = pile_above(s, w);
    if (t == w)
      emit({Action::unstack, w, -1}, 1.0, 0);
    else
      emit({Action::unstack, t, -1}, std::pow(hop, depth), depth);
  };

  for (size_t i = 0; i < goal.pairs.size(); ++i) {
    if (goal.pair_satisfied(s, i)) continue;
    const auto& [x, y] = goal.pairs[i];

    if (y == -1) {  // x belongs on the table
      emit_move_to_table(x);
      continue;
    }

    if (goal.mode == BwGoal::interconnected && !base_ok(s, goal, y)) {
      // Walk down the required support chain; unsatisfied lower pairs emit
      // their own gradients, so the only repair needed here is a free block
      // that parked on top of something.
      int w = y, guard = s.count() + 1;
      while (guard-- > 0) {
        int gs = goal.goal_support(w);
        if (gs == -2 || gs == -1) {
          emit_move_to_table(w);
          break;
        }
        if (!(s.on(w, gs) > 0.5)) break;  // pair (w, gs) handles itself
        w = gs;
      }
      continue;
    }

    const bool cx = s.is_clear(x);
    const bool cy = s.is_clear(y);
    if (cx && cy) {
      emit({Action::stack, x, y}, 1.0, 0);
      continue;
    }
    if (!cx) {
      // Subgoal clear(x): directional sensitivity of the intended stack, so
      // the destination's clear does not gate this chain.
      auto [t, depth] = pile_above(s, x);
      emit({Action::unstack, t, -1}, std::pow(hop, depth), depth);
    }
    if (cx && !cy) {
      // Subgoal clear(y), gated by the moved block actually being clear.
      auto [t, depth] = pile_above(s, y);
      emit({Action::unstack, t, -1}, std::pow(hop, depth), depth);
    }
  }

  std::vector<Candidate> out;
  out.reserve(merged.size());
  for (auto& [a, c] : merged) out.push_back(c);
  return out;
}

}  // namespace aicon::bw
