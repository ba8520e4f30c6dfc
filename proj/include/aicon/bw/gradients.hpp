#pragma once

#include "aicon/bw/state.hpp"

namespace aicon::bw {

// One goal-to-action gradient chain, flattened to the action it drives.
struct Candidate {
  Action action;
  double magnitude = 0.0;
  // Number of clear->on chain-rule hops (0 for a direct stack gradient);
  // candidates of equal depth form one gradient family.
  int depth = 0;
};

// All nonzero gradient chains for the current state, per Eqs.-style chain
// rule with crisp feasibility: a candidate's magnitude carries the clear
// factors of its feasibility conditions, interior clear->on hops contribute
// 1/|B| under paper normalization and 1 under crisp. Chains through the
// destination's clear are only expanded once the moved block itself is clear
// (directional sensitivity of the intended stack).
std::vector<Candidate> bw_gradients(const BwState& s, const BwGoal& goal,
                                    ClearNorm norm);

}  // namespace aicon::bw
