#pragma once

#include <memory>

#include "aicon/bw/gradients.hpp"
#include "aicon/core/graph.hpp"

namespace aicon::bw {

// Blocks World instantiated on the generic graph: one scalar estimate node
// per o(X,Y) entry and per c(X), one actuator per stack/unstack action, and
// the Eq. 6 dynamics as connections. Gradient chains toward a goal pair are
// then discovered by path enumeration instead of the hand-rolled
// bw_gradients; the two routes must agree (see tests).
class BwGraph {
 public:
  BwGraph(const BwState& initial, ClearNorm norm);

  Graph& graph() { return *graph_; }
  const Graph& graph() const { return *graph_; }

  // Push a state's on-matrix (and derived clears) into the node values.
  void set_state(const BwState& s);

  // Drive an action through one tick: sets the actuator to 1, ticks, zeroes
  // it again. With crisp inputs this reproduces apply_action on the o nodes.
  void execute(const Action& a);

  BwState read_state() const;

  // Candidates for goal o(x,y) via enumerate/evaluate over the graph.
  // Paths whose descent would push the action negative are dropped (discrete
  // actions are fire-or-not). max_depth in hops; a pile of depth d needs
  // 2d + 1.
  std::vector<Candidate> gradients(int x, int y, int max_depth) const;

  // Union over all pairs of a (naive, on-pairs only) goal, max-merged per
  // action like bw_gradients.
  std::vector<Candidate> gradients(const BwGoal& goal, int max_depth) const;

  std::string o_id(int x, int y) const;
  std::string c_id(int x) const;
  std::string stack_id(int x, int y) const;
  std::string unstack_id(int x) const;

 private:
  std::vector<std::string> blocks_;
  ClearNorm norm_;
  std::unique_ptr<Graph> graph_;
};

}  // namespace aicon::bw
