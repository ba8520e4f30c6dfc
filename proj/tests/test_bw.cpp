#include "doctest.h"

#include <set>

#include "aicon/bw/graph_demo.hpp"
#include "aicon/bw/io.hpp"
#include "aicon/bw/solve.hpp"
#include "aicon/util/rng.hpp"

using namespace aicon;
using namespace aicon::bw;

namespace {

// Build a crisp state from towers listed bottom-to-top.
BwState towers(std::vector<std::string> blocks,
               std::vector<std::vector<std::string>> piles) {
  BwState s = BwState::all_on_table(std::move(blocks));
  for (const auto& pile : piles)
    for (size_t i = 1; i < pile.size(); ++i)
      s.on(s.index(pile[i]), s.index(pile[i - 1])) = 1.0;
  s.validate_crisp();
  return s;
}

BwState fig2a_state() {
  return towers({"R", "G", "B", "O", "C", "or", "ma", "te"},
                {{"R", "G", "B"}, {"O", "C"}, {"or", "ma", "te"}});
}

BwGoal fig2a_goal(const BwState& s) {
  BwGoal g;
  g.pairs = {{s.index("R"), s.index("O")}};
  return g;
}

std::set<Action> argmax_family(const std::vector<Candidate>& cands) {
  double best = 0.0;
  for (const auto& c : cands) best = std::max(best, c.magnitude);
  std::set<Action> out;
  for (const auto& c : cands)
    if (c.magnitude >= best * (1.0 - 1e-12) && best > 0.0)
      out.insert(c.action);
  return out;
}

// All crisp states over n blocks: each block sits on the table or on a
// distinct other block, acyclically.
std::vector<BwState> all_states(int n) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back(std::string(1, char('A' + i)));
  std::vector<BwState> out;
  std::vector<int> support(n, -1);
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      // supports injective?
      std::vector<int> used;
      for (int x = 0; x < n; ++x)
        if (support[x] >= 0) used.push_back(support[x]);
      std::sort(used.begin(), used.end());
      if (std::adjacent_find(used.begin(), used.end()) != used.end()) return;
      // acyclic?
      for (int x = 0; x < n; ++x) {
        int hops = 0, at = x;
        while (at != -1 && hops <= n) {
          at = support[at];
          ++hops;
        }
        if (hops > n) return;
      }
      BwState s = BwState::all_on_table(ids);
      for (int x = 0; x < n; ++x)
        if (support[x] >= 0) s.on(x, support[x]) = 1.0;
      out.push_back(std::move(s));
      return;
    }
    for (int y = -1; y < n; ++y) {
      if (y == i) continue;
      support[i] = y;
      rec(i + 1);
    }
    support[i] = -1;
  };
  rec(0);
  return out;
}

}  // namespace

TEST_CASE("clear_of both normalizations") {
  BwState s = BwState::all_on_table({"A", "B", "C"});
  CHECK(clear_of(s, "A", ClearNorm::paper) == doctest::Approx(1.0));
  CHECK(clear_of(s, "A", ClearNorm::crisp) == doctest::Approx(1.0));
  s.on(s.index("B"), s.index("A")) = 1.0;
  CHECK(clear_of(s, "A", ClearNorm::paper) == doctest::Approx(2.0 / 3.0));
  CHECK(clear_of(s, "A", ClearNorm::crisp) == doctest::Approx(0.0));
  CHECK_THROWS_AS(clear_of(s, "nope", ClearNorm::crisp), BwError);
}

TEST_CASE("apply_action dynamics and preconditions") {
  BwState s = BwState::all_on_table({"A", "B", "C"});
  BwState s2 = apply_action(s, Action{Action::stack, s.index("B"), s.index("A")});
  CHECK(s2.on(s.index("B"), s.index("A")) == 1.0);
  CHECK(s2.support_of(s.index("B")) == s.index("A"));

  BwState s3 = apply_action(s2, Action{Action::unstack, s.index("B"), -1});
  CHECK(s3.on_table(s.index("B")));
  CHECK(s3.on(s.index("B"), s.index("A")) == 0.0);

  // A is covered: stacking onto it must be rejected.
  CHECK_THROWS_AS(
      apply_action(s2, Action{Action::stack, s.index("C"), s.index("A")}),
      BwError);
  // B is already on the table: unstack rejected.
  CHECK_THROWS_AS(apply_action(s3, Action{Action::unstack, s.index("B"), -1}),
                  BwError);
  // Moving a covered block is rejected.
  BwState t = towers({"A", "B", "C"}, {{"A", "B", "C"}});
  CHECK_THROWS_AS(apply_action(t, Action{Action::unstack, t.index("B"), -1}),
                  BwError);
  s3.validate_crisp();
}

TEST_CASE("goal validation rejects inconsistency") {
  BwGoal g;
  g.pairs = {{0, 1}, {0, 2}};  // block 0 on two supports
  CHECK_THROWS_AS(g.validate(3), BwError);
  BwGoal cyc;
  cyc.pairs = {{0, 1}, {1, 0}};
  CHECK_THROWS_AS(cyc.validate(3), BwError);
  BwGoal shared;
  shared.pairs = {{0, 2}, {1, 2}};  // two blocks directly on 2
  CHECK_THROWS_AS(shared.validate(3), BwError);
  BwGoal ok;
  ok.pairs = {{0, 1}, {1, 2}, {2, -1}};
  CHECK_NOTHROW(ok.validate(3));
}

TEST_CASE("satisfied goal yields no gradient candidates") {
  BwState s = towers({"A", "B"}, {{"A", "B"}});
  BwGoal g;
  g.pairs = {{s.index("B"), s.index("A")}};
  CHECK(bw_gradients(s, g, ClearNorm::paper).empty());
  CHECK(bw_gradients(s, g, ClearNorm::crisp).empty());
}

TEST_CASE("fig 2a initial state: unique steepest action is unstack(B)") {
  BwState s = fig2a_state();
  BwGoal g = fig2a_goal(s);
  for (ClearNorm norm : {ClearNorm::paper, ClearNorm::crisp}) {
    auto fam = argmax_family(bw_gradients(s, g, norm));
    REQUIRE(fam.size() == 1);
    CHECK(fam.begin()->kind == Action::unstack);
    CHECK(fam.begin()->x == s.index("B"));
  }
}

TEST_CASE("fig 2a solves in exactly the published 4-move sequence") {
  BwState s = fig2a_state();
  BwGoal g = fig2a_goal(s);
  for (uint64_t seed : {0ULL, 7ULL, 123ULL}) {
    SolveOptions opts;
    opts.seed = seed;
    Solution sol = solve(s, g, opts);
    REQUIRE(sol.status == Solution::solved);
    REQUIRE(sol.steps == 4);
    CHECK(sol.actions[0] == Action{Action::unstack, s.index("B"), -1});
    CHECK(sol.actions[1] == Action{Action::unstack, s.index("G"), -1});
    CHECK(sol.actions[2] == Action{Action::unstack, s.index("C"), -1});
    CHECK(sol.actions[3] == Action{Action::stack, s.index("R"), s.index("O")});
  }
}

TEST_CASE("fig 2b: naive goals compete, interconnected gates bottom-up") {
  BwState s = BwState::all_on_table({"R", "G", "B"});
  BwGoal g;
  g.pairs = {{s.index("G"), s.index("R")}, {s.index("B"), s.index("G")}};

  g.mode = BwGoal::naive;
  auto naive = bw_gradients(s, g, ClearNorm::crisp);
  std::set<Action> acts;
  for (const auto& c : naive) acts.insert(c.action);
  CHECK(acts.count(Action{Action::stack, s.index("G"), s.index("R")}));
  CHECK(acts.count(Action{Action::stack, s.index("B"), s.index("G")}));

  g.mode = BwGoal::interconnected;
  auto inter = bw_gradients(s, g, ClearNorm::crisp);
  std::set<Action> iacts;
  for (const auto& c : inter) iacts.insert(c.action);
  CHECK(iacts.count(Action{Action::stack, s.index("G"), s.index("R")}));
  CHECK(!iacts.count(Action{Action::stack, s.index("B"), s.index("G")}));
}

TEST_CASE("sussman anomaly: interconnected solve is optimal") {
  BwState s = towers({"A", "B", "C"}, {{"A", "C"}});
  BwGoal g;
  g.pairs = {{s.index("A"), s.index("B")}, {s.index("B"), s.index("C")}};
  g.mode = BwGoal::interconnected;
  SolveOptions opts;
  opts.seed = 5;
  Solution sol = solve(s, g, opts);
  REQUIRE(sol.status == Solution::solved);
  CHECK(sol.steps == 3);

  g.mode = BwGoal::naive;
  Solution nsol = solve(s, g, opts);
  CHECK(nsol.status == Solution::solved);
  CHECK(nsol.steps >= 3);
}

TEST_CASE("unstacking-only goals are solved in exactly the misplaced count") {
  Rng rng(404);
  auto states = all_states(6);
  for (int trial = 0; trial < 20; ++trial) {
    const BwState& s = states[rng.bounded(states.size())];
    BwGoal g;
    int misplaced = 0;
    for (int x = 0; x < s.count(); ++x)
      if (!s.on_table(x)) {
        g.pairs.push_back({x, -1});
        ++misplaced;
      }
    if (g.pairs.empty()) continue;
    for (auto mode : {BwGoal::naive, BwGoal::interconnected}) {
      g.mode = mode;
      SolveOptions opts;
      opts.seed = trial;
      Solution sol = solve(s, g, opts);
      REQUIRE(sol.status == Solution::solved);
      CHECK(sol.steps == misplaced);
      for (const auto& a : sol.actions) CHECK(a.kind == Action::unstack);
    }
  }
}

TEST_CASE("solve traces keep crisp invariants and legal preconditions") {
  Rng rng(77);
  auto states = all_states(5);
  for (int trial = 0; trial < 30; ++trial) {
    const BwState& s0 = states[rng.bounded(states.size())];
    const BwState& sg = states[rng.bounded(states.size())];
    BwGoal g;
    for (int x = 0; x < 5; ++x) {
      int y = sg.support_of(x);
      if (y >= 0) g.pairs.push_back({x, y});
    }
    if (g.pairs.empty()) continue;
    g.mode = trial % 2 ? BwGoal::interconnected : BwGoal::naive;
    SolveOptions opts;
    opts.seed = trial;
    Solution sol = solve(s0, g, opts);
    REQUIRE(sol.status == Solution::solved);
    // Replay: apply_action throws on any precondition violation.
    BwState s = s0;
    for (const auto& a : sol.actions) {
      s = apply_action(s, a);
      s.validate_crisp();
    }
    CHECK(g.cost(s) == doctest::Approx(0.0));
  }
}

TEST_CASE("paper and crisp normalization share the argmax family") {
  // Exhaustive over every crisp state of 4 and 5 blocks and every single-pair
  // goal; the uniform 1/|B| scaling must not change which actions tie at max.
  for (int n : {4, 5}) {
    auto states = all_states(n);
    for (const auto& s : states) {
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
          if (x == y) continue;
          BwGoal g;
          g.pairs = {{x, y}};
          auto fp = argmax_family(bw_gradients(s, g, ClearNorm::paper));
          auto fc = argmax_family(bw_gradients(s, g, ClearNorm::crisp));
          REQUIRE(fp == fc);
        }
    }
  }
}

TEST_CASE("multi-pair goals keep the argmax family within each depth") {
  // Across depths the 1/|B| hop factor reweights chains, so only the
  // per-family (equal-depth) argmax is invariant under the normalization.
  auto per_depth = [](const std::vector<Candidate>& cands) {
    std::map<int, std::vector<Candidate>> fams;
    for (const auto& c : cands) fams[c.depth].push_back(c);
    std::map<int, std::set<Action>> out;
    for (auto& [d, f] : fams) out[d] = argmax_family(f);
    return out;
  };
  auto states = all_states(4);
  for (const auto& s : states) {
    BwGoal g;
    g.pairs = {{0, 1}, {1, 2}};
    for (auto mode : {BwGoal::naive, BwGoal::interconnected}) {
      g.mode = mode;
      auto fp = per_depth(bw_gradients(s, g, ClearNorm::paper));
      auto fc = per_depth(bw_gradients(s, g, ClearNorm::crisp));
      REQUIRE(fp == fc);
    }
  }
}

TEST_CASE("graph route reproduces the hand-rolled gradients") {
  Rng rng(31);
  auto states = all_states(4);
  for (int trial = 0; trial < 25; ++trial) {
    const BwState& s = states[rng.bounded(states.size())];
    int x = static_cast<int>(rng.bounded(4));
    int y = static_cast<int>(rng.bounded(4));
    if (x == y) continue;
    BwGoal g;
    g.pairs = {{x, y}};

    auto direct = bw_gradients(s, g, ClearNorm::paper);
    BwGraph bg(s, ClearNorm::paper);
    auto via_graph = bg.gradients(g, 9);

    auto key = [](const std::vector<Candidate>& cs) {
      std::map<Action, double> m;
      for (const auto& c : cs) m[c.action] = std::max(m[c.action], c.magnitude);
      return m;
    };
    auto a = key(direct), b = key(via_graph);
    REQUIRE(a.size() == b.size());
    for (const auto& [act, mag] : a) {
      REQUIRE(b.count(act));
      CHECK(b[act] == doctest::Approx(mag).epsilon(1e-9));
    }
  }
}

TEST_CASE("graph execute matches apply_action") {
  BwState s = fig2a_state();
  BwGraph bg(s, ClearNorm::crisp);
  Action a{Action::unstack, s.index("B"), -1};
  bg.execute(a);
  BwState expect = apply_action(s, a);
  BwState got = bg.read_state();
  CHECK((got.on - expect.on).norm() == doctest::Approx(0.0));

  Action st{Action::stack, s.index("B"), s.index("C")};
  bg.execute(st);
  expect = apply_action(expect, st);
  got = bg.read_state();
  CHECK((got.on - expect.on).norm() == doctest::Approx(0.0));
}

TEST_CASE("instance files round trip") {
  BwState s = fig2a_state();
  Instance inst{s, fig2a_goal(s)};
  inst.goal.pairs.push_back({s.index("te"), -1});
  std::string text = format_instance(inst);
  Instance back = parse_instance(text);
  CHECK(back.initial.blocks == inst.initial.blocks);
  CHECK((back.initial.on - inst.initial.on).norm() == doctest::Approx(0.0));
  CHECK(back.goal.pairs == inst.goal.pairs);

  CHECK_THROWS_AS(parse_instance("blocks: 2\nA\ngoal:\n"), BwError);   // B missing
  CHECK_THROWS_AS(parse_instance("blocks: 1\nA\nA\ngoal:\n"), BwError);  // dup
  CHECK_THROWS_AS(parse_instance("blocks: 1\nA\ngoal:\non A Z\n"), BwError);
}

TEST_CASE("solution csv lists start row and per-step costs") {
  BwState s = BwState::all_on_table({"A", "B"});
  BwGoal g;
  g.pairs = {{s.index("B"), s.index("A")}};
  SolveOptions opts;
  Solution sol = solve(s, g, opts);
  REQUIRE(sol.steps == 1);
  std::string csv = solution_csv(s, g, sol);
  CHECK(csv.find("step,action,args,goal_cost") != std::string::npos);
  CHECK(csv.find("start") != std::string::npos);
  CHECK(csv.find("stack") != std::string::npos);
}
