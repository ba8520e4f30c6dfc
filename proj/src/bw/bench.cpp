#include "aicon/bw/bench.hpp"

#include <atomic>
#include <chrono>
#include <set>
#include <thread>

#include "aicon/bw/solve.hpp"
#include "aicon/util/csv.hpp"
#include "aicon/util/rng.hpp"

namespace aicon::bw {

namespace {

// Random sequential placement: tower bases first (two blocks each), then the
// rest coin-flipped between the table and an existing tower top.
BwState sample_state(Rng& rng, const std::vector<std::string>& ids,
                     int towers) {
  const int n = static_cast<int>(ids.size());
  BwState s = BwState::all_on_table(ids);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);

  std::vector<int> tops;
  for (int t = 0; t < towers; ++t) {
    s.on(order[2 * t + 1], order[2 * t]) = 1.0;
    tops.push_back(order[2 * t + 1]);
  }
  for (int i = 2 * towers; i < n; ++i) {
    if (towers > 0 && rng.uniform01() < 0.5) {
      int t = rng.uniform_int(0, towers - 1);
      s.on(order[i], tops[t]) = 1.0;
      tops[t] = order[i];
    }
  }
  return s;
}

// Block is transitively in its goal position; unconstrained blocks count as
// placed only on the table (parking on a tower may block it).
bool correct(const BwState& s, const BwGoal& goal, int x) {
  int guard = s.count() + 1;
  while (guard-- > 0) {
    int gs = goal.goal_support(x);
    if (gs == -2 || gs == -1) return s.on_table(x);
    if (!(s.on(x, gs) > 0.5)) return false;
    x = gs;
  }
  return false;
}

int misplaced_heuristic(const BwState& s, const BwGoal& goal) {
  int h = 0;
  for (int x = 0; x < s.count(); ++x)
    if (!correct(s, goal, x) && (!s.on_table(x) || goal.goal_support(x) >= 0))
      ++h;
  return h;
}

std::vector<int> encode(const BwState& s) {
  std::vector<int> sup(s.count());
  for (int x = 0; x < s.count(); ++x) sup[x] = s.support_of(x);
  return sup;
}

struct IdaCtx {
  const BwGoal* goal = nullptr;
  std::chrono::steady_clock::time_point deadline;
  bool timed_out = false;
  std::set<std::vector<int>> on_path;
};

// Returns the number of moves of a solution within `bound`, or -1 with
// next_bound raised to the smallest exceeded f-value.
int ida(IdaCtx& ctx, const BwState& s, int g, int bound, int& next_bound) {
  int h = misplaced_heuristic(s, *ctx.goal);
  if (g + h > bound) {
    next_bound = std::min(next_bound, g + h);
    return -1;
  }
  if (ctx.goal->cost(s) == 0.0) return g;
  if (std::chrono::steady_clock::now() > ctx.deadline) {
    ctx.timed_out = true;
    return -1;
  }

  for (int x = 0; x < s.count(); ++x) {
    if (!s.is_clear(x)) continue;
    std::vector<Action> moves;
    if (!s.on_table(x)) moves.push_back({Action::unstack, x, -1});
    for (int y = 0; y < s.count(); ++y)
      if (y != x && s.is_clear(y) && !(s.on(x, y) > 0.5))
        moves.push_back({Action::stack, x, y});
    for (const Action& a : moves) {
      BwState next = apply_action(s, a);
      auto key = encode(next);
      if (!ctx.on_path.insert(key).second) continue;
      int found = ida(ctx, next, g + 1, bound, next_bound);
      ctx.on_path.erase(key);
      if (found >= 0) return found;
      if (ctx.timed_out) return -1;
    }
  }
  return -1;
}

}  // namespace

std::vector<BwInstance> generate_instances(const GenerateOptions& opts) {
  if (opts.count < 1) throw BwError("instance count must be positive");
  if (opts.blocks_min < 1 || opts.blocks_min > opts.blocks_max)
    throw BwError("empty block range");
  if (opts.towers_min < 0 || opts.towers_min > opts.towers_max)
    throw BwError("empty tower range");
  if (opts.towers_min > opts.blocks_max)
    throw BwError("tower range exceeds block range");

  std::vector<BwInstance> out;
  out.reserve(opts.count);
  for (int i = 0; i < opts.count; ++i) {
    Rng rng(Rng::mix(opts.seed, static_cast<uint64_t>(i)));
    const int n = rng.uniform_int(opts.blocks_min, opts.blocks_max);
    std::vector<std::string> ids;
    for (int b = 1; b <= n; ++b) ids.push_back("b" + std::to_string(b));

    auto clamp_towers = [&](int t) { return std::min(t, n / 2); };
    int t0 = clamp_towers(rng.uniform_int(opts.towers_min, opts.towers_max));

    BwInstance inst;
    char buf[32];
    std::snprintf(buf, sizeof buf, "inst_%04d", i);
    inst.id = buf;
    inst.seed = opts.seed;
    inst.initial = sample_state(rng, ids, t0);

    if (opts.unstacking_only) {
      inst.goal_tower_count = 0;
      for (int x = 0; x < n; ++x)
        if (!inst.initial.on_table(x)) inst.goal.pairs.emplace_back(x, -1);
    } else {
      int tg = clamp_towers(rng.uniform_int(opts.towers_min, opts.towers_max));
      inst.goal_tower_count = tg;
      BwState goal_state = sample_state(rng, ids, tg);
      for (int x = 0; x < n; ++x) {
        int sup = goal_state.support_of(x);
        if (sup != -1) inst.goal.pairs.emplace_back(x, sup);
      }
    }
    inst.goal.validate(n);
    out.push_back(std::move(inst));
  }
  return out;
}

OptimalBound optimal_steps(const BwInstance& inst, int max_exact_blocks,
                           double time_guard_s) {
  if (inst.goal.cost(inst.initial) == 0.0) return {0, OptimalBound::exact};

  const BwState& s = inst.initial;
  int m1 = 0, m2 = 0;
  for (int x = 0; x < s.count(); ++x) {
    if (correct(s, inst.goal, x)) continue;
    if (!s.on_table(x)) ++m1;
    if (inst.goal.goal_support(x) >= 0) ++m2;
  }
  // With no stacking demands every misplaced block takes exactly one
  // unstack to the table, so the two-phase count is optimal at any size.
  if (m2 == 0) return {m1, OptimalBound::exact};
  OptimalBound bound{m1 + m2, OptimalBound::upper_bound};
  if (s.count() > max_exact_blocks) return bound;

  IdaCtx ctx;
  ctx.goal = &inst.goal;
  ctx.deadline = std::chrono::steady_clock::now() +
                 std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                     std::chrono::duration<double>(time_guard_s));
  int b = misplaced_heuristic(s, inst.goal);
  while (b <= bound.value) {
    int next_bound = bound.value + 1;
    ctx.on_path = {encode(s)};
    int found = ida(ctx, s, 0, b, next_bound);
    if (ctx.timed_out) return bound;
    if (found >= 0) return {found, OptimalBound::exact};
    b = next_bound;
  }
  return {bound.value, OptimalBound::exact};  // the two-phase plan is optimal
}

BenchResult run_benchmark(const std::vector<BwInstance>& corpus,
                          const std::vector<std::string>& variants,
                          const std::vector<uint64_t>& seeds, int threads) {
  BenchResult result;
  if (corpus.empty() || variants.empty() || seeds.empty()) {
    result.summary.nothing_run = true;
    return result;
  }
  for (const auto& v : variants)
    if (v != "naive" && v != "interconnected")
      throw BwError("unknown variant: " + v);

  std::vector<OptimalBound> bounds(corpus.size());
  for (size_t i = 0; i < corpus.size(); ++i) bounds[i] = optimal_steps(corpus[i]);

  const size_t cells = corpus.size() * variants.size() * seeds.size();
  result.records.resize(cells);
  std::atomic<size_t> next{0};

  auto worker = [&] {
    for (size_t cell = next++; cell < cells; cell = next++) {
      size_t i = cell / (variants.size() * seeds.size());
      size_t rest = cell % (variants.size() * seeds.size());
      size_t vi = rest / seeds.size();
      size_t si = rest % seeds.size();

      const BwInstance& inst = corpus[i];
      BwGoal goal = inst.goal;
      goal.mode = variants[vi] == "interconnected" ? BwGoal::interconnected
                                                   : BwGoal::naive;
      SolveOptions opts;
      opts.seed = Rng::mix(seeds[si], cell);
      Solution sol = solve(inst.initial, goal, opts);

      BenchRecord& r = result.records[cell];
      r.instance_id = inst.id;
      r.variant = variants[vi];
      r.seed = seeds[si];
      r.solved = sol.status == Solution::solved;
      r.steps = sol.steps;
      r.bound_value = bounds[i].value;
      r.bound_kind = bounds[i].kind;
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  BenchSummary& sum = result.summary;
  sum.records = static_cast<int>(cells);
  std::map<std::string, std::pair<double, int>> exact_acc, bound_acc;
  for (const auto& r : result.records) {
    if (r.solved) {
      ++sum.solved;
      sum.max_steps = std::max(sum.max_steps, r.steps);
    }
    double ratio = (r.steps == 0 && r.bound_value == 0)
                       ? 1.0
                       : static_cast<double>(r.steps) /
                             std::max(1, r.bound_value);
    auto& acc = r.bound_kind == OptimalBound::exact ? exact_acc[r.variant]
                                                    : bound_acc[r.variant];
    acc.first += ratio;
    acc.second += 1;
  }
  for (const auto& [v, acc] : exact_acc)
    sum.mean_ratio_exact[v] = acc.first / acc.second;
  for (const auto& [v, acc] : bound_acc)
    sum.mean_ratio_bound[v] = acc.first / acc.second;
  return result;
}

std::string bench_csv(const BenchResult& result) {
  std::string out =
      "instance_id,variant,seed,solved,steps,bound_value,bound_kind\n";
  for (const auto& r : result.records) {
    out += r.instance_id + "," + r.variant + "," + std::to_string(r.seed) +
           "," + (r.solved ? "1" : "0") + "," + fmt_num(r.steps) + "," +
           fmt_num(r.bound_value) + "," +
           (r.bound_kind == OptimalBound::exact ? "exact" : "upper_bound") +
           "\n";
  }
  return out;
}

}  // namespace aicon::bw
