#pragma once

#include <cstdint>
#include <map>

#include "aicon/bw/io.hpp"

namespace aicon::bw {

struct BwInstance {
  std::string id;
  BwState initial;
  BwGoal goal;  // mode chosen per benchmark variant
  int goal_tower_count = 0;
  uint64_t seed = 0;
};

struct GenerateOptions {
  int count = 130;
  int blocks_min = 10, blocks_max = 30;
  int towers_min = 0, towers_max = 15;
  uint64_t seed = 0;
  bool unstacking_only = false;  // goal: every stacked block to the table
};

// Deterministic in seed: random sequential placement, tower count targets
// clamped to floor(n/2) (a tower needs two blocks).
std::vector<BwInstance> generate_instances(const GenerateOptions& opts);

struct OptimalBound {
  int value = 0;
  enum Kind { exact, upper_bound } kind = exact;
};

// Exact optimum by iterative deepening with the misplaced-block heuristic for
// <= max_exact_blocks; otherwise (or past the time guard) the unstack-stack
// upper bound m1 + m2.
OptimalBound optimal_steps(const BwInstance& inst, int max_exact_blocks = 8,
                           double time_guard_s = 60.0);

struct BenchRecord {
  std::string instance_id;
  std::string variant;  // "naive" | "interconnected"
  uint64_t seed = 0;
  bool solved = false;
  int steps = 0;
  int bound_value = 0;
  OptimalBound::Kind bound_kind = OptimalBound::exact;
};

struct BenchSummary {
  bool nothing_run = false;
  int records = 0;
  int solved = 0;
  int max_steps = 0;
  // Per variant: mean steps/optimal on the exact subset and mean
  // steps/upper-bound elsewhere (0 when the subset is empty).
  std::map<std::string, double> mean_ratio_exact;
  std::map<std::string, double> mean_ratio_bound;
};

struct BenchResult {
  std::vector<BenchRecord> records;
  BenchSummary summary;
};

// Runs every (instance, variant, seed) cell; cells are independent and may
// run on worker threads, records always come back in cell-index order.
BenchResult run_benchmark(const std::vector<BwInstance>& corpus,
                          const std::vector<std::string>& variants,
                          const std::vector<uint64_t>& seeds, int threads = 1);

std::string bench_csv(const BenchResult& result);

}  // namespace aicon::bw
