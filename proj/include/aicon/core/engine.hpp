#pragma once

#include <memory>

#include "aicon/core/graph.hpp"
#include "aicon/util/config.hpp"
#include "aicon/util/rng.hpp"

namespace aicon {

struct EngineConfig {
  double epsilon = 1e-4;        // dead-band below which a gradient is stationary
  double cost_threshold = 1e-6; // goal cost counted as reached
  int max_depth = 6;
  double decay = 0.5;           // non-selected actuator decay per tick
  TieBreak tie_break = TieBreak::seeded_random;
  uint64_t seed = 0;
  bool scale_by_gain = false;   // compare gain-scaled norms instead of raw
  std::map<std::string, Eigen::VectorXd> gains;
  std::map<std::string, double> limits;  // optional max norm per actuator

  static EngineConfig from_config(const Config& cfg, const std::string& section);
};

enum class EngineStatus { active, goal_stationary, success };

struct CycleResult {
  EngineStatus status = EngineStatus::active;
  double goal_cost = 0.0;
  std::string selected_path;  // empty when stationary
  Eigen::RowVectorXd selected_gradient;
  std::string selected_actuator;
  std::vector<std::pair<std::string, double>> magnitudes;  // path id -> norm
};

// One tick/select/descend cycle over a graph; single-threaded by design.
class Engine {
 public:
  Engine(Graph graph, Goal goal, EngineConfig config);

  CycleResult cycle(const std::map<std::string, Eigen::VectorXd>& sensors);

  // Selection and descent on the current (post-tick) state, without
  // stepping estimates; used by the potential-field sampler.
  CycleResult select_only();

  Graph& graph() { return graph_; }
  const Graph& graph() const { return graph_; }
  const Goal& goal() const { return goal_; }
  const std::vector<GradientPath>& paths() const { return paths_; }
  const EngineConfig& config() const { return config_; }

  // Sum-gradient ablation: apply the per-actuator sum of all path gradients
  // instead of selecting the steepest.
  void set_sum_mode(bool on) { sum_mode_ = on; }

 private:
  CycleResult evaluate_and_choose(bool apply_descent);
  void clamp_actuators();

  Graph graph_;
  Goal goal_;
  EngineConfig config_;
  std::vector<GradientPath> paths_;  // enumerated once; topology is static
  Rng rng_;
  bool sum_mode_ = false;
};

}  // namespace aicon
