#pragma once

#include <iosfwd>

#include "aicon/drawer/network.hpp"

namespace aicon::drawer {

enum class EpisodeMode {
  full,
  sum_gradients,
  frozen_interconnections,
  baseline_state_space,
  baseline_belief_space,
};

EpisodeMode parse_mode(const std::string& name);
std::string mode_name(EpisodeMode m);

struct TickRecord {
  BehaviorLabel label = BehaviorLabel::open;
  double goal_cost = 0.0;
  double p_visible = 0.0, p_grasped = 0.0;
  double sigma_drawer = 0.0, sigma_joint = 0.0;
  double q_true = 0.0, q_est = 0.0;
  Eigen::Vector3d ee_true = Eigen::Vector3d::Zero();
  Eigen::Vector3d a_ee = Eigen::Vector3d::Zero();
  double a_hand = 0.0;
};

struct EpisodeResult {
  bool success = false;
  int ticks = 0;
  double final_q_error = 0.0;
  double jerk = 0.0;  // sum of per-tick EE command changes
  std::string status;
  std::vector<TickRecord> trace;
};

std::string trace_header();
std::string trace_row(int tick, const TickRecord& r);

// Shared builders so the baselines run the same network and noise settings.
NetworkParams network_params_from(const Scenario& scenario);
EngineConfig engine_config_from(const Scenario& scenario, uint64_t seed);

EpisodeResult run_episode(const Scenario& scenario, EpisodeMode mode,
                          uint64_t seed, std::ostream* trace_out = nullptr);

// Scripted planners (no reactive re-acquisition); dispatched by run_episode.
EpisodeResult run_baseline(const Scenario& scenario, EpisodeMode mode,
                           uint64_t seed, std::ostream* trace_out);

}  // namespace aicon::drawer
