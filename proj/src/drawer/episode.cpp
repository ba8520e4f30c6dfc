#include "aicon/drawer/episode.hpp"

#include <ostream>
#include <sstream>

#include "aicon/util/csv.hpp"

namespace aicon::drawer {

EpisodeMode parse_mode(const std::string& name) {
  if (name == "full") return EpisodeMode::full;
  if (name == "sum_gradients") return EpisodeMode::sum_gradients;
  if (name == "frozen_interconnections")
    return EpisodeMode::frozen_interconnections;
  if (name == "baseline_state_space") return EpisodeMode::baseline_state_space;
  if (name == "baseline_belief_space")
    return EpisodeMode::baseline_belief_space;
  throw ConfigError("unknown mode: " + name);
}

std::string mode_name(EpisodeMode m) {
  switch (m) {
    case EpisodeMode::full: return "full";
    case EpisodeMode::sum_gradients: return "sum_gradients";
    case EpisodeMode::frozen_interconnections:
      return "frozen_interconnections";
    case EpisodeMode::baseline_state_space: return "baseline_state_space";
    case EpisodeMode::baseline_belief_space: return "baseline_belief_space";
  }
  return "full";
}

std::string trace_header() {
  return "tick,behavior_label,goal_cost,p_visible,p_grasped,"
         "trace_sigma_drawer,trace_sigma_joint,q_true,q_est,"
         "a_ee_vx,a_ee_vy,a_ee_vz,a_ee_wx,a_ee_wy,a_ee_wz,a_hand";
}

std::string trace_row(int tick, const TickRecord& r) {
  std::ostringstream os;
  os << tick << ',' << behavior_name(r.label) << ',' << fmt_num(r.goal_cost)
     << ',' << fmt_num(r.p_visible) << ',' << fmt_num(r.p_grasped) << ','
     << fmt_num(r.sigma_drawer) << ',' << fmt_num(r.sigma_joint) << ','
     << fmt_num(r.q_true) << ',' << fmt_num(r.q_est);
  for (int i = 0; i < 3; ++i) os << ',' << fmt_num(r.a_ee(i));
  os << ",0,0,0," << fmt_num(r.a_hand);
  return os.str();
}

NetworkParams network_params_from(const Scenario& scenario) {
  NetworkParams p = NetworkParams::from_config(scenario.config);
  p.dt = scenario.params.dt;
  p.camera_offset = scenario.params.camera_offset;
  p.fov_half_angle = scenario.params.fov_half_angle;
  return p;
}

EngineConfig engine_config_from(const Scenario& scenario, uint64_t seed) {
  const Config& cfg = scenario.config;
  EngineConfig ec = EngineConfig::from_config(cfg, "engine");
  if (!cfg.has("engine.epsilon")) ec.epsilon = 1e-9;
  if (!cfg.has("engine.max_depth")) ec.max_depth = 6;
  ec.seed = seed;
  double g_ee = cfg.get_double("engine.gain_ee", 60.0);
  double g_hand = cfg.get_double("engine.gain_hand", 2.0e4);
  ec.gains["a_ee"] = Eigen::Vector3d::Constant(g_ee);
  ec.gains["a_hand"] = Eigen::VectorXd::Constant(1, g_hand);
  ec.limits["a_ee"] = cfg.get_double("engine.limit_ee", 0.2);
  ec.limits["a_hand"] = cfg.get_double("engine.limit_hand", 2.0);
  return ec;
}

namespace {

TickRecord record_of(const DrawerNetwork& net, const DrawerSim& sim,
                     double goal_cost, BehaviorLabel label,
                     const Eigen::Vector3d& a_ee, double a_hand) {
  TickRecord r;
  r.label = label;
  r.goal_cost = goal_cost;
  r.p_visible = net.p_visible();
  r.p_grasped = net.p_grasped();
  r.sigma_drawer = net.trace_sigma_drawer();
  r.sigma_joint = net.trace_sigma_joint();
  r.q_true = sim.world().q;
  r.q_est = net.q_est();
  r.ee_true = sim.robot().ee.t;
  r.a_ee = a_ee;
  r.a_hand = a_hand;
  return r;
}

}  // namespace

EpisodeResult run_episode(const Scenario& scenario, EpisodeMode mode,
                          uint64_t seed, std::ostream* trace_out) {
  if (mode == EpisodeMode::baseline_state_space ||
      mode == EpisodeMode::baseline_belief_space)
    return run_baseline(scenario, mode, seed, trace_out);

  DrawerSim sim(scenario, Rng::mix(seed, 1));
  DrawerNetwork net(network_params_from(scenario),
                    engine_config_from(scenario, Rng::mix(seed, 2)));
  if (mode == EpisodeMode::frozen_interconnections) net.set_frozen(true);
  if (mode == EpisodeMode::sum_gradients) net.set_sum_mode(true);

  const int cap = scenario.config.get_int("episode.tick_cap", 3000);
  const double q_goal = 0.20, tol = 0.01;

  EpisodeResult out;
  if (trace_out) *trace_out << trace_header() << '\n';

  Eigen::Vector3d prev_a = Eigen::Vector3d::Zero();
  BehaviorLabel last_label = BehaviorLabel::look_around;
  int streak = 0;
  SensorFrame frame = sim.render();
  int tick = 0;
  for (; tick < cap; ++tick) {
    CycleResult res = net.cycle(frame);
    if (!res.selected_path.empty()) last_label = net.classify(res.selected_path);

    Eigen::Vector3d a_ee = net.graph().node("a_ee").value;
    double a_hand = net.graph().node("a_hand").value(0);
    out.jerk += (a_ee - prev_a).norm();
    prev_a = a_ee;

    TickRecord rec = record_of(net, sim, res.goal_cost, last_label, a_ee, a_hand);
    if (trace_out) *trace_out << trace_row(tick, rec) << '\n';
    out.trace.push_back(rec);

    // Converge on the estimate at half the success tolerance: the margin
    // absorbs the residual estimate-truth offset.
    streak = std::abs(net.q_est() - q_goal) < 0.5 * tol ? streak + 1 : 0;
    if (streak >= 20) {
      ++tick;
      break;
    }

    Commands cmd;
    cmd.ee_twist.head<3>() = a_ee;
    cmd.hand_rate = a_hand;
    frame = sim.step(cmd);
  }

  out.ticks = tick;
  out.final_q_error = std::abs(sim.world().q - q_goal);
  out.success = out.final_q_error < tol;
  out.status = streak >= 20 ? "converged" : "tick_cap";
  return out;
}

}  // namespace aicon::drawer
