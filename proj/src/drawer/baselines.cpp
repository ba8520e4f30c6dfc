#include <ostream>

#include "aicon/drawer/episode.hpp"

namespace aicon::drawer {

namespace {

// Shared per-tick plumbing: execute a scripted command while the network
// keeps estimating (the planners reuse the same EKFs; only the decision
// making differs).
struct ScriptedRun {
  ScriptedRun(const Scenario& scenario, uint64_t seed, std::ostream* trace_out)
      : sim(scenario, Rng::mix(seed, 1)),
        net(network_params_from(scenario),
            engine_config_from(scenario, Rng::mix(seed, 2))),
        out_stream(trace_out),
        cap(scenario.config.get_int("episode.tick_cap", 3000)) {
    if (out_stream) *out_stream << trace_header() << '\n';
    frame = sim.render();
  }

  // Returns false once the tick cap is hit.
  bool step(const Eigen::Vector3d& v_cmd, double hand_rate,
            BehaviorLabel label) {
    if (tick >= cap) return false;
    net.graph().node_mut("a_ee").value = v_cmd;
    net.graph().node_mut("a_hand").value = Eigen::VectorXd::Constant(1, hand_rate);
    net.estimate(frame);

    result.jerk += (v_cmd - prev_v).norm();
    prev_v = v_cmd;

    TickRecord r;
    r.label = label;
    double dq = net.q_est() - 0.20;
    r.goal_cost = dq * dq;
    r.p_visible = net.p_visible();
    r.p_grasped = net.p_grasped();
    r.sigma_drawer = net.trace_sigma_drawer();
    r.sigma_joint = net.trace_sigma_joint();
    r.q_true = sim.world().q;
    r.q_est = net.q_est();
    r.ee_true = sim.robot().ee.t;
    r.a_ee = v_cmd;
    r.a_hand = hand_rate;
    if (out_stream) *out_stream << trace_row(tick, r) << '\n';
    result.trace.push_back(r);

    Commands cmd;
    cmd.ee_twist.head<3>() = v_cmd;
    cmd.hand_rate = hand_rate;
    frame = sim.step(cmd);
    ++tick;
    return true;
  }

  EpisodeResult finish() {
    result.ticks = tick;
    result.final_q_error = std::abs(sim.world().q - 0.20);
    result.success = result.final_q_error < 0.01;
    result.status = tick >= cap ? "tick_cap" : "script_done";
    return result;
  }

  DrawerSim sim;
  DrawerNetwork net;
  std::ostream* out_stream;
  int cap;
  int tick = 0;
  SensorFrame frame;
  Eigen::Vector3d prev_v = Eigen::Vector3d::Zero();
  EpisodeResult result;
};

Eigen::Vector3d clamp_speed(const Eigen::Vector3d& v, double limit) {
  double n = v.norm();
  return n > limit ? Eigen::Vector3d(v * (limit / n)) : v;
}

// One precomputed trajectory from the prior mean, executed blind: approach
// the believed handle, close, pull the believed opening distance along the
// believed axis.
EpisodeResult state_space(const Scenario& scenario, uint64_t seed,
                          std::ostream* trace_out) {
  ScriptedRun run(scenario, seed, trace_out);
  const NetworkParams& P = run.net.params();
  const double dt = P.dt;
  const double speed = 0.15;

  Eigen::Vector3d planned_ee = scenario.ee_start.t;
  const Eigen::Vector3d target = P.drawer_prior;
  const Eigen::Vector3d u = spherical_dir(P.joint_prior(0), P.joint_prior(1));
  const double pull_dist = 0.20 - P.joint_prior(2);

  // Approach leg (open loop: integrate the planned pose, ignore feedback).
  while ((target - planned_ee).norm() > 1e-4) {
    Eigen::Vector3d v = clamp_speed((target - planned_ee) / dt, speed);
    if (!run.step(v, 0.0, BehaviorLabel::approach)) return run.finish();
    planned_ee += v * dt;
  }
  // Close the hand.
  double planned_hand = scenario.hand_start;
  while (planned_hand > 0.1) {
    if (!run.step(Eigen::Vector3d::Zero(), -2.0, BehaviorLabel::grasp))
      return run.finish();
    planned_hand = std::max(planned_hand - 2.0 * dt, 0.0);
  }
  // Pull leg.
  double pulled = 0.0;
  while (pulled < pull_dist - 1e-4) {
    double v_mag = std::min(speed, (pull_dist - pulled) / dt);
    if (!run.step(v_mag * u, 0.0, BehaviorLabel::open)) return run.finish();
    pulled += v_mag * dt;
  }
  for (int i = 0; i < 20; ++i)
    if (!run.step(Eigen::Vector3d::Zero(), 0.0, BehaviorLabel::open))
      return run.finish();
  return run.finish();
}

// Scripted belief-space plan: three viewpoints feeding the handle EKF, a
// grasp planned from the posterior, two pull-wiggle explorations feeding the
// joint EKF, then a pull to the goal. Disturbances are never re-acquired.
EpisodeResult belief_space(const Scenario& scenario, uint64_t seed,
                           std::ostream* trace_out) {
  ScriptedRun run(scenario, seed, trace_out);
  const NetworkParams& P = run.net.params();
  const double dt = P.dt;
  const double speed = 0.15;
  const Config& cfg = scenario.config;

  std::vector<Eigen::Vector3d> viewpoints;
  auto flat = cfg.get_array("baseline.viewpoints", {});
  if (!flat.empty() && flat.size() % 3 == 0) {
    for (size_t i = 0; i + 2 < flat.size(); i += 3)
      viewpoints.emplace_back(flat[i], flat[i + 1], flat[i + 2]);
  } else {
    viewpoints = {P.drawer_prior + Eigen::Vector3d(-0.40, -0.12, 0.0),
                  P.drawer_prior + Eigen::Vector3d(-0.40, 0.12, 0.0),
                  P.drawer_prior + Eigen::Vector3d(-0.40, 0.0, 0.12)};
  }

  // Servo on the network's own EE estimate toward a waypoint.
  auto goto_point = [&](const Eigen::Vector3d& wp, BehaviorLabel label,
                        double tol) {
    while ((wp - run.net.x_ee()).norm() > tol) {
      Eigen::Vector3d v = clamp_speed((wp - run.net.x_ee()) / dt, speed);
      if (!run.step(v, 0.0, label)) return false;
    }
    return true;
  };
  auto dwell = [&](int n, BehaviorLabel label) {
    for (int i = 0; i < n; ++i)
      if (!run.step(Eigen::Vector3d::Zero(), 0.0, label)) return false;
    return true;
  };

  for (const auto& wp : viewpoints) {
    if (!goto_point(wp, BehaviorLabel::look_around, 0.01)) return run.finish();
    if (!dwell(15, BehaviorLabel::look_around)) return run.finish();
  }

  // Grasp from the posterior handle estimate (frozen at plan time).
  const Eigen::Vector3d grasp_target = run.net.x_drawer();
  if (!goto_point(grasp_target, BehaviorLabel::approach, 0.005))
    return run.finish();
  while (run.net.x_hand() > 0.1)
    if (!run.step(Eigen::Vector3d::Zero(), -2.0, BehaviorLabel::grasp))
      return run.finish();

  // Two short pull-wiggles; the handle follows the EE while held, which the
  // joint EKF fits to recover axis and opening.
  for (int w = 0; w < 2; ++w) {
    const Eigen::Matrix<double, 6, 1> xj = run.net.x_joint();
    Eigen::Vector3d u = spherical_dir(xj(0), xj(1));
    int pull_ticks = static_cast<int>(std::ceil(0.02 / (0.05 * dt)));
    for (int i = 0; i < pull_ticks; ++i)
      if (!run.step(0.05 * u, 0.0, BehaviorLabel::open)) return run.finish();
    if (!dwell(5, BehaviorLabel::open)) return run.finish();
  }

  // Final pull on the estimated opening; no reaction if the grasp is lost.
  int guard = static_cast<int>(std::ceil(0.45 / (0.1 * dt)));
  for (int i = 0; i < guard && run.net.q_est() < 0.20 - 0.002; ++i) {
    const Eigen::Matrix<double, 6, 1> xj = run.net.x_joint();
    Eigen::Vector3d u = spherical_dir(xj(0), xj(1));
    double v_mag = std::min(0.1, (0.20 - run.net.q_est()) / dt);
    if (!run.step(v_mag * u, 0.0, BehaviorLabel::open)) return run.finish();
  }
  dwell(20, BehaviorLabel::open);
  return run.finish();
}

}  // namespace

EpisodeResult run_baseline(const Scenario& scenario, EpisodeMode mode,
                           uint64_t seed, std::ostream* trace_out) {
  if (mode == EpisodeMode::baseline_state_space)
    return state_space(scenario, seed, trace_out);
  if (mode == EpisodeMode::baseline_belief_space)
    return belief_space(scenario, seed, trace_out);
  throw ConfigError("not a baseline mode: " + mode_name(mode));
}

}  // namespace aicon::drawer
