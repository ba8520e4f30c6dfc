#include "aicon/drawer/sim.hpp"

#include <sstream>

#include "aicon/util/csv.hpp"

namespace aicon::drawer {

namespace {

Eigen::Vector3d vec3(const std::vector<double>& a, const char* what) {
  if (a.size() != 3) throw ConfigError(std::string("expected 3 numbers for ") + what);
  return {a[0], a[1], a[2]};
}

DisturbanceEvent parse_event(const std::string& raw) {
  std::istringstream in(raw);
  DisturbanceEvent e;
  std::string kind;
  if (!(in >> e.tick >> kind))
    throw ConfigError("malformed disturbance event: " + raw);
  if (kind == "shift_cabinet") {
    e.kind = DisturbanceEvent::shift_cabinet;
    if (!(in >> e.dp.x() >> e.dp.y() >> e.dp.z()))
      throw ConfigError("shift_cabinet needs a 3-vector: " + raw);
  } else if (kind == "strip_from_hand") {
    e.kind = DisturbanceEvent::strip_from_hand;
  } else if (kind == "sensor_noise_scale") {
    e.kind = DisturbanceEvent::sensor_noise_scale;
    if (!(in >> e.factor))
      throw ConfigError("sensor_noise_scale needs a factor: " + raw);
  } else {
    throw ConfigError("unknown disturbance kind: " + kind);
  }
  return e;
}

}  // namespace

Scenario Scenario::from_config(const Config& cfg) {
  Scenario s;
  s.config = cfg;
  s.world.p = vec3(cfg.get_array("world.p", {0.8, 0.0, 0.0}), "world.p");
  s.world.phi = cfg.get_double("world.phi", 0.0);
  s.world.theta = cfg.get_double("world.theta", M_PI / 2.0);
  s.world.q = cfg.get_double("world.q", 0.0);
  s.world.q_max = cfg.get_double("world.q_max", 0.35);
  s.world.handle_radius = cfg.get_double("world.handle_radius", 0.03);

  s.ee_start.t = vec3(cfg.get_array("robot.ee_t", {0.0, 0.0, 0.0}), "robot.ee_t");
  auto rv = cfg.get_array("robot.ee_rotvec", {0.0, 0.0, 0.0});
  Eigen::Matrix<double, 6, 1> local;
  local.head<3>() = s.ee_start.t;
  local.tail<3>() = vec3(rv, "robot.ee_rotvec");
  s.ee_start = pose_from_local(local);
  s.hand_start = cfg.get_double("robot.hand", 1.0);

  SimParams& p = s.params;
  p.dt = cfg.get_double("params.dt", p.dt);
  p.lin_limit = cfg.get_double("params.lin_limit", p.lin_limit);
  p.ang_limit = cfg.get_double("params.ang_limit", p.ang_limit);
  p.slip_threshold = cfg.get_double("params.slip_threshold", p.slip_threshold);
  p.grasp_close_openness =
      cfg.get_double("params.grasp_close_openness", p.grasp_close_openness);
  p.fov_half_angle = cfg.get_double("params.fov_half_angle_deg",
                                    p.fov_half_angle * 180.0 / M_PI) *
                     M_PI / 180.0;
  p.camera_offset = cfg.get_double("params.camera_offset", p.camera_offset);
  p.bearing_sigma = cfg.get_double("noise.bearing_sigma", p.bearing_sigma);
  p.odom_sigma = cfg.get_double("noise.odom_sigma", p.odom_sigma);
  p.ft_sigma = cfg.get_double("noise.ft_sigma", p.ft_sigma);
  p.hand_sigma = cfg.get_double("noise.hand_sigma", p.hand_sigma);
  p.spring_k = cfg.get_double("params.spring_k", p.spring_k);
  p.drag = cfg.get_double("params.drag", p.drag);
  p.grip_force = cfg.get_double("params.grip_force", p.grip_force);
  p.strip_reset_q = cfg.get_double("params.strip_reset_q", p.strip_reset_q);

  for (const auto& [key, raw] : cfg.raw()) {
    if (key.rfind("disturbance.", 0) != 0) continue;
    std::string val = raw;
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
      val = val.substr(1, val.size() - 2);
    s.events.push_back(parse_event(val));
  }
  std::sort(s.events.begin(), s.events.end(),
            [](const DisturbanceEvent& a, const DisturbanceEvent& b) {
              return a.tick < b.tick;
            });
  for (size_t i = 1; i < s.events.size(); ++i)
    if (s.events[i].tick <= s.events[i - 1].tick)
      throw ConfigError("disturbance ticks must be strictly increasing");
  return s;
}

Scenario Scenario::from_file(const std::string& path) {
  return from_config(Config::from_file(path));
}

Pose camera_pose(const Pose& ee, const SimParams& params) {
  return ee.compose(Pose{Eigen::Quaterniond::Identity(),
                         Eigen::Vector3d(params.camera_offset, 0.0, 0.0)});
}

std::optional<Eigen::Vector2d> render_bearing(const DrawerWorld& world,
                                              const RobotTruth& robot,
                                              const SimParams& params) {
  Pose cam = camera_pose(robot.ee, params);
  Eigen::Vector3d rel = cam.rot.conjugate() * (world.handle() - cam.t);
  if (rel.x() <= 1e-9) return std::nullopt;
  double angle = std::atan2(std::hypot(rel.y(), rel.z()), rel.x());
  if (angle > params.fov_half_angle) return std::nullopt;
  return Eigen::Vector2d(rel.y() / rel.x(), rel.z() / rel.x());
}

DrawerSim::DrawerSim(const Scenario& scenario, uint64_t seed)
    : scenario_(scenario),
      world_(scenario.world),
      rng_(Rng::mix(seed, 0x5157u)) {
  robot_.ee = scenario.ee_start;
  robot_.hand_openness = scenario.hand_start;
}

void DrawerSim::apply_events() {
  while (next_event_ < scenario_.events.size() &&
         scenario_.events[next_event_].tick == tick_) {
    const DisturbanceEvent& e = scenario_.events[next_event_++];
    switch (e.kind) {
      case DisturbanceEvent::shift_cabinet:
        world_.p += e.dp;
        break;
      case DisturbanceEvent::strip_from_hand:
        if (robot_.holding) {
          robot_.holding = false;
          world_.q = std::clamp(scenario_.params.strip_reset_q, 0.0,
                                world_.q_max);
        }
        break;
      case DisturbanceEvent::sensor_noise_scale:
        noise_scale_ = e.factor;
        break;
    }
  }
}

SensorFrame DrawerSim::step(const Commands& cmd) {
  const SimParams& p = scenario_.params;
  apply_events();

  Eigen::Vector3d v = cmd.ee_twist.head<3>();
  Eigen::Vector3d w = cmd.ee_twist.tail<3>();
  bool clamped = false;
  if (v.norm() > p.lin_limit) {
    v *= p.lin_limit / v.norm();
    clamped = true;
  }
  if (w.norm() > p.ang_limit) {
    w *= p.ang_limit / w.norm();
    clamped = true;
  }

  const Eigen::Vector3d prev_t = robot_.ee.t;
  robot_.ee.t += v * p.dt;
  double wn = w.norm();
  if (wn > 1e-12)
    robot_.ee.rot =
        Eigen::Quaterniond(Eigen::AngleAxisd(wn * p.dt, w / wn)) *
        robot_.ee.rot;
  robot_.hand_openness =
      std::clamp(robot_.hand_openness + cmd.hand_rate * p.dt, 0.0, 1.0);

  last_dq_ = 0.0;
  if (robot_.holding) {
    Eigen::Vector3d delta = robot_.ee.t - prev_t;
    double q_new =
        std::clamp(world_.q + world_.axis().dot(delta), 0.0, world_.q_max);
    last_dq_ = q_new - world_.q;
    world_.q = q_new;
    Eigen::Vector3d mismatch =
        (robot_.ee.t + grasp_offset_) - world_.handle();
    if (mismatch.norm() > p.slip_threshold) robot_.holding = false;
  }
  if (!robot_.holding && robot_.hand_openness < p.grasp_close_openness &&
      (robot_.ee.t - world_.handle()).norm() < world_.handle_radius) {
    robot_.holding = true;
    grasp_offset_ = world_.handle() - robot_.ee.t;
  }

  ++tick_;
  SensorFrame frame = render();
  frame.clamped = clamped;
  return frame;
}

SensorFrame DrawerSim::render() {
  const SimParams& p = scenario_.params;
  SensorFrame f;
  f.tick = tick_;

  if (auto b = render_bearing(world_, robot_, p)) {
    f.bearing_valid = true;
    f.bearing = *b + Eigen::Vector2d(rng_.gaussian(0, p.bearing_sigma * noise_scale_),
                                     rng_.gaussian(0, p.bearing_sigma * noise_scale_));
  }

  if (robot_.holding) {
    Eigen::Vector3d mismatch =
        (robot_.ee.t + grasp_offset_) - world_.handle();
    Eigen::Vector3d force = -p.spring_k * mismatch -
                            (p.drag * last_dq_ / p.dt + p.grip_force) *
                                world_.axis();
    f.ft.head<3>() = force;
  }
  for (int i = 0; i < 6; ++i)
    f.ft(i) += rng_.gaussian(0, p.ft_sigma * noise_scale_);

  f.ee_odom = robot_.ee;
  for (int i = 0; i < 3; ++i)
    f.ee_odom.t(i) += rng_.gaussian(0, p.odom_sigma * noise_scale_);

  f.hand_reading = std::clamp(
      robot_.hand_openness + rng_.gaussian(0, p.hand_sigma * noise_scale_),
      0.0, 1.0);
  return f;
}

std::string frame_log_header() {
  return "tick,q,ee_qw,ee_qx,ee_qy,ee_qz,ee_tx,ee_ty,ee_tz,holding,"
         "bearing_valid,bearing_u,bearing_v,ft_norm";
}

std::string frame_log_row(int tick, const DrawerWorld& world,
                          const RobotTruth& robot, const SensorFrame& frame) {
  std::string out = fmt_num(tick) + "," + fmt_num(world.q);
  auto v7 = robot.ee.as_vec7();
  for (int i = 0; i < 7; ++i) out += "," + fmt_num(v7(i));
  out += std::string(",") + (robot.holding ? "1" : "0");
  out += std::string(",") + (frame.bearing_valid ? "1" : "0");
  out += "," + fmt_num(frame.bearing.x()) + "," + fmt_num(frame.bearing.y());
  out += "," + fmt_num(frame.ft.head<3>().norm());
  return out;
}

}  // namespace aicon::drawer
