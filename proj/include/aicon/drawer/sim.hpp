#pragma once

#include <optional>

#include "aicon/util/config.hpp"
#include "aicon/util/pose.hpp"
#include "aicon/util/rng.hpp"

namespace aicon::drawer {

struct DrawerWorld {
  Eigen::Vector3d p = Eigen::Vector3d::Zero();  // handle position when closed
  double phi = 0.0, theta = 0.0;                // prismatic axis, spherical
  double q = 0.0;
  double q_max = 0.35;
  double handle_radius = 0.03;

  Eigen::Vector3d axis() const { return spherical_dir(phi, theta); }
  Eigen::Vector3d handle() const { return p + q * axis(); }
};

struct RobotTruth {
  Pose ee;  // grasp frame; camera sits ahead of it along local +x
  double hand_openness = 1.0;
  bool holding = false;
};

struct SensorFrame {
  int tick = 0;
  bool bearing_valid = false;
  Eigen::Vector2d bearing = Eigen::Vector2d::Zero();
  Eigen::Matrix<double, 6, 1> ft = Eigen::Matrix<double, 6, 1>::Zero();
  Pose ee_odom;
  double hand_reading = 1.0;
  bool clamped = false;
};

struct DisturbanceEvent {
  int tick = 0;
  enum Kind { shift_cabinet, strip_from_hand, sensor_noise_scale } kind;
  Eigen::Vector3d dp = Eigen::Vector3d::Zero();
  double factor = 1.0;
};

struct SimParams {
  double dt = 0.05;
  double lin_limit = 0.2, ang_limit = 0.5;
  double slip_threshold = 0.02;
  double grasp_close_openness = 0.3;
  double fov_half_angle = 35.0 * M_PI / 180.0;
  double camera_offset = 0.10;
  double bearing_sigma = 0.01;
  double odom_sigma = 0.001;
  double ft_sigma = 0.1;
  double hand_sigma = 0.01;
  double spring_k = 50.0;   // N/m, off-axis while holding
  double drag = 20.0;       // N*s/m along the axis while pulling
  double grip_force = 1.0;  // N contact baseline while holding
  double strip_reset_q = 0.0;
};

struct Scenario {
  DrawerWorld world;
  Pose ee_start;
  double hand_start = 1.0;
  std::vector<DisturbanceEvent> events;  // ticks strictly increasing
  SimParams params;
  Config config;  // full file, for priors and engine settings

  static Scenario from_config(const Config& cfg);
  static Scenario from_file(const std::string& path);
};

// Pinhole bearing of the handle in the wrist camera (normalized image
// coordinates), or nullopt outside the frustum / behind the camera.
std::optional<Eigen::Vector2d> render_bearing(const DrawerWorld& world,
                                              const RobotTruth& robot,
                                              const SimParams& params);

Pose camera_pose(const Pose& ee, const SimParams& params);

struct Commands {
  Eigen::Matrix<double, 6, 1> ee_twist =
      Eigen::Matrix<double, 6, 1>::Zero();  // [v; w]
  double hand_rate = 0.0;
};

class DrawerSim {
 public:
  DrawerSim(const Scenario& scenario, uint64_t seed);

  SensorFrame step(const Commands& cmd);
  SensorFrame render();  // sensors only, world untouched

  const DrawerWorld& world() const { return world_; }
  const RobotTruth& robot() const { return robot_; }
  int tick() const { return tick_; }
  double noise_scale() const { return noise_scale_; }

 private:
  void apply_events();

  Scenario scenario_;
  DrawerWorld world_;
  RobotTruth robot_;
  Eigen::Vector3d grasp_offset_ = Eigen::Vector3d::Zero();
  double last_dq_ = 0.0;
  double noise_scale_ = 1.0;
  int tick_ = 0;
  size_t next_event_ = 0;
  Rng rng_;
};

std::string frame_log_header();
std::string frame_log_row(int tick, const DrawerWorld& world,
                          const RobotTruth& robot, const SensorFrame& frame);

}  // namespace aicon::drawer
