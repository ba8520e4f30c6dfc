#pragma once

#include <memory>

#include "aicon/core/engine.hpp"
#include "aicon/drawer/sim.hpp"
#include "aicon/estimation/ekf.hpp"

namespace aicon::drawer {

enum class BehaviorLabel { open, approach, grasp, look_around, regain_view };
std::string behavior_name(BehaviorLabel l);

struct NetworkParams {
  double dt = 0.05;
  double camera_offset = 0.10;
  // Visibility gate.
  double fov_half_angle = 35.0 * M_PI / 180.0;
  double vis_width = 5.0 * M_PI / 180.0;
  // Grasp gate: p_d is a Gaussian in distance (slope ~ d near the handle, so
  // the approach chain brakes), hand and force factors logistic.
  double d0 = 0.4;
  double hand_thresh = 0.3, w_h = 0.1;
  // Narrow force factor: FT noise must not leak grasp confidence before
  // contact, or the open chain starts pulling with nothing in the hand.
  // The wrench is low-passed before it reaches the gate for the same reason.
  double f0 = 0.5, w_f = 0.08;
  double ft_alpha = 0.25;
  // Certainty gate sigma_s = 1 / (1 + (tr/tau)^2): slope vanishes when the
  // handle is already certain, stays alive at very wide priors.
  double tau_sigma = 0.0012;
  // Value-fusion gains and noise.
  double k_hand = 0.5;
  double k_drawer_grasp = 0.5;
  double q_ee = 1e-6, r_ee = 1e-6;  // q_ee covers unmodelled EE motion
  double q_hand = 1e-6, r_hand = 1e-4;
  double q_drawer = 1e-8;  // the cabinet is static; drift is housekeeping
  // Injected while the hand is closed at the believed handle but feels no
  // force: the handle cannot be where the belief puts it.
  double q_drawer_conflict = 2e-5;
  double r_bearing = 4e-4;
  // A grasp ties the handle to the EE only to within the grasp offset.
  double r_drawer_grasp = 1e-4;
  double q_joint_angles = 1e-8;
  double q_joint_q_free = 4e-4;  // ungrasped: disturbances may move the drawer
  double q_joint_q_held = 1e-5;  // held: drive-model mismatch per tick
  double q_joint_p = 1e-10;
  double r_joint_extra = 1e-6;
  // Priors.
  Eigen::Vector3d ee_prior = Eigen::Vector3d::Zero();
  double ee_prior_var = 1e-6;
  Eigen::Vector3d drawer_prior = Eigen::Vector3d(0.8, 0.0, 0.0);
  double drawer_prior_var = 1e-4;
  Eigen::Matrix<double, 6, 1> joint_prior =
      (Eigen::Matrix<double, 6, 1>() << M_PI, M_PI / 2.0, 0.0, 0.8, 0.0, 0.0)
          .finished();
  Eigen::Matrix<double, 6, 1> joint_prior_var =
      (Eigen::Matrix<double, 6, 1>() << 0.05, 0.05, 1e-4, 1e-4, 1e-4, 1e-4)
          .finished();

  static NetworkParams from_config(const Config& cfg);
};

// Standalone gate functions (also used inside the network connections).
double update_visibility(const Eigen::Vector3d& x_ee,
                         const Eigen::Vector3d& x_drawer,
                         const NetworkParams& p);
double update_grasped(const Eigen::Vector3d& x_ee,
                      const Eigen::Vector3d& x_drawer, double x_hand,
                      const Eigen::Matrix<double, 6, 1>& z_ft,
                      const NetworkParams& p);

// The Fig.-4-style drawer network: recursive estimators for the EE, hand,
// handle and prismatic joint, gating likelihoods p_visible / p_grasped, and
// the certainty node whose connection carries the viewpoint-information
// gradient. The EE orientation is held fixed; a_ee is a linear velocity.
class DrawerNetwork {
 public:
  DrawerNetwork(const NetworkParams& params, const EngineConfig& engine_cfg);

  Engine& engine() { return *engine_; }
  const Engine& engine() const { return *engine_; }
  Graph& graph() { return engine_->graph(); }
  const Graph& graph() const { return engine_->graph(); }

  std::map<std::string, Eigen::VectorXd> sensor_map(
      const SensorFrame& frame) const;

  // Estimate + select + descend on one sensor frame.
  CycleResult cycle(const SensorFrame& frame);
  // Estimation only (used by the scripted baselines).
  void estimate(const SensorFrame& frame);

  // Pin the gating quantities (p_visible, p_grasped, certainty) to their
  // current values; the ablated network keeps estimating but no gate moves.
  void set_frozen(bool on);
  void set_sum_mode(bool on) { engine_->set_sum_mode(on); }

  BehaviorLabel classify(const std::string& path_id) const;

  Eigen::Vector3d x_ee() const;
  Eigen::Vector3d x_drawer() const;
  Eigen::Matrix<double, 6, 1> x_joint() const;
  double x_hand() const;
  double p_visible() const;
  double p_grasped() const;
  double q_est() const { return x_joint()(2); }
  double trace_sigma_drawer() const { return drawer_cov_.trace(); }
  double trace_sigma_joint() const { return joint_cov_.trace(); }
  const NetworkParams& params() const { return params_; }

 private:
  friend struct NetworkWiring;
  void post_tick(Graph& g, const SensorFrame& frame);
  SensorFrame filter_frame(const SensorFrame& frame);

  NetworkParams params_;
  bool frozen_ = false;
  double frozen_pvis_ = 0.0, frozen_pgrasp_ = 0.0, frozen_sigma_ = 0.0;

  // Covariance bookkeeping and the value-fusion gains it produces.
  Eigen::Matrix3d ee_cov_, drawer_cov_;
  double hand_var_ = 0.0;
  Eigen::Matrix<double, 6, 6> joint_cov_;
  Eigen::Matrix3d k_ee_ = Eigen::Matrix3d::Zero();
  Eigen::Matrix<double, 3, 2> k_bearing_ = Eigen::Matrix<double, 3, 2>::Zero();
  Eigen::Matrix<double, 6, 3> k_joint_ = Eigen::Matrix<double, 6, 3>::Zero();

  SensorFrame last_frame_;
  Eigen::Matrix<double, 6, 1> ft_filt_ = Eigen::Matrix<double, 6, 1>::Zero();
  std::unique_ptr<Engine> engine_;
};

// Bearing of a point from a camera at ee + (offset, 0, 0), looking along +x.
Eigen::Vector2d bearing_of(const Eigen::Vector3d& x_ee,
                           const Eigen::Vector3d& point, double camera_offset);
Eigen::Matrix<double, 2, 3> bearing_jacobian(const Eigen::Vector3d& x_ee,
                                             const Eigen::Vector3d& point,
                                             double camera_offset);

}  // namespace aicon::drawer
