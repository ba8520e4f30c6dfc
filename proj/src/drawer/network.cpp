#include "aicon/drawer/network.hpp"

namespace aicon::drawer {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double dlogistic(double x) {
  double s = logistic(x);
  return s * (1.0 - s);
}

Eigen::VectorXd vec1(double v) {
  Eigen::VectorXd out(1);
  out(0) = v;
  return out;
}
Eigen::MatrixXd mat1(double v) {
  Eigen::MatrixXd out(1, 1);
  out(0, 0) = v;
  return out;
}

double sigma_gate(double tr, double tau) {
  double r = tr / tau;
  return 1.0 / (1.0 + r * r);
}

// Subgoal-channel slope for the certainty hop: the gate derivative scaled by
// the unresolved deficit, so a confident estimate yields no look-around pull.
double sigma_look_slope(double tr, double tau) {
  double r = tr / tau;
  double d = 1.0 + r * r;
  return -2.0 * r * r * r / (tau * d * d * d);
}

// Gaussian closeness factor of the grasp gate, normalized to 0.5 at d0.
// The slope vanishes linearly at d = 0, so the approach chain brakes
// proportionally instead of orbiting the handle, while the tail still
// carries a usable pull from across the workspace.
double p_dist(double d, double d0) {
  double r = d / d0;
  return std::exp(-M_LN2 * r * r);
}
double dp_dist(double d, double d0) {
  return -2.0 * M_LN2 * d / (d0 * d0) * p_dist(d, d0);
}

Eigen::Vector3d joint_handle(const Eigen::Matrix<double, 6, 1>& xj) {
  return xj.tail<3>() + xj(2) * spherical_dir(xj(0), xj(1));
}

Eigen::Matrix<double, 3, 6> joint_handle_jacobian(
    const Eigen::Matrix<double, 6, 1>& xj) {
  Eigen::Matrix<double, 3, 6> H = Eigen::Matrix<double, 3, 6>::Zero();
  H.block<3, 2>(0, 0) = xj(2) * spherical_dir_jacobian(xj(0), xj(1));
  H.col(2) = spherical_dir(xj(0), xj(1));
  H.block<3, 3>(0, 3).setIdentity();
  return H;
}

}  // namespace

std::string behavior_name(BehaviorLabel l) {
  switch (l) {
    case BehaviorLabel::open: return "open";
    case BehaviorLabel::approach: return "approach";
    case BehaviorLabel::grasp: return "grasp";
    case BehaviorLabel::look_around: return "look_around";
    case BehaviorLabel::regain_view: return "regain_view";
  }
  return "open";
}

NetworkParams NetworkParams::from_config(const Config& cfg) {
  NetworkParams p;
  p.dt = cfg.get_double("params.dt", p.dt);
  p.camera_offset = cfg.get_double("params.camera_offset", p.camera_offset);
  p.fov_half_angle = cfg.get_double("params.fov_half_angle_deg",
                                    p.fov_half_angle * 180.0 / M_PI) *
                     M_PI / 180.0;
  p.vis_width =
      cfg.get_double("network.vis_width_deg", p.vis_width * 180.0 / M_PI) *
      M_PI / 180.0;
  p.d0 = cfg.get_double("network.d0", p.d0);
  p.hand_thresh = cfg.get_double("network.hand_thresh", p.hand_thresh);
  p.w_h = cfg.get_double("network.w_h", p.w_h);
  p.f0 = cfg.get_double("network.f0", p.f0);
  p.w_f = cfg.get_double("network.w_f", p.w_f);
  p.ft_alpha = cfg.get_double("network.ft_alpha", p.ft_alpha);
  p.tau_sigma = cfg.get_double("network.tau_sigma", p.tau_sigma);
  p.k_hand = cfg.get_double("network.k_hand", p.k_hand);
  p.k_drawer_grasp =
      cfg.get_double("network.k_drawer_grasp", p.k_drawer_grasp);
  p.q_ee = cfg.get_double("network.q_ee", p.q_ee);
  p.r_ee = cfg.get_double("network.r_ee", p.r_ee);
  p.q_hand = cfg.get_double("network.q_hand", p.q_hand);
  p.r_hand = cfg.get_double("network.r_hand", p.r_hand);
  p.q_drawer = cfg.get_double("network.q_drawer", p.q_drawer);
  p.q_drawer_conflict =
      cfg.get_double("network.q_drawer_conflict", p.q_drawer_conflict);
  p.r_bearing = cfg.get_double("network.r_bearing", p.r_bearing);
  p.r_drawer_grasp =
      cfg.get_double("network.r_drawer_grasp", p.r_drawer_grasp);
  p.q_joint_angles = cfg.get_double("network.q_joint_angles", p.q_joint_angles);
  p.q_joint_q_free = cfg.get_double("network.q_joint_q_free", p.q_joint_q_free);
  p.q_joint_q_held = cfg.get_double("network.q_joint_q_held", p.q_joint_q_held);
  p.q_joint_p = cfg.get_double("network.q_joint_p", p.q_joint_p);
  p.r_joint_extra = cfg.get_double("network.r_joint_extra", p.r_joint_extra);

  auto getv3 = [&](const char* key, Eigen::Vector3d fallback) {
    auto a = cfg.get_array(key, {fallback.x(), fallback.y(), fallback.z()});
    if (a.size() != 3) throw ConfigError(std::string("expected 3 numbers: ") + key);
    return Eigen::Vector3d(a[0], a[1], a[2]);
  };
  p.ee_prior = getv3("prior.ee", p.ee_prior);
  p.ee_prior_var = cfg.get_double("prior.ee_var", p.ee_prior_var);
  p.drawer_prior = getv3("prior.drawer", p.drawer_prior);
  p.drawer_prior_var = cfg.get_double("prior.drawer_var", p.drawer_prior_var);
  auto jp = cfg.get_array("prior.joint",
                          {p.joint_prior(0), p.joint_prior(1), p.joint_prior(2),
                           p.joint_prior(3), p.joint_prior(4), p.joint_prior(5)});
  auto jv = cfg.get_array(
      "prior.joint_var",
      {p.joint_prior_var(0), p.joint_prior_var(1), p.joint_prior_var(2),
       p.joint_prior_var(3), p.joint_prior_var(4), p.joint_prior_var(5)});
  if (jp.size() != 6 || jv.size() != 6)
    throw ConfigError("prior.joint and prior.joint_var need 6 numbers");
  for (int i = 0; i < 6; ++i) {
    p.joint_prior(i) = jp[i];
    p.joint_prior_var(i) = jv[i];
  }
  return p;
}

Eigen::Vector2d bearing_of(const Eigen::Vector3d& x_ee,
                           const Eigen::Vector3d& point,
                           double camera_offset) {
  Eigen::Vector3d rel = point - (x_ee + Eigen::Vector3d(camera_offset, 0, 0));
  double xs = std::max(rel.x(), 0.05);
  return {rel.y() / xs, rel.z() / xs};
}

Eigen::Matrix<double, 2, 3> bearing_jacobian(const Eigen::Vector3d& x_ee,
                                             const Eigen::Vector3d& point,
                                             double camera_offset) {
  Eigen::Vector3d rel = point - (x_ee + Eigen::Vector3d(camera_offset, 0, 0));
  double xs = std::max(rel.x(), 0.05);
  Eigen::Matrix<double, 2, 3> B = Eigen::Matrix<double, 2, 3>::Zero();
  if (rel.x() > 0.05) {
    B(0, 0) = -rel.y() / (xs * xs);
    B(1, 0) = -rel.z() / (xs * xs);
  }
  B(0, 1) = 1.0 / xs;
  B(1, 2) = 1.0 / xs;
  return B;
}

double update_visibility(const Eigen::Vector3d& x_ee,
                         const Eigen::Vector3d& x_drawer,
                         const NetworkParams& p) {
  Eigen::Vector3d rel =
      x_drawer - (x_ee + Eigen::Vector3d(p.camera_offset, 0, 0));
  if (rel.norm() < 1e-9) return 0.0;  // handle at camera origin
  double alpha = std::atan2(std::hypot(rel.y(), rel.z()), rel.x());
  return logistic((p.fov_half_angle - alpha) / p.vis_width);
}

double update_grasped(const Eigen::Vector3d& x_ee,
                      const Eigen::Vector3d& x_drawer, double x_hand,
                      const Eigen::Matrix<double, 6, 1>& z_ft,
                      const NetworkParams& p) {
  double d = std::max((x_drawer - x_ee).norm(), 1e-9);
  double f = z_ft.head<3>().norm();
  return p_dist(d, p.d0) * logistic((p.hand_thresh - x_hand) / p.w_h) *
         logistic((f - p.f0) / p.w_f);
}

DrawerNetwork::DrawerNetwork(const NetworkParams& params,
                             const EngineConfig& engine_cfg)
    : params_(params) {
  const NetworkParams& P = params_;
  DrawerNetwork* self = this;

  ee_cov_ = P.ee_prior_var * Eigen::Matrix3d::Identity();
  hand_var_ = 0.01;
  drawer_cov_ = P.drawer_prior_var * Eigen::Matrix3d::Identity();
  joint_cov_ = P.joint_prior_var.asDiagonal();

  std::vector<QuantityNode> nodes;
  nodes.push_back({"a_ee", NodeKind::actuator, Eigen::Vector3d::Zero(), {}});
  nodes.push_back({"a_hand", NodeKind::actuator, vec1(0.0), {}});
  nodes.push_back({"z_ee", NodeKind::sensor, P.ee_prior, {}});
  nodes.push_back({"z_ft", NodeKind::sensor,
                   Eigen::Matrix<double, 6, 1>::Zero(), {}});
  nodes.push_back({"z_hand", NodeKind::sensor, vec1(1.0), {}});
  nodes.push_back(
      {"z_bearing", NodeKind::sensor, Eigen::Vector3d::Zero(), {}});
  nodes.push_back({"x_ee", NodeKind::estimate, P.ee_prior, ee_cov_});
  nodes.push_back({"x_hand", NodeKind::estimate, vec1(1.0), mat1(hand_var_)});
  nodes.push_back({"x_drawer", NodeKind::estimate, P.drawer_prior, drawer_cov_});
  nodes.push_back({"x_joint", NodeKind::estimate, P.joint_prior, joint_cov_});
  nodes.push_back({"p_visible", NodeKind::estimate, vec1(0.0), {}});
  nodes.push_back({"p_grasped", NodeKind::estimate, vec1(0.0), {}});
  nodes.push_back({"sigma_drawer", NodeKind::estimate,
                   vec1(drawer_cov_.trace()), {}});

  std::vector<ActiveConnection> conns;

  {
    ActiveConnection c;
    c.id = "C_ee_act";
    c.inputs = {"a_ee"};
    c.output_dim = 3;
    c.evaluate = [P](const InputValues& v) -> Eigen::VectorXd {
      return P.dt * v[0];
    };
    c.jacobian = [P](const InputValues&, int) -> Eigen::MatrixXd {
      return P.dt * Eigen::Matrix3d::Identity();
    };
    conns.push_back(std::move(c));
  }
  {
    ActiveConnection c;
    c.id = "C_ee_meas";
    c.inputs = {"z_ee", "x_ee"};
    c.output_dim = 3;
    c.evaluate = [self](const InputValues& v) -> Eigen::VectorXd {
      return self->k_ee_ * (v[0] - v[1]);
    };
    c.jacobian = [self](const InputValues&, int i) -> Eigen::MatrixXd {
      return i == 0 ? Eigen::MatrixXd(self->k_ee_)
                    : Eigen::MatrixXd(-self->k_ee_);
    };
    // Estimation-only: behavior chains never route through measurement
    // fusion (moving a sensor to drag the estimate is not a behavior).
    c.path_jacobian = [](const InputValues&, int) -> Eigen::MatrixXd {
      return Eigen::MatrixXd::Zero(3, 3);
    };
    conns.push_back(std::move(c));
  }
  {
    ActiveConnection c;
    c.id = "C_hand_act";
    c.inputs = {"a_hand"};
    c.output_dim = 1;
    c.evaluate = [P](const InputValues& v) -> Eigen::VectorXd {
      return P.dt * v[0];
    };
    c.jacobian = [P](const InputValues&, int) -> Eigen::MatrixXd {
      return mat1(P.dt);
    };
    conns.push_back(std::move(c));
  }
  {
    ActiveConnection c;
    c.id = "C_hand_meas";
    c.inputs = {"z_hand", "x_hand"};
    c.output_dim = 1;
    c.evaluate = [P](const InputValues& v) -> Eigen::VectorXd {
      return P.k_hand * (v[0] - v[1]);
    };
    c.jacobian = [P](const InputValues&, int i) -> Eigen::MatrixXd {
      return mat1(i == 0 ? P.k_hand : -P.k_hand);
    };
    c.path_jacobian = [](const InputValues&, int) -> Eigen::MatrixXd {
      return mat1(0.0);  // estimation-only
    };
    conns.push_back(std::move(c));
  }
  {
    // Bearing fusion into the handle estimate; the validity channel of
    // z_bearing gates it (the camera either saw the handle or it did not).
    ActiveConnection c;
    c.id = "C_drawer_vis";
    c.inputs = {"z_bearing", "x_ee", "x_drawer"};
    c.output_dim = 3;
    c.evaluate = [self, P](const InputValues& v) -> Eigen::VectorXd {
      Eigen::Vector2d innov =
          v[0].head<2>() - bearing_of(v[1], v[2], P.camera_offset);
      return v[0](2) * (self->k_bearing_ * innov);
    };
    c.jacobian = [self, P](const InputValues& v, int i) -> Eigen::MatrixXd {
      Eigen::Matrix<double, 2, 3> B =
          bearing_jacobian(v[1], v[2], P.camera_offset);
      if (i == 0) {
        Eigen::Matrix3d J = Eigen::Matrix3d::Zero();
        J.block<3, 2>(0, 0) = v[0](2) * self->k_bearing_;
        Eigen::Vector2d innov =
            v[0].head<2>() - bearing_of(v[1], v[2], P.camera_offset);
        J.col(2) = self->k_bearing_ * innov;
        return J;
      }
      if (i == 1) return Eigen::MatrixXd(v[0](2) * (self->k_bearing_ * B));
      return Eigen::MatrixXd(-v[0](2) * (self->k_bearing_ * B));
    };
    c.path_jacobian = [](const InputValues&, int) -> Eigen::MatrixXd {
      return Eigen::MatrixXd::Zero(3, 3);  // estimation-only
    };
    conns.push_back(std::move(c));
  }
  {
    // While grasped the handle is at the grasp frame.
    ActiveConnection c;
    c.id = "C_drawer_grasp";
    c.inputs = {"x_ee", "x_drawer", "p_grasped"};
    c.output_dim = 3;
    c.evaluate = [P](const InputValues& v) -> Eigen::VectorXd {
      return v[2](0) * P.k_drawer_grasp * (v[0] - v[1]);
    };
    c.jacobian = [P](const InputValues& v, int i) -> Eigen::MatrixXd {
      if (i == 0)
        return Eigen::MatrixXd(v[2](0) * P.k_drawer_grasp *
                               Eigen::Matrix3d::Identity());
      if (i == 1)
        return Eigen::MatrixXd(-v[2](0) * P.k_drawer_grasp *
                               Eigen::Matrix3d::Identity());
      return Eigen::MatrixXd(P.k_drawer_grasp * (v[0] - v[1]));
    };
    c.path_jacobian = [](const InputValues&, int i) -> Eigen::MatrixXd {
      return Eigen::MatrixXd::Zero(3, i == 2 ? 1 : 3);  // estimation-only
    };
    conns.push_back(std::move(c));
  }
  {
    ActiveConnection c;
    c.id = "C_vis";
    c.inputs = {"x_ee", "x_drawer"};
    c.output_dim = 1;
    auto dalpha_of = [P](const InputValues& v, double& alpha) {
      Eigen::Vector3d rel =
          v[1] - (Eigen::Vector3d(v[0]) + Eigen::Vector3d(P.camera_offset, 0, 0));
      Eigen::RowVector3d dalpha = Eigen::RowVector3d::Zero();
      double cperp = std::hypot(rel.y(), rel.z());
      double rho2 = rel.squaredNorm();
      if (rel.norm() > 1e-9 && cperp > 1e-9) {
        dalpha(0) = -cperp / rho2;
        dalpha(1) = rel.x() * rel.y() / (cperp * rho2);
        dalpha(2) = rel.x() * rel.z() / (cperp * rho2);
      }
      alpha = std::atan2(cperp, rel.x());
      return dalpha;
    };
    c.evaluate = [self, P](const InputValues& v) -> Eigen::VectorXd {
      if (self->frozen_) return vec1(self->frozen_pvis_);
      return vec1(update_visibility(v[0], v[1], P));
    };
    c.jacobian = [self, P, dalpha_of](const InputValues& v,
                                      int i) -> Eigen::MatrixXd {
      if (self->frozen_) return Eigen::MatrixXd::Zero(1, 3);
      double alpha;
      Eigen::RowVector3d dalpha = dalpha_of(v, alpha);
      double s = dlogistic((P.fov_half_angle - alpha) / P.vis_width);
      Eigen::RowVector3d d_rel = -(s / P.vis_width) * dalpha;
      return Eigen::MatrixXd(i == 0 ? Eigen::RowVector3d(-d_rel) : d_rel);
    };
    // Behavior chains keep the visibility deficit as the slope instead of
    // the true logistic derivative s(1-s): the achieved factor s is taken
    // at unit (as in C_grasp), so the regain-view pull survives the deep
    // tail where the believed handle sits behind the camera, and still
    // fades to nothing once the handle is in view.
    c.path_jacobian = [self, P, dalpha_of](const InputValues& v,
                                           int i) -> Eigen::MatrixXd {
      if (self->frozen_) return Eigen::MatrixXd::Zero(1, 3);
      double alpha;
      Eigen::RowVector3d dalpha = dalpha_of(v, alpha);
      double s = 1.0 - logistic((P.fov_half_angle - alpha) / P.vis_width);
      Eigen::RowVector3d d_rel = -(s / P.vis_width) * dalpha;
      return Eigen::MatrixXd(i == 0 ? Eigen::RowVector3d(-d_rel) : d_rel);
    };
    conns.push_back(std::move(c));
  }
  {
    // p_grasped = closeness * hand closure * force, per the three-factor
    // gate. Subgoal chains through x_ee treat the co-factors at unit (the
    // intended grasp), chains through x_hand keep the actual closeness.
    ActiveConnection c;
    c.id = "C_grasp";
    c.inputs = {"x_ee", "x_drawer", "x_hand", "z_ft"};
    c.output_dim = 1;
    auto parts = [P](const InputValues& v) {
      double d = std::max((Eigen::Vector3d(v[1]) - Eigen::Vector3d(v[0])).norm(), 1e-9);
      double f = v[3].head<3>().norm();
      return std::tuple<double, double, double, double, double>(
          d, f, p_dist(d, P.d0), logistic((P.hand_thresh - v[2](0)) / P.w_h),
          logistic((f - P.f0) / P.w_f));
    };
    c.evaluate = [self, parts](const InputValues& v) -> Eigen::VectorXd {
      if (self->frozen_) return vec1(self->frozen_pgrasp_);
      auto [d, f, pd, sh, sf] = parts(v);
      return vec1(pd * sh * sf);
    };
    c.jacobian = [self, parts, P](const InputValues& v,
                                  int i) -> Eigen::MatrixXd {
      if (self->frozen_)
        return Eigen::MatrixXd::Zero(1, i == 3 ? 6 : (i == 2 ? 1 : 3));
      auto [d, f, pd, sh, sf] = parts(v);
      if (i == 0 || i == 1) {
        Eigen::RowVector3d dd =
            (Eigen::Vector3d(v[0]) - Eigen::Vector3d(v[1])).transpose() / d;
        Eigen::RowVector3d row = sh * sf * dp_dist(d, P.d0) * dd;
        return Eigen::MatrixXd(i == 0 ? row : Eigen::RowVector3d(-row));
      }
      if (i == 2)
        return mat1(-pd * sf * dlogistic((P.hand_thresh - v[2](0)) / P.w_h) /
                    P.w_h);
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(6);
      if (f > 1e-9)
        row.head<3>() = pd * sh * dlogistic((f - P.f0) / P.w_f) / P.w_f *
                        (v[3].head<3>() / f).transpose();
      return Eigen::MatrixXd(row);
    };
    c.path_jacobian = [self, parts, P](const InputValues& v,
                                       int i) -> Eigen::MatrixXd {
      if (self->frozen_)
        return Eigen::MatrixXd::Zero(1, i == 3 ? 6 : (i == 2 ? 1 : 3));
      auto [d, f, pd, sh, sf] = parts(v);
      if (i == 0 || i == 1) {
        Eigen::RowVector3d dd =
            (Eigen::Vector3d(v[0]) - Eigen::Vector3d(v[1])).transpose() / d;
        Eigen::RowVector3d row = dp_dist(d, P.d0) * dd;
        return Eigen::MatrixXd(i == 0 ? row : Eigen::RowVector3d(-row));
      }
      if (i == 2)
        return mat1(-pd * dlogistic((P.hand_thresh - v[2](0)) / P.w_h) /
                    P.w_h);
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(6);
      if (f > 1e-9)
        row.head<3>() = pd * sh * dlogistic((f - P.f0) / P.w_f) / P.w_f *
                        (v[3].head<3>() / f).transpose();
      return Eigen::MatrixXd(row);
    };
    conns.push_back(std::move(c));
  }
  {
    // Certainty: current handle-covariance trace minus the information a
    // bearing from the (virtual) EE pose would yield. The x_ee gradient of
    // this connection is the look-around pull.
    ActiveConnection c;
    c.id = "C_sigma";
    c.inputs = {"x_ee", "x_drawer", "p_visible"};
    c.output_dim = 1;
    auto gain_at = [self, P](const Eigen::Vector3d& ee,
                             const Eigen::Vector3d& drawer) {
      PoseMeasurementModel model;
      model.h = [P](const Eigen::VectorXd& x, const Pose& pose) {
        Eigen::Vector3d rel = pose.rot.conjugate() * (Eigen::Vector3d(x.head<3>()) - pose.t);
        double xs = std::max(rel.x(), 0.05);
        return Eigen::VectorXd(Eigen::Vector2d(rel.y() / xs, rel.z() / xs));
      };
      model.H = [P](const Eigen::VectorXd& x, const Pose& pose) {
        Eigen::Vector3d rel = pose.rot.conjugate() * (Eigen::Vector3d(x.head<3>()) - pose.t);
        double xs = std::max(rel.x(), 0.05);
        Eigen::Matrix<double, 2, 3> B = Eigen::Matrix<double, 2, 3>::Zero();
        if (rel.x() > 0.05) {
          B(0, 0) = -rel.y() / (xs * xs);
          B(1, 0) = -rel.z() / (xs * xs);
        }
        B(0, 1) = 1.0 / xs;
        B(1, 2) = 1.0 / xs;
        return Eigen::MatrixXd(B * pose.rot.conjugate().toRotationMatrix());
      };
      model.R = P.r_bearing * Eigen::Matrix2d::Identity();
      Pose cam{Eigen::Quaterniond::Identity(),
               ee + Eigen::Vector3d(P.camera_offset, 0, 0)};
      GaussianEstimate est{drawer, self->drawer_cov_};
      return predicted_information_gain(est, model, cam);
    };
    c.evaluate = [self, gain_at](const InputValues& v) -> Eigen::VectorXd {
      if (self->frozen_) return vec1(self->frozen_sigma_);
      return vec1(self->drawer_cov_.trace() - v[2](0) * gain_at(v[0], v[1]));
    };
    c.jacobian = [self, gain_at](const InputValues& v,
                                 int i) -> Eigen::MatrixXd {
      if (self->frozen_) return Eigen::MatrixXd::Zero(1, i == 2 ? 1 : 3);
      if (i == 2) return mat1(-gain_at(v[0], v[1]));
      const double h = 1e-5;
      Eigen::RowVector3d grad;
      for (int k = 0; k < 3; ++k) {
        Eigen::Vector3d lo = v[i], hi = v[i];
        lo(k) -= h;
        hi(k) += h;
        double glo = i == 0 ? gain_at(lo, v[1]) : gain_at(v[0], lo);
        double ghi = i == 0 ? gain_at(hi, v[1]) : gain_at(v[0], hi);
        grad(k) = -v[2](0) * (ghi - glo) / (2 * h);
      }
      return Eigen::MatrixXd(grad);
    };
    conns.push_back(std::move(c));
  }
  {
    // Eq.-2-style kinematic exchange: while grasped, EE motion along the
    // estimated axis drives the opening estimate. Chains hopping through the
    // gating inputs assume unit along-axis action; the certainty channel
    // carries the deficit-scaled gate slope.
    ActiveConnection c;
    c.id = "C_open";
    c.inputs = {"x_joint", "p_grasped", "sigma_drawer", "a_ee"};
    c.output_dim = 6;
    c.evaluate = [P](const InputValues& v) -> Eigen::VectorXd {
      Eigen::Matrix<double, 6, 1> out = Eigen::Matrix<double, 6, 1>::Zero();
      Eigen::Vector3d u = spherical_dir(v[0](0), v[0](1));
      out(2) = v[1](0) * P.dt * u.dot(v[3]);
      return out;
    };
    c.jacobian = [P](const InputValues& v, int i) -> Eigen::MatrixXd {
      Eigen::Vector3d u = spherical_dir(v[0](0), v[0](1));
      if (i == 0) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(6, 6);
        Eigen::Matrix<double, 3, 2> du = spherical_dir_jacobian(v[0](0), v[0](1));
        J(2, 0) = v[1](0) * P.dt * du.col(0).dot(v[3]);
        J(2, 1) = v[1](0) * P.dt * du.col(1).dot(v[3]);
        return J;
      }
      if (i == 1) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(6, 1);
        J(2, 0) = P.dt * u.dot(v[3]);
        return J;
      }
      if (i == 2) return Eigen::MatrixXd::Zero(6, 1);
      Eigen::MatrixXd J = Eigen::MatrixXd::Zero(6, 3);
      J.row(2) = v[1](0) * P.dt * u.transpose();
      return J;
    };
    c.path_jacobian = [self, P](const InputValues& v, int i) -> Eigen::MatrixXd {
      if (i == 1) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(6, 1);
        J(2, 0) = P.dt * sigma_gate(v[2](0), P.tau_sigma);
        return J;
      }
      if (i == 2) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(6, 1);
        J(2, 0) = self->frozen_ ? 0.0
                                : P.dt * sigma_look_slope(v[2](0), P.tau_sigma);
        return J;
      }
      // x_joint and a_ee keep the true partials.
      Eigen::Vector3d u = spherical_dir(v[0](0), v[0](1));
      if (i == 0) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(6, 6);
        Eigen::Matrix<double, 3, 2> du = spherical_dir_jacobian(v[0](0), v[0](1));
        J(2, 0) = v[1](0) * P.dt * du.col(0).dot(v[3]);
        J(2, 1) = v[1](0) * P.dt * du.col(1).dot(v[3]);
        return J;
      }
      Eigen::MatrixXd J = Eigen::MatrixXd::Zero(6, 3);
      J.row(2) = v[1](0) * P.dt * u.transpose();
      return J;
    };
    c.drive_input = 3;
    c.drive_unit_jacobian = [P](const InputValues&) -> Eigen::MatrixXd {
      Eigen::MatrixXd J = Eigen::MatrixXd::Zero(6, 1);
      J(2, 0) = P.dt;
      return J;
    };
    conns.push_back(std::move(c));
  }
  {
    // Fit the joint state to the handle estimate; the fusion gain comes from
    // the joint EKF (adaptive R = sigma_drawer + extra).
    ActiveConnection c;
    c.id = "C_joint_meas";
    c.inputs = {"x_drawer", "x_joint", "p_grasped"};
    c.output_dim = 6;
    c.evaluate = [self](const InputValues& v) -> Eigen::VectorXd {
      return self->k_joint_ * (Eigen::Vector3d(v[0]) - joint_handle(v[1]));
    };
    c.jacobian = [self](const InputValues& v, int i) -> Eigen::MatrixXd {
      if (i == 0) return Eigen::MatrixXd(self->k_joint_);
      if (i == 1)
        return Eigen::MatrixXd(-self->k_joint_ * joint_handle_jacobian(v[1]));
      return Eigen::MatrixXd::Zero(6, 1);
    };
    c.path_jacobian = [](const InputValues&, int i) -> Eigen::MatrixXd {
      return Eigen::MatrixXd::Zero(6, i == 0 ? 3 : (i == 1 ? 6 : 1));
    };
    conns.push_back(std::move(c));
  }

  auto add_update = [](const Eigen::VectorXd& prev, const InputValues& cs) {
    Eigen::VectorXd v = prev;
    for (const auto& c : cs) v += c;
    return v;
  };
  auto replace_update = [](const Eigen::VectorXd&, const InputValues& cs) {
    return cs[0];
  };
  auto ident = [](const Eigen::VectorXd& s, const InputValues&) {
    return Eigen::MatrixXd(Eigen::MatrixXd::Identity(s.size(), s.size()));
  };
  auto zero_state = [](const Eigen::VectorXd& s, const InputValues&) {
    return Eigen::MatrixXd(Eigen::MatrixXd::Zero(s.size(), s.size()));
  };
  auto ident_contrib = [](const Eigen::VectorXd& s, const InputValues&, int) {
    return Eigen::MatrixXd(Eigen::MatrixXd::Identity(s.size(), s.size()));
  };

  std::vector<ComponentSpec> comps;
  comps.push_back({"x_ee", {"C_ee_act", "C_ee_meas"}, add_update, ident,
                   ident_contrib, nullptr});
  comps.push_back({"x_hand",
                   {"C_hand_act", "C_hand_meas"},
                   [](const Eigen::VectorXd& prev, const InputValues& cs) {
                     double v = prev(0);
                     for (const auto& c : cs) v += c(0);
                     return vec1(std::clamp(v, 0.0, 1.0));
                   },
                   ident, ident_contrib, nullptr});
  comps.push_back({"x_drawer", {"C_drawer_vis", "C_drawer_grasp"}, add_update,
                   ident, ident_contrib, nullptr});
  comps.push_back({"x_joint", {"C_open", "C_joint_meas"}, add_update, ident,
                   ident_contrib, nullptr});
  comps.push_back({"p_visible", {"C_vis"}, replace_update, zero_state,
                   ident_contrib, nullptr});
  comps.push_back({"p_grasped", {"C_grasp"}, replace_update, zero_state,
                   ident_contrib, nullptr});
  comps.push_back({"sigma_drawer",
                   {"C_sigma"},
                   replace_update,
                   zero_state,
                   ident_contrib,
                   [self](Graph& g) { self->post_tick(g, self->last_frame_); }});

  Goal goal;
  goal.id = "g_open";
  goal.target = "x_joint";
  goal.cost = [](const Eigen::VectorXd& v) {
    double d = v(2) - 0.20;
    return d * d;
  };
  goal.cost_gradient = [](const Eigen::VectorXd& v) {
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(6);
    r(2) = 2.0 * (v(2) - 0.20);
    return r;
  };

  engine_ = std::make_unique<Engine>(
      Graph::build(std::move(nodes), std::move(conns), std::move(comps)),
      std::move(goal), engine_cfg);

  frozen_pvis_ = update_visibility(P.ee_prior, P.drawer_prior, P);
  frozen_pgrasp_ = 0.0;
  frozen_sigma_ = drawer_cov_.trace();
}

void DrawerNetwork::post_tick(Graph& g, const SensorFrame& frame) {
  const NetworkParams& P = params_;

  // EE: direct position measurement.
  ee_cov_ += P.q_ee * Eigen::Matrix3d::Identity();
  {
    Eigen::Matrix3d S = ee_cov_ + P.r_ee * Eigen::Matrix3d::Identity();
    k_ee_ = ee_cov_ * S.inverse();
    Eigen::Matrix3d ikh = Eigen::Matrix3d::Identity() - k_ee_;
    ee_cov_ = symmetrize_psd(ikh * ee_cov_ * ikh.transpose() +
                             k_ee_ * P.r_ee * k_ee_.transpose());
  }
  hand_var_ = (1.0 - P.k_hand) * (1.0 - P.k_hand) * hand_var_ +
              P.k_hand * P.k_hand * P.r_hand + P.q_hand;

  const Eigen::Vector3d ee = g.node("x_ee").value;
  const Eigen::Vector3d drawer = g.node("x_drawer").value;
  const double pg = g.node("p_grasped").value(0);

  // Handle: grows without measurements, shrinks on bearings and while held.
  drawer_cov_ += P.q_drawer * Eigen::Matrix3d::Identity();
  // Contradiction drives uncertainty: a closed hand at the believed handle
  // with no contact force means the handle is not where we think it is.
  {
    double d = std::max((drawer - ee).norm(), 1e-9);
    double pd = p_dist(d, P.d0);
    double sh = logistic((P.hand_thresh - g.node("x_hand").value(0)) / P.w_h);
    double sf = logistic((frame.ft.head<3>().norm() - P.f0) / P.w_f);
    if (pd * sh > 0.5 && sf < 0.2)
      drawer_cov_ += P.q_drawer_conflict * Eigen::Matrix3d::Identity();
  }
  if (frame.bearing_valid) {
    Eigen::Matrix<double, 2, 3> H =
        bearing_jacobian(ee, drawer, P.camera_offset);
    Eigen::Matrix2d S = H * drawer_cov_ * H.transpose() +
                        P.r_bearing * Eigen::Matrix2d::Identity();
    k_bearing_ = drawer_cov_ * H.transpose() * S.inverse();
    Eigen::Matrix3d ikh = Eigen::Matrix3d::Identity() - k_bearing_ * H;
    drawer_cov_ = symmetrize_psd(
        ikh * drawer_cov_ * ikh.transpose() +
        k_bearing_ * P.r_bearing * Eigen::Matrix2d::Identity() *
            k_bearing_.transpose());
  } else {
    k_bearing_.setZero();
  }
  if (pg > 0.5) {
    Eigen::Matrix3d S =
        drawer_cov_ + P.r_drawer_grasp * Eigen::Matrix3d::Identity();
    Eigen::Matrix3d K = drawer_cov_ * S.inverse();
    Eigen::Matrix3d ikh = Eigen::Matrix3d::Identity() - K;
    drawer_cov_ = symmetrize_psd(ikh * drawer_cov_ * ikh.transpose() +
                                 K * P.r_drawer_grasp * K.transpose());
  }

  // Joint: the opening can move freely while ungrasped; angles only update
  // while held (the split analogous to the handle/joint coupling source).
  Eigen::Matrix<double, 6, 1> qdiag;
  double q_free = P.q_joint_q_free * (1.0 - pg) + P.q_joint_q_held * pg;
  qdiag << P.q_joint_angles, P.q_joint_angles, q_free, P.q_joint_p,
      P.q_joint_p, P.q_joint_p;
  joint_cov_ += Eigen::Matrix<double, 6, 6>(qdiag.asDiagonal());
  {
    Eigen::Matrix<double, 6, 1> xj = g.node("x_joint").value;
    Eigen::Matrix<double, 3, 6> H = joint_handle_jacobian(xj);
    if (pg <= 0.5) H.block<3, 2>(0, 0).setZero();
    Eigen::Matrix3d R =
        drawer_cov_ + P.r_joint_extra * Eigen::Matrix3d::Identity();
    Eigen::Matrix3d S = H * joint_cov_ * H.transpose() + R;
    k_joint_ = joint_cov_ * H.transpose() * S.inverse();
    Eigen::Matrix<double, 6, 6> ikh =
        Eigen::Matrix<double, 6, 6>::Identity() - k_joint_ * H;
    joint_cov_ = symmetrize_psd(ikh * joint_cov_ * ikh.transpose() +
                                k_joint_ * R * k_joint_.transpose());
  }

  g.node_mut("x_ee").covariance = ee_cov_;
  g.node_mut("x_hand").covariance = mat1(hand_var_);
  g.node_mut("x_drawer").covariance = drawer_cov_;
  g.node_mut("x_joint").covariance = joint_cov_;
  if (!frozen_) g.node_mut("sigma_drawer").value = vec1(drawer_cov_.trace());
}

std::map<std::string, Eigen::VectorXd> DrawerNetwork::sensor_map(
    const SensorFrame& frame) const {
  std::map<std::string, Eigen::VectorXd> m;
  m["z_ee"] = frame.ee_odom.t;
  m["z_ft"] = frame.ft;
  m["z_hand"] = vec1(frame.hand_reading);
  Eigen::Vector3d zb = Eigen::Vector3d::Zero();
  if (frame.bearing_valid) {
    zb.head<2>() = frame.bearing;
    zb(2) = 1.0;
  }
  m["z_bearing"] = zb;
  return m;
}

void DrawerNetwork::set_frozen(bool on) {
  frozen_ = on;
  if (on) {
    // Pin the gate nodes right away; the frozen connections keep returning
    // these constants afterwards.
    graph().node_mut("p_visible").value = vec1(frozen_pvis_);
    graph().node_mut("p_grasped").value = vec1(frozen_pgrasp_);
    graph().node_mut("sigma_drawer").value = vec1(frozen_sigma_);
  }
}

SensorFrame DrawerNetwork::filter_frame(const SensorFrame& frame) {
  ft_filt_ += params_.ft_alpha * (frame.ft - ft_filt_);
  SensorFrame f = frame;
  f.ft = ft_filt_;
  return f;
}

CycleResult DrawerNetwork::cycle(const SensorFrame& frame) {
  last_frame_ = filter_frame(frame);
  return engine_->cycle(sensor_map(last_frame_));
}

void DrawerNetwork::estimate(const SensorFrame& frame) {
  last_frame_ = filter_frame(frame);
  graph().tick(sensor_map(last_frame_));
}

BehaviorLabel DrawerNetwork::classify(const std::string& path_id) const {
  auto has = [&](const char* conn) {
    return path_id.find(std::string("|") + conn + ":") != std::string::npos;
  };
  if (path_id.find(":a_hand") != std::string::npos) return BehaviorLabel::grasp;
  if (has("C_vis")) return BehaviorLabel::regain_view;
  if (has("C_sigma")) return BehaviorLabel::look_around;
  if (has("C_grasp")) return BehaviorLabel::approach;
  return BehaviorLabel::open;
}

Eigen::Vector3d DrawerNetwork::x_ee() const { return graph().node("x_ee").value; }
Eigen::Vector3d DrawerNetwork::x_drawer() const {
  return graph().node("x_drawer").value;
}
Eigen::Matrix<double, 6, 1> DrawerNetwork::x_joint() const {
  return graph().node("x_joint").value;
}
double DrawerNetwork::x_hand() const { return graph().node("x_hand").value(0); }
double DrawerNetwork::p_visible() const {
  return graph().node("p_visible").value(0);
}
double DrawerNetwork::p_grasped() const {
  return graph().node("p_grasped").value(0);
}

}  // namespace aicon::drawer
