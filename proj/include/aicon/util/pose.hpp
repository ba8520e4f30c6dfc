#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace aicon {

// Rigid transform, world <- local.
struct Pose {
  Eigen::Quaterniond rot = Eigen::Quaterniond::Identity();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rot * p + t; }

  Pose compose(const Pose& o) const {
    return Pose{rot * o.rot, rot * o.t + t};
  }

  Pose inverse() const {
    Eigen::Quaterniond qi = rot.conjugate();
    return Pose{qi, -(qi * t)};
  }

  // 7-number serialization: qw qx qy qz tx ty tz.
  Eigen::Matrix<double, 7, 1> as_vec7() const {
    Eigen::Matrix<double, 7, 1> v;
    v << rot.w(), rot.x(), rot.y(), rot.z(), t.x(), t.y(), t.z();
    return v;
  }
};

// Local 6-vector pose coordinates used by the EE estimate: [t; rotvec].
inline Eigen::Matrix<double, 6, 1> pose_to_local(const Pose& p) {
  Eigen::AngleAxisd aa(p.rot);
  Eigen::Matrix<double, 6, 1> v;
  v.head<3>() = p.t;
  v.tail<3>() = aa.angle() * aa.axis();
  return v;
}

inline Pose pose_from_local(const Eigen::Matrix<double, 6, 1>& v) {
  Pose p;
  p.t = v.head<3>();
  double ang = v.tail<3>().norm();
  if (ang < 1e-12) {
    p.rot = Eigen::Quaterniond::Identity();
  } else {
    p.rot = Eigen::Quaterniond(Eigen::AngleAxisd(ang, v.tail<3>() / ang));
  }
  return p;
}

// Unit vector from spherical angles: u = (sin(theta)cos(phi),
// sin(theta)sin(phi), cos(theta)).
inline Eigen::Vector3d spherical_dir(double phi, double theta) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
          std::cos(theta)};
}

inline Eigen::Matrix<double, 3, 2> spherical_dir_jacobian(double phi,
                                                          double theta) {
  Eigen::Matrix<double, 3, 2> J;  // columns: d/dphi, d/dtheta
  J << -std::sin(theta) * std::sin(phi), std::cos(theta) * std::cos(phi),
      std::sin(theta) * std::cos(phi), std::cos(theta) * std::sin(phi),
      0.0, -std::sin(theta);
  return J;
}

}  // namespace aicon
