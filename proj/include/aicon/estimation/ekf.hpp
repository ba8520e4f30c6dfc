#pragma once

#include <Eigen/Dense>
#include <functional>

#include "aicon/util/pose.hpp"

namespace aicon {

struct GaussianEstimate {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

struct MeasurementModel {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> h;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> H;
  Eigen::MatrixXd R;
};

struct EkfUpdateResult {
  GaussianEstimate estimate;
  Eigen::VectorXd innovation;
  bool skipped = false;  // singular innovation covariance
};

GaussianEstimate ekf_predict(
    const GaussianEstimate& est,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::MatrixXd& F, const Eigen::MatrixXd& Q);

// Joseph-form update. If the innovation covariance is numerically singular
// (condition number > 1e12) the update is skipped and flagged.
EkfUpdateResult ekf_update(const GaussianEstimate& est,
                           const MeasurementModel& model,
                           const Eigen::VectorXd& z);

// Measurement model whose h depends on the sensor pose, for viewpoint
// selection.
struct PoseMeasurementModel {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Pose&)> h;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Pose&)> H;
  Eigen::MatrixXd R;
};

// trace(cov) - trace(cov after a hypothetical measurement from sensor_pose).
double predicted_information_gain(const GaussianEstimate& est,
                                  const PoseMeasurementModel& model,
                                  const Pose& sensor_pose);

// Central-difference gradient of the predicted gain w.r.t. the 6 local pose
// parameters [t; rotvec around current orientation].
Eigen::Matrix<double, 6, 1> information_gain_pose_gradient(
    const GaussianEstimate& est, const PoseMeasurementModel& model,
    const Pose& sensor_pose, double step = 1e-5);

// Force symmetry and clamp tiny negative eigenvalues introduced by rounding.
Eigen::MatrixXd symmetrize_psd(const Eigen::MatrixXd& m, double jitter = 1e-10);

}  // namespace aicon
