#include "aicon/estimation/ekf.hpp"

#include <stdexcept>

namespace aicon {

Eigen::MatrixXd symmetrize_psd(const Eigen::MatrixXd& m, double jitter) {
  Eigen::MatrixXd s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  Eigen::VectorXd ev = es.eigenvalues();
  bool clamp = false;
  for (int i = 0; i < ev.size(); ++i)
    if (ev[i] < 0.0) {
      ev[i] = jitter;
      clamp = true;
    }
  if (!clamp) return s;
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

GaussianEstimate ekf_predict(
    const GaussianEstimate& est,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::MatrixXd& F, const Eigen::MatrixXd& Q) {
  const auto n = est.mean.size();
  if (F.rows() != n || F.cols() != n || Q.rows() != n || Q.cols() != n ||
      est.covariance.rows() != n)
    throw std::invalid_argument("ekf_predict: dimension mismatch");
  GaussianEstimate out;
  out.mean = f(est.mean);
  if (out.mean.size() != n)
    throw std::invalid_argument("ekf_predict: transition changed dimension");
  out.covariance = F * est.covariance * F.transpose() + Q;
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  return out;
}

EkfUpdateResult ekf_update(const GaussianEstimate& est,
                           const MeasurementModel& model,
                           const Eigen::VectorXd& z) {
  EkfUpdateResult res;
  Eigen::VectorXd hx = model.h(est.mean);
  if (hx.size() != z.size())
    throw std::invalid_argument("ekf_update: measurement dimension mismatch");
  Eigen::MatrixXd H = model.H(est.mean);
  Eigen::MatrixXd S = H * est.covariance * H.transpose() + model.R;
  S = 0.5 * (S + S.transpose());

  res.innovation = z - hx;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeThinU |
                                               Eigen::ComputeThinV);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (smin <= 0.0 || smax / smin > 1e12) {
    res.estimate = est;
    res.skipped = true;
    return res;
  }

  Eigen::MatrixXd K = est.covariance * H.transpose() * S.inverse();
  const auto n = est.mean.size();
  Eigen::MatrixXd IKH = Eigen::MatrixXd::Identity(n, n) - K * H;
  res.estimate.mean = est.mean + K * res.innovation;
  res.estimate.covariance =
      IKH * est.covariance * IKH.transpose() + K * model.R * K.transpose();
  res.estimate.covariance = 0.5 * (res.estimate.covariance +
                                   res.estimate.covariance.transpose());
  return res;
}

double predicted_information_gain(const GaussianEstimate& est,
                                  const PoseMeasurementModel& model,
                                  const Pose& sensor_pose) {
  MeasurementModel m;
  m.h = [&](const Eigen::VectorXd& x) { return model.h(x, sensor_pose); };
  m.H = [&](const Eigen::VectorXd& x) { return model.H(x, sensor_pose); };
  m.R = model.R;
  // Covariance-only update: the hypothetical measurement value is irrelevant.
  Eigen::VectorXd z = m.h(est.mean);
  auto res = ekf_update(est, m, z);
  if (res.skipped) return 0.0;
  double gain = est.covariance.trace() - res.estimate.covariance.trace();
  return gain > 0.0 ? gain : 0.0;
}

Eigen::Matrix<double, 6, 1> information_gain_pose_gradient(
    const GaussianEstimate& est, const PoseMeasurementModel& model,
    const Pose& sensor_pose, double step) {
  Eigen::Matrix<double, 6, 1> grad;
  for (int i = 0; i < 6; ++i) {
    auto perturb = [&](double eps) {
      Pose p = sensor_pose;
      if (i < 3) {
        p.t[i] += eps;
      } else {
        Eigen::Vector3d axis = Eigen::Vector3d::Zero();
        axis[i - 3] = 1.0;
        p.rot = Eigen::Quaterniond(Eigen::AngleAxisd(eps, axis)) * p.rot;
      }
      return predicted_information_gain(est, model, p);
    };
    grad[i] = (perturb(step) - perturb(-step)) / (2.0 * step);
  }
  return grad;
}

}  // namespace aicon
