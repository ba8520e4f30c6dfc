#include "aicon/harness/field.hpp"

#include <ostream>

#include "aicon/util/csv.hpp"

namespace aicon::harness {

namespace {
constexpr double kWorkspace = 1.5;  // coordinate bound, meters

int axis_index(char c) {
  switch (c) {
    case 'x': return 0;
    case 'y': return 1;
    case 'z': return 2;
  }
  throw ConfigError(std::string("bad axis: ") + c);
}
}  // namespace

std::unique_ptr<drawer::DrawerNetwork> snapshot_at_tick(
    const drawer::Scenario& scenario, drawer::EpisodeMode mode, uint64_t seed,
    int tick) {
  using drawer::EpisodeMode;
  if (mode == EpisodeMode::baseline_state_space ||
      mode == EpisodeMode::baseline_belief_space)
    throw ConfigError("sample-field snapshots need a network mode");

  drawer::DrawerSim sim(scenario, Rng::mix(seed, 1));
  auto net = std::make_unique<drawer::DrawerNetwork>(
      drawer::network_params_from(scenario),
      drawer::engine_config_from(scenario, Rng::mix(seed, 2)));
  if (mode == EpisodeMode::frozen_interconnections) net->set_frozen(true);
  if (mode == EpisodeMode::sum_gradients) net->set_sum_mode(true);

  drawer::SensorFrame frame = sim.render();
  for (int t = 0; t < tick; ++t) {
    net->cycle(frame);
    drawer::Commands cmd;
    cmd.ee_twist.head<3>() = Eigen::Vector3d(net->graph().node("a_ee").value);
    cmd.hand_rate = net->graph().node("a_hand").value(0);
    frame = sim.step(cmd);
  }
  net->estimate(frame);  // leave estimates aligned with the final frame
  return net;
}

int sample_field(drawer::DrawerNetwork& net, const FieldOptions& opts,
                 std::ostream& out) {
  if (opts.axes.size() != 2 || opts.axes[0] == opts.axes[1])
    throw ConfigError("axes must name two distinct coordinates");
  int ia = axis_index(opts.axes[0]);
  int ib = axis_index(opts.axes[1]);
  if (opts.n_a < 1 || opts.n_b < 1) throw ConfigError("empty field grid");

  Graph& g = net.graph();
  const Eigen::Vector3d ee0 = g.node("x_ee").value;
  const double pvis0 = g.node("p_visible").value(0);
  const double pg0 = g.node("p_grasped").value(0);
  const Eigen::Vector3d drawer_est = g.node("x_drawer").value;
  const double hand_est = g.node("x_hand").value(0);
  const Eigen::Matrix<double, 6, 1> ft = g.node("z_ft").value;

  out << "px,py,pz,behavior_label,grad_ee_x,grad_ee_y,grad_ee_z,grad_hand\n";

  int clipped = 0;
  for (int j = 0; j < opts.n_b; ++j) {
    double b = opts.n_b == 1 ? opts.min_b
                             : opts.min_b + (opts.max_b - opts.min_b) * j /
                                                (opts.n_b - 1);
    for (int i = 0; i < opts.n_a; ++i) {
      double a = opts.n_a == 1 ? opts.min_a
                               : opts.min_a + (opts.max_a - opts.min_a) * i /
                                                  (opts.n_a - 1);
      Eigen::Vector3d pt = ee0;
      pt(ia) = a;
      pt(ib) = b;
      for (int k = 0; k < 3; ++k) {
        double c = std::clamp(pt(k), -kWorkspace, kWorkspace);
        if (c != pt(k)) {
          pt(k) = c;
          ++clipped;
        }
      }

      g.node_mut("x_ee").value = pt;
      g.node_mut("p_visible").value = Eigen::VectorXd::Constant(
          1, drawer::update_visibility(pt, drawer_est, net.params()));
      g.node_mut("p_grasped").value = Eigen::VectorXd::Constant(
          1, drawer::update_grasped(pt, drawer_est, hand_est, ft, net.params()));

      CycleResult res = net.engine().select_only();
      std::string label = "none";
      Eigen::Vector3d grad_ee = Eigen::Vector3d::Zero();
      double grad_hand = 0.0;
      if (!res.selected_path.empty()) {
        label = behavior_name(net.classify(res.selected_path));
        if (res.selected_actuator == "a_ee")
          grad_ee = res.selected_gradient.transpose();
        else
          grad_hand = res.selected_gradient(0);
      }
      out << fmt_num(pt(0)) << ',' << fmt_num(pt(1)) << ',' << fmt_num(pt(2))
          << ',' << label << ',' << fmt_num(grad_ee(0)) << ','
          << fmt_num(grad_ee(1)) << ',' << fmt_num(grad_ee(2)) << ','
          << fmt_num(grad_hand) << '\n';
    }
  }

  g.node_mut("x_ee").value = ee0;
  g.node_mut("p_visible").value = Eigen::VectorXd::Constant(1, pvis0);
  g.node_mut("p_grasped").value = Eigen::VectorXd::Constant(1, pg0);
  return clipped;
}

}  // namespace aicon::harness
