#include "aicon/harness/gradcheck.hpp"

#include "aicon/bw/graph_demo.hpp"
#include "aicon/drawer/network.hpp"

namespace aicon::harness {

namespace {

Eigen::VectorXd sample(const SampleSpec& spec, Rng& rng) {
  Eigen::VectorXd v = spec.center;
  for (int i = 0; i < v.size(); ++i) v(i) += spec.scale * rng.gaussian();
  return v;
}

double fd_step(double x) { return 1e-6 * std::max(1.0, std::abs(x)); }

// max over elements of |fd - analytic| normalized by floor + rtol*max(...)
double compare(const Eigen::MatrixXd& fd, const Eigen::MatrixXd& an,
               double rtol, double floor) {
  double worst = 0.0;
  for (int r = 0; r < fd.rows(); ++r)
    for (int c = 0; c < fd.cols(); ++c) {
      double tol = floor + rtol * std::max(std::abs(fd(r, c)),
                                           std::abs(an(r, c)));
      worst = std::max(worst, std::abs(fd(r, c) - an(r, c)) / tol);
    }
  return worst;
}

}  // namespace

std::map<std::string, SampleSpec> default_specs(const Graph& graph,
                                                double scale) {
  std::map<std::string, SampleSpec> specs;
  for (const auto& n : graph.nodes()) specs[n.id] = {n.value, scale};
  return specs;
}

std::vector<JacobianCheck> check_graph_jacobians(
    const Graph& graph, const std::map<std::string, SampleSpec>& specs,
    uint64_t seed, int points, double rtol, double floor) {
  std::vector<JacobianCheck> out;
  Rng rng(seed);

  auto spec_of = [&](const std::string& id) -> const SampleSpec& {
    auto it = specs.find(id);
    if (it == specs.end()) throw GraphError("no sample spec for node: " + id);
    return it->second;
  };

  for (const auto& conn : graph.connections()) {
    for (size_t i = 0; i < conn.inputs.size(); ++i) {
      JacobianCheck chk;
      chk.name = conn.id + "[" + conn.inputs[i] + "]";
      for (int p = 0; p < points; ++p) {
        InputValues v;
        for (const auto& in : conn.inputs) v.push_back(sample(spec_of(in), rng));
        Eigen::MatrixXd an = conn.jacobian(v, static_cast<int>(i));
        Eigen::MatrixXd fd(conn.output_dim, v[i].size());
        for (int k = 0; k < v[i].size(); ++k) {
          double h = fd_step(v[i](k));
          InputValues lo = v, hi = v;
          lo[i](k) -= h;
          hi[i](k) += h;
          fd.col(k) = (conn.evaluate(hi) - conn.evaluate(lo)) / (2 * h);
        }
        chk.max_err = std::max(chk.max_err, compare(fd, an, rtol, floor));
      }
      chk.pass = chk.max_err <= 1.0;
      out.push_back(chk);
    }
  }

  for (const auto& comp : graph.components()) {
    const SampleSpec& sspec = spec_of(comp.state);
    int dim = static_cast<int>(sspec.center.size());
    std::vector<int> cdims;
    for (const auto& cid : comp.connections)
      for (const auto& conn : graph.connections())
        if (conn.id == cid) cdims.push_back(conn.output_dim);

    JacobianCheck schk;
    schk.name = comp.state + "/state";
    std::vector<JacobianCheck> cchk;
    for (size_t ci = 0; ci < cdims.size(); ++ci)
      cchk.push_back({comp.state + "/" + comp.connections[ci], 0.0, true});

    for (int p = 0; p < points; ++p) {
      Eigen::VectorXd prev = sample(sspec, rng);
      InputValues contribs;
      for (int d : cdims) {
        SampleSpec small{Eigen::VectorXd::Zero(d), 0.02};
        contribs.push_back(sample(small, rng));
      }
      {
        Eigen::MatrixXd an = comp.state_jacobian(prev, contribs);
        Eigen::MatrixXd fd(dim, dim);
        for (int k = 0; k < dim; ++k) {
          double h = fd_step(prev(k));
          Eigen::VectorXd lo = prev, hi = prev;
          lo(k) -= h;
          hi(k) += h;
          fd.col(k) = (comp.update(hi, contribs) - comp.update(lo, contribs)) /
                      (2 * h);
        }
        schk.max_err = std::max(schk.max_err, compare(fd, an, rtol, floor));
      }
      for (size_t ci = 0; ci < cdims.size(); ++ci) {
        Eigen::MatrixXd an =
            comp.contribution_jacobian(prev, contribs, static_cast<int>(ci));
        Eigen::MatrixXd fd(dim, cdims[ci]);
        for (int k = 0; k < cdims[ci]; ++k) {
          double h = fd_step(contribs[ci](k));
          InputValues lo = contribs, hi = contribs;
          lo[ci](k) -= h;
          hi[ci](k) += h;
          fd.col(k) = (comp.update(prev, hi) - comp.update(prev, lo)) / (2 * h);
        }
        cchk[ci].max_err = std::max(cchk[ci].max_err, compare(fd, an, rtol, floor));
      }
    }
    schk.pass = schk.max_err <= 1.0;
    out.push_back(schk);
    for (auto& c : cchk) {
      c.pass = c.max_err <= 1.0;
      out.push_back(c);
    }
  }
  return out;
}

GradcheckReport run_gradcheck(uint64_t seed, int points) {
  GradcheckReport rep;

  {
    // A small stacked instance exercises every connection form of the BW
    // graph (stack, unstack, clear).
    bw::BwState s = bw::BwState::all_on_table({"A", "B", "C", "D"});
    s.on(s.index("B"), s.index("A")) = 1.0;
    s.on(s.index("C"), s.index("B")) = 1.0;
    bw::BwGraph bwg(s, bw::ClearNorm::paper);
    auto specs = default_specs(bwg.graph(), 0.3);
    for (auto& [id, sp] : specs) sp.center = Eigen::VectorXd::Constant(1, 0.5);
    auto checks =
        check_graph_jacobians(bwg.graph(), specs, Rng::mix(seed, 1), points);
    for (auto& c : checks) {
      c.name = "bw:" + c.name;
      rep.checks.push_back(c);
    }
  }

  {
    drawer::NetworkParams params;
    EngineConfig ec;
    ec.gains["a_ee"] = Eigen::Vector3d::Constant(1.0);
    ec.gains["a_hand"] = Eigen::VectorXd::Constant(1, 1.0);
    drawer::DrawerNetwork net(params, ec);
    auto specs = default_specs(net.graph(), 0.05);
    auto v3 = [](double a, double b, double c) {
      return Eigen::Vector3d(a, b, c);
    };
    auto v1 = [](double a) { return Eigen::VectorXd::Constant(1, a); };
    specs["x_ee"] = {v3(0.30, 0.02, 0.01), 0.05};
    specs["z_ee"] = {v3(0.30, 0.02, 0.01), 0.05};
    // Handle samples keep the bearing away from the frustum axis and the
    // near-plane clamp, where the projection is deliberately non-smooth.
    specs["x_drawer"] = {v3(0.80, 0.06, 0.05), 0.015};
    specs["z_bearing"] = {v3(0.05, 0.02, 0.8), 0.1};
    Eigen::VectorXd ft(6);
    ft << 1.2, 0.3, 0.2, 0.0, 0.0, 0.0;
    specs["z_ft"] = {ft, 0.1};
    specs["x_hand"] = {v1(0.4), 0.1};
    specs["z_hand"] = {v1(0.5), 0.1};
    Eigen::VectorXd xj(6);
    xj << 2.8, 1.3, 0.1, 0.8, 0.0, 0.0;
    specs["x_joint"] = {xj, 0.05};
    specs["p_visible"] = {v1(0.5), 0.2};
    specs["p_grasped"] = {v1(0.5), 0.2};
    specs["sigma_drawer"] = {v1(5e-4), 2e-4};
    specs["a_ee"] = {v3(0.05, 0.01, 0.0), 0.05};
    specs["a_hand"] = {v1(0.2), 0.2};
    auto checks =
        check_graph_jacobians(net.graph(), specs, Rng::mix(seed, 2), points);
    for (auto& c : checks) {
      c.name = "drawer:" + c.name;
      rep.checks.push_back(c);
    }
  }

  for (const auto& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
  return rep;
}

}  // namespace aicon::harness
