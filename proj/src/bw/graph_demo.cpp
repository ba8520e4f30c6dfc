#include "aicon/bw/graph_demo.hpp"

#include <map>

namespace aicon::bw {

namespace {

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

}  // namespace

std::string BwGraph::o_id(int x, int y) const {
  return "o_" + blocks_[x] + "_" + blocks_[y];
}
std::string BwGraph::c_id(int x) const { return "c_" + blocks_[x]; }
std::string BwGraph::stack_id(int x, int y) const {
  return "as_" + blocks_[x] + "_" + blocks_[y];
}
std::string BwGraph::unstack_id(int x) const { return "au_" + blocks_[x]; }

BwGraph::BwGraph(const BwState& initial, ClearNorm norm)
    : blocks_(initial.blocks), norm_(norm) {
  const int n = static_cast<int>(blocks_.size());
  const double scale = norm == ClearNorm::paper ? 1.0 / n : 1.0;

  std::vector<QuantityNode> nodes;
  std::vector<ActiveConnection> conns;
  std::vector<ComponentSpec> comps;

  for (int x = 0; x < n; ++x) {
    nodes.push_back({c_id(x), NodeKind::estimate, vec1(1.0), {}});
    nodes.push_back({unstack_id(x), NodeKind::actuator, vec1(0.0), {}});
    for (int y = 0; y < n; ++y) {
      if (x == y) continue;
      nodes.push_back({o_id(x, y), NodeKind::estimate, vec1(0.0), {}});
      nodes.push_back({stack_id(x, y), NodeKind::actuator, vec1(0.0), {}});
    }
  }

  auto identity_update = [](const Eigen::VectorXd& prev,
                            const InputValues& contribs) {
    Eigen::VectorXd v = prev;
    for (const auto& c : contribs) v += c;
    return v;
  };
  auto identity_state_jac = [](const Eigen::VectorXd&, const InputValues&) {
    return mat1(1.0);
  };
  auto identity_contrib_jac = [](const Eigen::VectorXd&, const InputValues&,
                                 int) { return mat1(1.0); };

  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (x == y) continue;
      // Eq. 6 stack term: c(X) c(Y) a_stack(X,Y). Chains hopping through a
      // clear input measure the intended exchange: the action at unit, and
      // the moved block's own clear not gated by the destination's.
      ActiveConnection cs;
      cs.id = "Cs_" + blocks_[x] + "_" + blocks_[y];
      cs.inputs = {c_id(x), c_id(y), stack_id(x, y)};
      cs.output_dim = 1;
      cs.evaluate = [](const InputValues& v) {
        return vec1(v[0](0) * v[1](0) * v[2](0));
      };
      cs.jacobian = [](const InputValues& v, int i) {
        if (i == 0) return mat1(v[1](0) * v[2](0));
        if (i == 1) return mat1(v[0](0) * v[2](0));
        return mat1(v[0](0) * v[1](0));
      };
      cs.path_jacobian = [](const InputValues& v, int i) {
        if (i == 0) return mat1(1.0);
        // Directional sensitivity: the destination's clear only matters once
        // the moved block itself is crisply clear.
        if (i == 1) return mat1(v[0](0) >= 1.0 - 1e-12 ? 1.0 : 0.0);
        return mat1(v[0](0) * v[1](0));
      };
      cs.drive_input = 2;
      cs.drive_unit_jacobian = [](const InputValues&) { return mat1(1.0); };
      conns.push_back(std::move(cs));

      // Eq. 6 unstack term: -o(X,Y) c(X) a_unstack(X).
      ActiveConnection cu;
      cu.id = "Cu_" + blocks_[x] + "_" + blocks_[y];
      cu.inputs = {o_id(x, y), c_id(x), unstack_id(x)};
      cu.output_dim = 1;
      cu.evaluate = [](const InputValues& v) {
        return vec1(-v[0](0) * v[1](0) * v[2](0));
      };
      cu.jacobian = [](const InputValues& v, int i) {
        if (i == 0) return mat1(-v[1](0) * v[2](0));
        if (i == 1) return mat1(-v[0](0) * v[2](0));
        return mat1(-v[0](0) * v[1](0));
      };
      cu.path_jacobian = [](const InputValues& v, int i) {
        if (i == 0) return mat1(-v[1](0));
        if (i == 1) return mat1(-v[0](0));
        return mat1(-v[0](0) * v[1](0));
      };
      cu.drive_input = 2;
      cu.drive_unit_jacobian = [](const InputValues&) { return mat1(-1.0); };
      conns.push_back(std::move(cu));

      ComponentSpec comp;
      comp.state = o_id(x, y);
      comp.connections = {"Cs_" + blocks_[x] + "_" + blocks_[y],
                          "Cu_" + blocks_[x] + "_" + blocks_[y]};
      comp.update = identity_update;
      comp.state_jacobian = identity_state_jac;
      comp.contribution_jacobian = identity_contrib_jac;
      comps.push_back(std::move(comp));
    }
  }

  for (int x = 0; x < n; ++x) {
    // Eq. 5: c(X) = 1 - scale * sum_Z o(Z,X).
    ActiveConnection cc;
    cc.id = "Cc_" + blocks_[x];
    for (int z = 0; z < n; ++z)
      if (z != x) cc.inputs.push_back(o_id(z, x));
    cc.output_dim = 1;
    cc.evaluate = [scale](const InputValues& v) {
      double sum = 0.0;
      for (const auto& o : v) sum += o(0);
      return vec1(1.0 - scale * sum);
    };
    cc.jacobian = [scale](const InputValues&, int) { return mat1(-scale); };
    conns.push_back(std::move(cc));

    ComponentSpec comp;
    comp.state = c_id(x);
    comp.connections = {"Cc_" + blocks_[x]};
    comp.update = [](const Eigen::VectorXd&, const InputValues& contribs) {
      return contribs[0];
    };
    comp.state_jacobian = [](const Eigen::VectorXd&, const InputValues&) {
      return mat1(0.0);
    };
    comp.contribution_jacobian = identity_contrib_jac;
    comps.push_back(std::move(comp));
  }

  graph_ = std::make_unique<Graph>(
      Graph::build(std::move(nodes), std::move(conns), std::move(comps)));
  set_state(initial);
}

void BwGraph::set_state(const BwState& s) {
  const int n = static_cast<int>(blocks_.size());
  for (int x = 0; x < n; ++x) {
    graph_->node_mut(c_id(x)).value = vec1(clear_of(s, x, norm_));
    graph_->node_mut(unstack_id(x)).value = vec1(0.0);
    for (int y = 0; y < n; ++y) {
      if (x == y) continue;
      graph_->node_mut(o_id(x, y)).value = vec1(s.on(x, y));
      graph_->node_mut(stack_id(x, y)).value = vec1(0.0);
    }
  }
}

void BwGraph::execute(const Action& a) {
  const std::string act =
      a.kind == Action::stack ? stack_id(a.x, a.y) : unstack_id(a.x);
  graph_->node_mut(act).value = vec1(1.0);
  graph_->tick({});
  graph_->node_mut(act).value = vec1(0.0);
  graph_->tick({});  // settle the clears onto the new on-values
}

BwState BwGraph::read_state() const {
  BwState s = BwState::all_on_table(blocks_);
  for (int x = 0; x < s.count(); ++x)
    for (int y = 0; y < s.count(); ++y)
      if (x != y) s.on(x, y) = graph_->node(o_id(x, y)).value(0);
  return s;
}

std::vector<Candidate> BwGraph::gradients(int x, int y, int max_depth) const {
  Goal g;
  g.id = "g_" + o_id(x, y);
  g.target = o_id(x, y);
  g.cost = [](const Eigen::VectorXd& v) {
    double d = 1.0 - v(0);
    return 0.5 * d * d;
  };
  g.cost_gradient = [](const Eigen::VectorXd& v) {
    Eigen::RowVectorXd r(1);
    r(0) = v(0) - 1.0;
    return r;
  };

  auto paths = graph_->enumerate_gradient_paths(g, max_depth);
  auto evaluated = graph_->evaluate_paths(g, paths);

  auto block_index = [this](const std::string& id) {
    for (size_t i = 0; i < blocks_.size(); ++i)
      if (blocks_[i] == id) return static_cast<int>(i);
    throw BwError("unknown block id: " + id);
  };

  BwState crisp = read_state();
  std::map<Action, Candidate> merged;
  for (const auto& ep : evaluated) {
    if (ep.magnitude <= 1e-12) continue;
    if (ep.gradient(0) >= 0.0) continue;  // descent would not fire the action
    const std::string& act = ep.path->actuator_id;
    Action a;
    if (act.rfind("as_", 0) == 0) {
      a.kind = Action::stack;
      auto sep = act.find('_', 3);
      a.x = block_index(act.substr(3, sep - 3));
      a.y = block_index(act.substr(sep + 1));
    } else {
      a.kind = Action::unstack;
      a.x = block_index(act.substr(3));
      a.y = -1;
    }
    // Crisp feasibility gate, as in bw_gradients: chains may route through a
    // graded clear, but the emitted action itself must be executable.
    if (a.kind == Action::stack) {
      if (!crisp.is_clear(a.x) || !crisp.is_clear(a.y)) continue;
    } else {
      if (!crisp.is_clear(a.x) || crisp.on_table(a.x)) continue;
    }
    int depth = (static_cast<int>(ep.path->hops.size()) - 1) / 2;
    auto [it, fresh] = merged.try_emplace(a, Candidate{a, ep.magnitude, depth});
    if (!fresh && ep.magnitude > it->second.magnitude) {
      it->second.magnitude = ep.magnitude;
      it->second.depth = depth;
    }
  }
  std::vector<Candidate> out;
  for (auto& [a, c] : merged) out.push_back(c);
  return out;
}

std::vector<Candidate> BwGraph::gradients(const BwGoal& goal,
                                          int max_depth) const {
  std::map<Action, Candidate> merged;
  for (const auto& [x, y] : goal.pairs) {
    if (y < 0) throw BwError("graph route covers on-pairs only");
    for (const auto& c : gradients(x, y, max_depth)) {
      auto [it, fresh] = merged.try_emplace(c.action, c);
      if (!fresh && c.magnitude > it->second.magnitude) it->second = c;
    }
  }
  std::vector<Candidate> out;
  for (auto& [a, c] : merged) out.push_back(c);
  return out;
}

}  // namespace aicon::bw
