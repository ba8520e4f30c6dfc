#include "aicon/core/graph.hpp"

#include <algorithm>
#include <set>

namespace aicon {

std::string GradientPath::id() const {
  std::string s = goal_id;
  for (const auto& h : hops) {
    s += "|";
    s += h.connection;
    s += ":";
    s += h.to;
  }
  return s;
}

Graph Graph::build(std::vector<QuantityNode> nodes,
                   std::vector<ActiveConnection> connections,
                   std::vector<ComponentSpec> components) {
  Graph g;
  g.nodes_ = std::move(nodes);
  g.connections_ = std::move(connections);
  g.components_ = std::move(components);

  for (size_t i = 0; i < g.nodes_.size(); ++i) {
    const auto& n = g.nodes_[i];
    if (n.id.empty()) throw GraphError("node with empty id");
    if (g.node_index_.count(n.id))
      throw GraphError("duplicate node id: " + n.id);
    if (n.value.size() == 0) throw GraphError("zero-dimension node: " + n.id);
    if (n.covariance) {
      if (n.covariance->rows() != n.value.size() ||
          n.covariance->cols() != n.value.size())
        throw GraphError("covariance dimension mismatch on node: " + n.id);
    }
    g.node_index_[n.id] = static_cast<int>(i);
  }

  for (size_t i = 0; i < g.connections_.size(); ++i) {
    auto& c = g.connections_[i];
    if (g.connection_index_.count(c.id))
      throw GraphError("duplicate connection id: " + c.id);
    if (g.node_index_.count(c.id))
      throw GraphError("duplicate id (node/connection): " + c.id);
    for (const auto& in : c.inputs)
      if (!g.node_index_.count(in))
        throw GraphError("connection " + c.id + " references unknown node id: " +
                         in);
    if (!c.path_jacobian) c.path_jacobian = c.jacobian;
    // Probe once at registration values to pin dimensions.
    InputValues vals = g.gather_inputs(c);
    Eigen::VectorXd out = c.evaluate(vals);
    if (out.size() != c.output_dim)
      throw GraphError("connection " + c.id + " output dimension mismatch");
    for (size_t k = 0; k < c.inputs.size(); ++k) {
      Eigen::MatrixXd J = c.jacobian(vals, static_cast<int>(k));
      if (J.rows() != c.output_dim ||
          J.cols() != g.node(c.inputs[k]).value.size())
        throw GraphError("connection " + c.id + " jacobian(" +
                         std::to_string(k) + ") dimension mismatch");
    }
    g.connection_index_[c.id] = static_cast<int>(i);
  }

  for (size_t i = 0; i < g.components_.size(); ++i) {
    const auto& comp = g.components_[i];
    if (!g.node_index_.count(comp.state))
      throw GraphError("component references unknown state node id: " +
                       comp.state);
    if (g.component_of_state_.count(comp.state))
      throw GraphError("duplicate component for state: " + comp.state);
    if (g.node(comp.state).kind != NodeKind::estimate)
      throw GraphError("component state must be an estimate node: " +
                       comp.state);
    for (const auto& cid : comp.connections)
      if (!g.connection_index_.count(cid))
        throw GraphError("component " + comp.state +
                         " references unknown connection id: " + cid);
    g.component_of_state_[comp.state] = static_cast<int>(i);
  }

  // Within a tick every connection reads the snapshot, so connections come
  // first, then components; cross-tick cycles are fine by construction.
  for (const auto& c : g.connections_) g.order_.push_back(c.id);
  for (const auto& comp : g.components_) g.order_.push_back(comp.state);
  return g;
}

const QuantityNode& Graph::node(const std::string& id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) throw GraphError("unknown node id: " + id);
  return nodes_[it->second];
}

QuantityNode& Graph::node_mut(const std::string& id) {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) throw GraphError("unknown node id: " + id);
  return nodes_[it->second];
}

bool Graph::has_node(const std::string& id) const {
  return node_index_.count(id) > 0;
}

InputValues Graph::gather_inputs(const ActiveConnection& c) const {
  InputValues vals;
  vals.reserve(c.inputs.size());
  for (const auto& in : c.inputs) vals.push_back(node(in).value);
  return vals;
}

std::map<std::string, Eigen::VectorXd> Graph::tick(
    const std::map<std::string, Eigen::VectorXd>& sensor_values) {
  // Exact sensor coverage.
  for (const auto& n : nodes_) {
    if (n.kind == NodeKind::sensor && !sensor_values.count(n.id))
      throw GraphError("missing sensor value for: " + n.id);
  }
  for (const auto& [id, v] : sensor_values) {
    auto it = node_index_.find(id);
    if (it == node_index_.end() ||
        nodes_[it->second].kind != NodeKind::sensor)
      throw GraphError("extra sensor value for non-sensor id: " + id);
    if (v.size() != nodes_[it->second].value.size())
      throw GraphError("sensor value dimension mismatch: " + id);
    nodes_[it->second].value = v;
  }

  // Snapshot semantics: all connections see the same pre-update values.
  std::vector<InputValues> conn_inputs(connections_.size());
  std::vector<Eigen::VectorXd> contributions(connections_.size());
  for (size_t i = 0; i < connections_.size(); ++i) {
    conn_inputs[i] = gather_inputs(connections_[i]);
    contributions[i] = connections_[i].evaluate(conn_inputs[i]);
  }

  std::map<std::string, Eigen::VectorXd> new_values;
  for (const auto& comp : components_) {
    InputValues contribs;
    contribs.reserve(comp.connections.size());
    for (const auto& cid : comp.connections)
      contribs.push_back(contributions[connection_index_.at(cid)]);
    new_values[comp.state] = comp.update(node(comp.state).value, contribs);
  }
  for (auto& [id, v] : new_values) node_mut(id).value = v;
  for (const auto& comp : components_)
    if (comp.post_tick) comp.post_tick(*this);
  return new_values;
}

std::vector<GradientPath> Graph::enumerate_gradient_paths(
    const Goal& goal, int max_depth) const {
  if (max_depth < 1) throw GraphError("max_depth must be >= 1");
  const QuantityNode& target = node(goal.target);
  (void)target;

  std::vector<GradientPath> out;
  std::vector<PathHop> hops;
  std::set<std::string> visited;

  // From an estimate node, every connection of its component offers hops into
  // each of that connection's inputs, including gating inputs (the subgoal
  // chains). Actuator nodes terminate a path.
  std::function<void(const std::string&)> dfs = [&](const std::string& at) {
    const QuantityNode& n = node(at);
    if (n.kind == NodeKind::actuator) {
      if (!hops.empty()) {
        GradientPath p;
        p.goal_id = goal.id;
        p.hops = hops;
        p.actuator_id = at;
        out.push_back(p);
      }
      return;
    }
    if (n.kind == NodeKind::sensor) return;
    if (static_cast<int>(hops.size()) >= max_depth) return;
    auto comp_it = component_of_state_.find(at);
    if (comp_it == component_of_state_.end()) return;
    const ComponentSpec& comp = components_[comp_it->second];
    for (const auto& cid : comp.connections) {
      const ActiveConnection& c = connections_[connection_index_.at(cid)];
      for (size_t k = 0; k < c.inputs.size(); ++k) {
        const std::string& next = c.inputs[k];
        if (visited.count(next)) continue;  // paths stay simple
        visited.insert(next);
        hops.push_back({at, cid, static_cast<int>(k), next});
        dfs(next);
        hops.pop_back();
        visited.erase(next);
      }
    }
  };

  visited.insert(goal.target);
  dfs(goal.target);
  std::sort(out.begin(), out.end(),
            [](const GradientPath& a, const GradientPath& b) {
              return a.id() < b.id();
            });
  return out;
}

std::vector<EvaluatedPath> Graph::evaluate_paths(
    const Goal& goal, const std::vector<GradientPath>& paths) const {
  // Shared per-tick caches.
  std::vector<InputValues> conn_inputs(connections_.size());
  std::vector<Eigen::VectorXd> contributions(connections_.size());
  std::vector<bool> have(connections_.size(), false);
  auto inputs_of = [&](int ci) -> const InputValues& {
    if (!have[ci]) {
      conn_inputs[ci] = gather_inputs(connections_[ci]);
      contributions[ci] = connections_[ci].evaluate(conn_inputs[ci]);
      have[ci] = true;
    }
    return conn_inputs[ci];
  };

  std::vector<EvaluatedPath> out;
  out.reserve(paths.size());
  for (const auto& p : paths) {
    EvaluatedPath ep;
    ep.path = &p;
    Eigen::RowVectorXd row = goal.cost_gradient(node(goal.target).value);
    bool pruned = false;
    for (const auto& hop : p.hops) {
      const ComponentSpec& comp =
          components_[component_of_state_.at(hop.from)];
      int ci = connection_index_.at(hop.connection);
      const ActiveConnection& c = connections_[ci];
      const InputValues& vals = inputs_of(ci);

      InputValues contribs;
      contribs.reserve(comp.connections.size());
      int which = -1;
      for (size_t k = 0; k < comp.connections.size(); ++k) {
        int cj = connection_index_.at(comp.connections[k]);
        inputs_of(cj);
        contribs.push_back(contributions[cj]);
        if (comp.connections[k] == hop.connection) which = static_cast<int>(k);
      }
      Eigen::MatrixXd dstate_dcontrib =
          comp.contribution_jacobian(node(hop.from).value, contribs, which);

      // Subgoal chains that presuppose driving this connection's action
      // channel are only meaningful if the goal would actually push that
      // action positive here.
      if (c.drive_input >= 0 && hop.input_index != c.drive_input &&
          c.drive_unit_jacobian) {
        Eigen::RowVectorXd align =
            row * dstate_dcontrib * c.drive_unit_jacobian(vals);
        if (align.minCoeff() >= 0.0) {
          pruned = true;
          break;
        }
      }

      row = row * dstate_dcontrib * c.path_jacobian(vals, hop.input_index);
    }
    if (pruned) {
      ep.gradient = Eigen::RowVectorXd::Zero(node(p.actuator_id).value.size());
      ep.magnitude = 0.0;
    } else {
      ep.gradient = row;
      ep.magnitude = row.norm();
    }
    out.push_back(std::move(ep));
  }
  return out;
}

const EvaluatedPath& select_steepest(
    const std::vector<EvaluatedPath>& evaluated, TieBreak policy,
    const std::function<size_t(size_t)>& rng_draw) {
  if (evaluated.empty()) throw GraphError("select_steepest on empty list");
  double best = -1.0;
  for (const auto& e : evaluated) best = std::max(best, e.magnitude);
  std::vector<size_t> argmax;
  for (size_t i = 0; i < evaluated.size(); ++i)
    if (evaluated[i].magnitude == best) argmax.push_back(i);
  if (argmax.size() == 1) return evaluated[argmax[0]];
  if (policy == TieBreak::lexicographic) {
    size_t pick = argmax[0];
    for (size_t i : argmax)
      if (evaluated[i].path->id() < evaluated[pick].path->id()) pick = i;
    return evaluated[pick];
  }
  size_t idx = rng_draw ? rng_draw(argmax.size()) : 0;
  return evaluated[argmax[idx % argmax.size()]];
}

std::map<std::string, Eigen::VectorXd> descend(
    Graph& graph, const EvaluatedPath& selected,
    const std::map<std::string, Eigen::VectorXd>& gains, double decay) {
  std::map<std::string, Eigen::VectorXd> out;
  for (const auto& n : graph.nodes()) {
    if (n.kind != NodeKind::actuator) continue;
    auto git = gains.find(n.id);
    if (git == gains.end())
      throw GraphError("missing gain for actuator: " + n.id);
    if (git->second.minCoeff() <= 0.0)
      throw GraphError("non-positive gain for actuator: " + n.id);
    Eigen::VectorXd v = decay * n.value;
    if (selected.path && selected.path->actuator_id == n.id)
      v -= git->second.cwiseProduct(selected.gradient.transpose());
    graph.node_mut(n.id).value = v;
    out[n.id] = v;
  }
  return out;
}

}  // namespace aicon
