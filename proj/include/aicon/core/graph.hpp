#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace aicon {

enum class NodeKind { estimate, sensor, actuator };

// A named estimated/sensed/actuated vector; the graph's vertices. Value
// dimension is fixed at registration.
struct QuantityNode {
  std::string id;
  NodeKind kind = NodeKind::estimate;
  Eigen::VectorXd value;
  std::optional<Eigen::MatrixXd> covariance;
};

using InputValues = std::vector<Eigen::VectorXd>;

// A differentiable multi-input relation; the graph's edges. `jacobian` must
// hold the true partials of `evaluate` (checked against finite differences).
// `path_jacobian` is what chain-rule path evaluation uses instead, when the
// subgoal convention differs from the literal partial: hops through a gating
// input evaluate the channel at its unit positive direction, so the chain
// measures the sensitivity of the intended exchange rather than the current
// (possibly stationary) one. Defaults to `jacobian`.
struct ActiveConnection {
  std::string id;
  std::vector<std::string> inputs;
  int output_dim = 0;
  std::function<Eigen::VectorXd(const InputValues&)> evaluate;
  std::function<Eigen::MatrixXd(const InputValues&, int)> jacobian;
  std::function<Eigen::MatrixXd(const InputValues&, int)> path_jacobian;

  // Index of this connection's action channel, if it has one. Subgoal paths
  // that hop through another input implicitly assume the action channel is
  // driven in its unit positive direction; such paths are pruned unless
  // descending the goal would actually push that action positive.
  // drive_unit_jacobian returns output_dim x 1: the contribution per unit of
  // scalar channel activation (the channel direction, not raw actuator axes).
  int drive_input = -1;
  std::function<Eigen::MatrixXd(const InputValues&)> drive_unit_jacobian;
};

// A recursive estimator: one state node updated each tick from its previous
// value and the contributions of its connections.
struct ComponentSpec {
  std::string state;
  std::vector<std::string> connections;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const InputValues&)>
      update;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const InputValues&)>
      state_jacobian;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const InputValues&,
                                int)>
      contribution_jacobian;
  // Optional covariance bookkeeping run after all value updates.
  std::function<void(class Graph&)> post_tick;
};

struct Goal {
  std::string id;
  std::string target;
  std::function<double(const Eigen::VectorXd&)> cost;
  std::function<Eigen::RowVectorXd(const Eigen::VectorXd&)> cost_gradient;
};

struct PathHop {
  std::string from;        // component state node the chain arrived at
  std::string connection;  // connection feeding that component
  int input_index = 0;     // which connection input the chain continues into
  std::string to;
};

// One chain-rule route from a goal to an actuator; element of G(g, a).
struct GradientPath {
  std::string goal_id;
  std::vector<PathHop> hops;
  std::string actuator_id;
  std::string id() const;
};

struct EvaluatedPath {
  const GradientPath* path = nullptr;
  Eigen::RowVectorXd gradient;  // 1 x actuator dim
  double magnitude = 0.0;
};

struct GraphError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Graph {
 public:
  // Validates ids and dimensions; topology is immutable afterwards.
  static Graph build(std::vector<QuantityNode> nodes,
                     std::vector<ActiveConnection> connections,
                     std::vector<ComponentSpec> components);

  const QuantityNode& node(const std::string& id) const;
  QuantityNode& node_mut(const std::string& id);
  bool has_node(const std::string& id) const;
  const std::vector<QuantityNode>& nodes() const { return nodes_; }
  const std::vector<ActiveConnection>& connections() const {
    return connections_;
  }
  const std::vector<ComponentSpec>& components() const { return components_; }
  const std::vector<std::string>& evaluation_order() const { return order_; }

  // One estimation step: connections see the previous-tick estimates and the
  // fresh sensor readings; every component updates exactly once.
  std::map<std::string, Eigen::VectorXd> tick(
      const std::map<std::string, Eigen::VectorXd>& sensor_values);

  std::vector<GradientPath> enumerate_gradient_paths(const Goal& goal,
                                                     int max_depth) const;
  std::vector<EvaluatedPath> evaluate_paths(
      const Goal& goal, const std::vector<GradientPath>& paths) const;

  InputValues gather_inputs(const ActiveConnection& c) const;

 private:
  std::vector<QuantityNode> nodes_;
  std::vector<ActiveConnection> connections_;
  std::vector<ComponentSpec> components_;
  std::map<std::string, int> node_index_;
  std::map<std::string, int> connection_index_;
  std::map<std::string, int> component_of_state_;
  std::vector<std::string> order_;  // connections, then components
};

enum class TieBreak { seeded_random, lexicographic };

// Entry of maximal magnitude; ties resolved by policy. `rng_draw` supplies
// the random index for seeded_random ties.
const EvaluatedPath& select_steepest(
    const std::vector<EvaluatedPath>& evaluated, TieBreak policy,
    const std::function<size_t(size_t)>& rng_draw = {});

// Leaky integration: every actuator decays toward zero by `decay`, and the
// selected one additionally takes the step -k .* grad. The leak damps the
// integrated command, so a persistent selection settles at a velocity
// proportional to its gradient instead of winding up.
std::map<std::string, Eigen::VectorXd> descend(
    Graph& graph, const EvaluatedPath& selected,
    const std::map<std::string, Eigen::VectorXd>& gains, double decay);

}  // namespace aicon
