#pragma once

#include "aicon/core/graph.hpp"
#include "aicon/util/rng.hpp"

namespace aicon::harness {

// Where to sample a node's value when probing Jacobians: keeps the random
// points inside each connection's smooth region (away from guards and
// clamps).
struct SampleSpec {
  Eigen::VectorXd center;
  double scale = 0.1;
};

struct JacobianCheck {
  std::string name;  // "connection[input]" or "component/..." label
  double max_err = 0.0;
  bool pass = true;
};

// Central finite differences against every registered connection jacobian
// and component state/contribution jacobian. Pass criterion per element:
// |fd - analytic| <= floor + rtol * max(|fd|, |analytic|).
std::vector<JacobianCheck> check_graph_jacobians(
    const Graph& graph, const std::map<std::string, SampleSpec>& specs,
    uint64_t seed, int points = 100, double rtol = 1e-5, double floor = 1e-8);

std::map<std::string, SampleSpec> default_specs(const Graph& graph,
                                                double scale);

struct GradcheckReport {
  std::vector<JacobianCheck> checks;
  bool all_pass = true;
};

// Builds both domain graphs (a Blocks World instance and the drawer network)
// and checks everything registered in them.
GradcheckReport run_gradcheck(uint64_t seed, int points = 100);

}  // namespace aicon::harness
