#include "aicon/core/engine.hpp"

namespace aicon {

EngineConfig EngineConfig::from_config(const Config& cfg,
                                       const std::string& section) {
  EngineConfig ec;
  auto key = [&](const char* k) { return section + "." + k; };
  ec.epsilon = cfg.get_double(key("epsilon"), ec.epsilon);
  ec.cost_threshold = cfg.get_double(key("cost_threshold"), ec.cost_threshold);
  ec.max_depth = cfg.get_int(key("max_depth"), ec.max_depth);
  ec.decay = cfg.get_double(key("decay"), ec.decay);
  ec.seed = static_cast<uint64_t>(cfg.get_int(key("seed"), 0));
  ec.scale_by_gain = cfg.get_bool(key("scale_by_gain"), false);
  std::string tb = cfg.get_string(key("tie_break"), "seeded_random");
  if (tb == "lexicographic")
    ec.tie_break = TieBreak::lexicographic;
  else if (tb == "seeded_random")
    ec.tie_break = TieBreak::seeded_random;
  else
    throw ConfigError("unknown tie_break policy: " + tb);
  return ec;
}

Engine::Engine(Graph graph, Goal goal, EngineConfig config)
    : graph_(std::move(graph)),
      goal_(std::move(goal)),
      config_(std::move(config)),
      rng_(config_.seed) {
  for (const auto& [id, g] : config_.gains)
    if (g.minCoeff() <= 0.0)
      throw ConfigError("non-positive gain for actuator: " + id);
  paths_ = graph_.enumerate_gradient_paths(goal_, config_.max_depth);
}

void Engine::clamp_actuators() {
  for (const auto& [id, limit] : config_.limits) {
    Eigen::VectorXd& v = graph_.node_mut(id).value;
    double n = v.norm();
    if (n > limit) v *= limit / n;
  }
}

CycleResult Engine::evaluate_and_choose(bool apply_descent) {
  CycleResult r;
  r.goal_cost = goal_.cost(graph_.node(goal_.target).value);

  auto evaluated = graph_.evaluate_paths(goal_, paths_);
  double best = 0.0;
  for (auto& e : evaluated) {
    double mag = e.magnitude;
    if (config_.scale_by_gain) {
      auto it = config_.gains.find(e.path->actuator_id);
      if (it != config_.gains.end())
        mag = it->second.cwiseProduct(e.gradient.transpose()).norm();
      e.magnitude = mag;
    }
    r.magnitudes.emplace_back(e.path->id(), e.magnitude);
    best = std::max(best, e.magnitude);
  }

  if (evaluated.empty() || best < config_.epsilon) {
    r.status = r.goal_cost < config_.cost_threshold
                   ? EngineStatus::success
                   : EngineStatus::goal_stationary;
    if (apply_descent) {
      EvaluatedPath none;
      descend(graph_, none, config_.gains, config_.decay);
      clamp_actuators();
    }
    return r;
  }

  if (sum_mode_ && apply_descent) {
    // Sum all path gradients per actuator, then apply every actuator's sum.
    std::map<std::string, Eigen::RowVectorXd> sums;
    for (const auto& e : evaluated) {
      auto [it, fresh] = sums.try_emplace(
          e.path->actuator_id,
          Eigen::RowVectorXd::Zero(e.gradient.size()));
      it->second += e.gradient;
    }
    for (const auto& n : graph_.nodes()) {
      if (n.kind != NodeKind::actuator) continue;
      auto git = config_.gains.find(n.id);
      if (git == config_.gains.end())
        throw GraphError("missing gain for actuator: " + n.id);
      Eigen::VectorXd v = config_.decay * n.value;
      auto sit = sums.find(n.id);
      if (sit != sums.end())
        v -= git->second.cwiseProduct(sit->second.transpose());
      graph_.node_mut(n.id).value = v;
    }
    clamp_actuators();
    // Report the steepest for the trace even though all were applied.
    const auto& sel = select_steepest(
        evaluated, config_.tie_break,
        [this](size_t n) { return static_cast<size_t>(rng_.bounded(n)); });
    r.selected_path = sel.path->id();
    r.selected_gradient = sel.gradient;
    r.selected_actuator = sel.path->actuator_id;
    r.status = EngineStatus::active;
    return r;
  }

  const auto& sel = select_steepest(
      evaluated, config_.tie_break,
      [this](size_t n) { return static_cast<size_t>(rng_.bounded(n)); });
  r.selected_path = sel.path->id();
  r.selected_gradient = sel.gradient;
  r.selected_actuator = sel.path->actuator_id;
  r.status = EngineStatus::active;
  if (apply_descent) {
    descend(graph_, sel, config_.gains, config_.decay);
    clamp_actuators();
  }
  return r;
}

CycleResult Engine::cycle(
    const std::map<std::string, Eigen::VectorXd>& sensors) {
  graph_.tick(sensors);
  return evaluate_and_choose(true);
}

CycleResult Engine::select_only() { return evaluate_and_choose(false); }

}  // namespace aicon
