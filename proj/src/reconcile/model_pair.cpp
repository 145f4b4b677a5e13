#include "trustplan/reconcile/model_pair.hpp"

namespace trustplan::reconcile {

ModelPair::ModelPair(PlanningModel robot, PlanningModel human, MessageCostTable message_costs,
                     const PlannerOptions& planner, std::string label)
    : robot_(std::move(robot)), human_(std::move(human)), label_(std::move(label)) {
  robot_.fluents.insert(human_.fluents.begin(), human_.fluents.end());
  human_.fluents = robot_.fluents;
  robot_ = planning::normalize_model(std::move(robot_));
  human_ = planning::normalize_model(std::move(human_));

  auto expected = planning::optimal_plan(human_, planner);
  if (!expected) throw UnsolvableModel("human", label_);
  expected_plan_ = std::move(expected->plan);
  expected_cost_ = expected->cost;

  delta_.messages = diff_models(human_, robot_);
  for (auto& [key, cost] : message_costs) {
    if (cost <= 0) throw std::invalid_argument("message cost for '" + key + "' must be positive");
  }
  delta_.costs = std::move(message_costs);
}

const ModelDelta& model_delta(const ModelPair& pair) { return pair.delta(); }

}  // namespace trustplan::reconcile
