#pragma once

#include <stdexcept>
#include <string>

#include "trustplan/planning/planner.hpp"
#include "trustplan/reconcile/explanation.hpp"

namespace trustplan::reconcile {

using planning::Plan;
using planning::PlannerOptions;

class UnsolvableModel : public std::runtime_error {
 public:
  UnsolvableModel(const std::string& which, const std::string& label)
      : std::runtime_error("the " + which + " model" + (label.empty() ? "" : " of '" + label + "'") +
                           " has no valid plan"),
        which_(which) {}
  /// "robot" or "human".
  const std::string& which() const { return which_; }

 private:
  std::string which_;
};

/// The robot's task model together with the human's model of it. Fluent
/// declarations are merged on construction so both sides share one vocabulary.
class ModelPair {
 public:
  /// Throws UnsolvableModel when the human model has no plan.
  ModelPair(PlanningModel robot, PlanningModel human, MessageCostTable message_costs = {},
            const PlannerOptions& planner = {}, std::string label = {});

  const PlanningModel& robot() const { return robot_; }
  const PlanningModel& human() const { return human_; }
  /// Optimal plan in the human model.
  const Plan& expected_plan() const { return expected_plan_; }
  const Rational& expected_cost() const { return expected_cost_; }
  const ModelDelta& delta() const { return delta_; }
  const std::string& label() const { return label_; }

 private:
  PlanningModel robot_;
  PlanningModel human_;
  Plan expected_plan_;
  Rational expected_cost_;
  ModelDelta delta_;
  std::string label_;
};

/// The atomic edits that turn the human model into the robot model.
const ModelDelta& model_delta(const ModelPair& pair);

}  // namespace trustplan::reconcile
