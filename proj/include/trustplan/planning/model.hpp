#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "trustplan/planning/cost.hpp"

namespace trustplan::planning {

using FluentSet = std::set<std::string>;

struct ActionSchema {
  std::string name;
  Rational cost{1};
  FluentSet pre;
  FluentSet add;
  FluentSet del;

  bool operator==(const ActionSchema&) const = default;
};

/// A grounded STRIPS task: fluents, actions (kept sorted by name), init and goal.
struct PlanningModel {
  FluentSet fluents;
  std::vector<ActionSchema> actions;
  FluentSet init;
  FluentSet goal;

  const ActionSchema* find_action(const std::string& name) const;

  bool operator==(const PlanningModel&) const = default;
};

/// Raised when a model violates a structural invariant. `subject` names the
/// offending fluent or action.
class ModelError : public std::runtime_error {
 public:
  ModelError(const std::string& what, std::string subject)
      : std::runtime_error(what), subject_(std::move(subject)) {}
  const std::string& subject() const { return subject_; }

 private:
  std::string subject_;
};

/// Sorts actions by name and checks every invariant. Throws ModelError.
PlanningModel normalize_model(PlanningModel model);
void check_model(const PlanningModel& model);

struct Plan {
  std::vector<std::string> steps;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  bool operator==(const Plan&) const = default;
  auto operator<=>(const Plan&) const = default;
};

std::string to_string(const Plan& plan);

/// Successor state, or nullopt when the precondition does not hold.
std::optional<FluentSet> apply_action(const FluentSet& state, const ActionSchema& action);

struct ValidationReport {
  bool valid = false;
  std::optional<std::size_t> fail_step;
  bool goal_reached = false;
  /// Set when the failing step names an action absent from the model.
  bool unknown_action = false;
  std::vector<FluentSet> traversed_states;
};

ValidationReport validate_plan(const PlanningModel& model, const Plan& plan);

/// Sum of action costs if the plan is executable and reaches the goal; +inf otherwise.
Cost plan_cost(const PlanningModel& model, const Plan& plan);

/// Cost of executing steps [0, count) from init, ignoring the goal. Inapplicable
/// or unknown steps make the result infinite.
Cost prefix_cost(const PlanningModel& model, const Plan& plan, std::size_t count);

}  // namespace trustplan::planning
