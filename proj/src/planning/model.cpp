#include "trustplan/planning/model.hpp"

#include <algorithm>

namespace trustplan::planning {

const ActionSchema* PlanningModel::find_action(const std::string& name) const {
  auto it = std::lower_bound(actions.begin(), actions.end(), name,
                             [](const ActionSchema& a, const std::string& n) { return a.name < n; });
  if (it == actions.end() || it->name != name) return nullptr;
  return &*it;
}

namespace {

void require_declared(const PlanningModel& model, const FluentSet& used, const std::string& where) {
  for (const auto& f : used) {
    if (!model.fluents.contains(f)) {
      throw ModelError("undeclared fluent '" + f + "' in " + where, f);
    }
  }
}

}  // namespace

void check_model(const PlanningModel& model) {
  require_declared(model, model.init, "init");
  require_declared(model, model.goal, "goal");
  for (std::size_t i = 0; i < model.actions.size(); ++i) {
    const auto& a = model.actions[i];
    if (i > 0 && !(model.actions[i - 1].name < a.name)) {
      if (model.actions[i - 1].name == a.name) {
        throw ModelError("duplicate action '" + a.name + "'", a.name);
      }
      throw std::logic_error("actions not sorted; call normalize_model");
    }
    if (a.cost < 0) throw ModelError("negative cost on action '" + a.name + "'", a.name);
    const std::string where = "action '" + a.name + "'";
    require_declared(model, a.pre, where);
    require_declared(model, a.add, where);
    require_declared(model, a.del, where);
    for (const auto& f : a.add) {
      if (a.del.contains(f)) {
        throw ModelError("fluent '" + f + "' is both added and deleted by '" + a.name + "'", a.name);
      }
    }
  }
}

PlanningModel normalize_model(PlanningModel model) {
  std::stable_sort(model.actions.begin(), model.actions.end(),
                   [](const ActionSchema& l, const ActionSchema& r) { return l.name < r.name; });
  check_model(model);
  return model;
}

std::string to_string(const Plan& plan) {
  std::string out;
  for (const auto& s : plan.steps) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

std::optional<FluentSet> apply_action(const FluentSet& state, const ActionSchema& action) {
  if (!std::includes(state.begin(), state.end(), action.pre.begin(), action.pre.end())) {
    return std::nullopt;
  }
  FluentSet next = state;
  for (const auto& f : action.add) next.insert(f);
  for (const auto& f : action.del) next.erase(f);
  return next;
}

ValidationReport validate_plan(const PlanningModel& model, const Plan& plan) {
  ValidationReport report;
  FluentSet state = model.init;
  report.traversed_states.push_back(state);
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const ActionSchema* action = model.find_action(plan.steps[i]);
    if (action == nullptr) {
      report.fail_step = i;
      report.unknown_action = true;
      return report;
    }
    auto next = apply_action(state, *action);
    if (!next) {
      report.fail_step = i;
      return report;
    }
    state = std::move(*next);
    report.traversed_states.push_back(state);
  }
  report.goal_reached = std::includes(state.begin(), state.end(), model.goal.begin(), model.goal.end());
  report.valid = report.goal_reached;
  return report;
}

Cost plan_cost(const PlanningModel& model, const Plan& plan) {
  if (!validate_plan(model, plan).valid) return Cost::infinite();
  Rational total{0};
  for (const auto& s : plan.steps) total += model.find_action(s)->cost;
  return Cost(total);
}

Cost prefix_cost(const PlanningModel& model, const Plan& plan, std::size_t count) {
  count = std::min(count, plan.size());
  FluentSet state = model.init;
  Rational total{0};
  for (std::size_t i = 0; i < count; ++i) {
    const ActionSchema* action = model.find_action(plan.steps[i]);
    if (action == nullptr) return Cost::infinite();
    auto next = apply_action(state, *action);
    if (!next) return Cost::infinite();
    state = std::move(*next);
    total += action->cost;
  }
  return Cost(total);
}

}  // namespace trustplan::planning
