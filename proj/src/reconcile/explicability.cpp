#include "trustplan/reconcile/explicability.hpp"

#include <algorithm>
#include <vector>

namespace trustplan::reconcile {

std::string to_string(ExplicabilityMetric metric) {
  return metric == ExplicabilityMetric::HumanModelDiff ? "human-model-diff" : "robot-model-diff";
}

ExplicabilityMetric parse_metric(const std::string& text) {
  if (text == "human-model-diff") return ExplicabilityMetric::HumanModelDiff;
  if (text == "robot-model-diff") return ExplicabilityMetric::RobotModelDiff;
  throw std::invalid_argument("unknown explicability metric '" + text + "'");
}

ExplanationContext::ExplanationContext(const ModelPair& pair, PlannerOptions planner,
                                       const std::atomic<bool>* cancel)
    : pair_(pair), planner_(planner), cancel_(cancel) {}

void ExplanationContext::check_cancelled() const {
  if (cancel_ != nullptr && cancel_->load(std::memory_order_relaxed)) throw SearchCancelled();
}

ExplanationContext::Entry& ExplanationContext::entry(std::span<const Message> messages) {
  std::vector<std::string> keys;
  keys.reserve(messages.size());
  for (const auto& m : messages) keys.push_back(m.key());
  std::sort(keys.begin(), keys.end());
  std::string cache_key;
  for (const auto& k : keys) {
    cache_key += k;
    cache_key += '\n';
  }
  auto it = cache_.find(cache_key);
  if (it == cache_.end()) {
    it = cache_.emplace(cache_key, Entry{apply_explanation(pair_.human(), messages), std::nullopt}).first;
  }
  return it->second;
}

const PlanningModel& ExplanationContext::updated_model(std::span<const Message> messages) {
  return entry(messages).model;
}

const Cost& ExplanationContext::updated_optimum(std::span<const Message> messages) {
  Entry& e = entry(messages);
  if (!e.optimum) {
    check_cancelled();
    e.optimum = planning::optimal_cost(e.model, planner_);
  }
  return *e.optimum;
}

const Cost& ExplanationContext::robot_optimum() {
  if (!robot_optimum_) robot_optimum_ = planning::optimal_cost(pair_.robot(), planner_);
  return *robot_optimum_;
}

Score ExplanationContext::explicability(const Plan& plan, std::span<const Message> messages,
                                        ExplicabilityMetric metric) {
  const PlanningModel& updated = updated_model(messages);
  Cost in_human = planning::plan_cost(updated, plan);
  if (!in_human.is_finite()) return Score::negative_infinity();
  if (metric == ExplicabilityMetric::HumanModelDiff) {
    return Score::negated_gap(in_human, updated_optimum(messages));
  }
  Cost in_robot = planning::plan_cost(pair_.robot(), plan);
  if (!in_robot.is_finite()) return Score::negative_infinity();
  return Score::negated_gap(in_robot, robot_optimum());
}

bool ExplanationContext::optimal_after(const Plan& plan, std::span<const Message> messages) {
  Cost c = planning::plan_cost(updated_model(messages), plan);
  return c.is_finite() && c == updated_optimum(messages);
}

Score explicability(const Plan& plan, const ModelPair& pair, std::span<const Message> messages,
                    ExplicabilityMetric metric, const PlannerOptions& planner) {
  ExplanationContext ctx(pair, planner);
  return ctx.explicability(plan, messages, metric);
}

}  // namespace trustplan::reconcile
