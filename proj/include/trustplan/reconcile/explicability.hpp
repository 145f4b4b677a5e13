#pragma once

#include <atomic>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "trustplan/reconcile/model_pair.hpp"

namespace trustplan::reconcile {

using planning::Cost;
using planning::Score;

enum class ExplicabilityMetric {
  /// Cost gap to the optimum of the (explanation-updated) human model.
  HumanModelDiff,
  /// Cost gap to the optimum of the robot model; plans the updated human model
  /// cannot execute still score -inf.
  RobotModelDiff,
};

std::string to_string(ExplicabilityMetric metric);
ExplicabilityMetric parse_metric(const std::string& text);

/// Memoizes human models updated by explanations and their optimal costs.
/// Not thread-safe; use one per thread.
class ExplanationContext {
 public:
  explicit ExplanationContext(const ModelPair& pair, PlannerOptions planner = {},
                              const std::atomic<bool>* cancel = nullptr);

  const ModelPair& pair() const { return pair_; }
  const PlannerOptions& planner() const { return planner_; }

  /// Human model after `messages`, with its optimal cost (+inf if unsolvable).
  const PlanningModel& updated_model(std::span<const Message> messages);
  const Cost& updated_optimum(std::span<const Message> messages);
  const Cost& robot_optimum();

  Score explicability(const Plan& plan, std::span<const Message> messages, ExplicabilityMetric metric);

  /// True when `plan` is valid and cost-optimal in the updated human model.
  bool optimal_after(const Plan& plan, std::span<const Message> messages);

  /// Throws SearchCancelled if the cancel flag is set.
  void check_cancelled() const;

 private:
  struct Entry {
    PlanningModel model;
    std::optional<Cost> optimum;
  };
  Entry& entry(std::span<const Message> messages);

  const ModelPair& pair_;
  PlannerOptions planner_;
  const std::atomic<bool>* cancel_;
  std::map<std::string, Entry> cache_;
  std::optional<Cost> robot_optimum_;
};

class SearchCancelled : public std::runtime_error {
 public:
  SearchCancelled() : std::runtime_error("search cancelled") {}
};

/// EX in (-inf, 0]: 0 means the plan is exactly what the human expects.
Score explicability(const Plan& plan, const ModelPair& pair, std::span<const Message> messages,
                    ExplicabilityMetric metric = ExplicabilityMetric::HumanModelDiff,
                    const PlannerOptions& planner = {});

}  // namespace trustplan::reconcile
