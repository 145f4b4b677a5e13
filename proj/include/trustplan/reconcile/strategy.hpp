#pragma once

#include <array>
#include <optional>
#include <string>

#include "trustplan/reconcile/mce.hpp"

namespace trustplan::reconcile {

enum class Strategy { Explicable, Balanced, Optimal };

inline constexpr std::array<Strategy, 3> kAllStrategies = {Strategy::Explicable, Strategy::Balanced,
                                                          Strategy::Optimal};

std::string to_string(Strategy s);
/// Accepts "explicable"/"exp", "balanced"/"bal", "optimal"/"opt".
Strategy parse_strategy(const std::string& text);

/// A plan together with the explanation sent before executing it.
struct AnnotatedPlan {
  Plan plan;
  MessageSet explanation;
  Rational explanation_cost{0};
  /// Explanation cost plus plan cost in the robot model.
  Cost execution_cost;
  /// Scored against the human model updated by `explanation`.
  Score explicability;
  Strategy tag = Strategy::Optimal;

  bool perfectly_explicable() const { return explicability.is_perfect(); }
};

struct StrategyTriple {
  AnnotatedPlan explicable;
  AnnotatedPlan balanced;
  AnnotatedPlan optimal;

  const AnnotatedPlan& at(Strategy s) const;
};

struct TripleOptions {
  /// Weight on -EX in the balanced objective C_e + weight * (-EX).
  Rational balance_weight{1};
  /// Number of cheapest robot plans considered for the balanced strategy.
  std::size_t candidate_budget = 5;
  ExplicabilityMetric metric = ExplicabilityMetric::HumanModelDiff;
  SearchLimits limits;
};

/// Builds the explicable, balanced and optimal strategies for one task.
/// Throws UnsolvableModel if the robot model has no plan.
StrategyTriple strategy_triple(const ModelPair& pair, const TripleOptions& options = {});

/// Both orderings: C_e(exp) >= C_e(bal) >= C_e(opt) and EX(exp) >= EX(bal) >= EX(opt).
bool dominance_holds(const StrategyTriple& triple);

}  // namespace trustplan::reconcile
