#pragma once

#include <stdexcept>

#include "trustplan/reconcile/explicability.hpp"

namespace trustplan::reconcile {

struct SearchLimits {
  /// Largest model delta searched exhaustively.
  std::size_t max_delta = 16;
  /// Largest delta whose every subset is tried for the balanced strategy;
  /// above it only the empty and full explanations are considered.
  std::size_t max_balanced_delta = 10;
  PlannerOptions planner;
  const std::atomic<bool>* cancel = nullptr;
};

class ExplanationBudgetExceeded : public std::runtime_error {
 public:
  ExplanationBudgetExceeded(std::size_t delta_size, std::size_t cap)
      : std::runtime_error("model delta has " + std::to_string(delta_size) + " messages; exhaustive search cap is " +
                           std::to_string(cap)) {}
};

/// Minimally complete explanation: the smallest subset of the model delta after
/// which `plan` is valid and optimal in the human's updated model. Ties go to
/// the cheaper subset, then to the lexicographically smaller key list.
/// `plan` must be optimal in the robot model (std::invalid_argument otherwise).
MessageSet mce(const ModelPair& pair, const Plan& plan, const SearchLimits& limits = {});
MessageSet mce(ExplanationContext& ctx, const Plan& plan, const SearchLimits& limits);

}  // namespace trustplan::reconcile
