#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "trustplan/planning/model.hpp"

namespace trustplan::planning {

struct PlannerOptions {
  /// Maximum number of node expansions per search.
  std::size_t node_budget = 2'000'000;
};

class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(std::size_t budget)
      : std::runtime_error("search node budget of " + std::to_string(budget) + " exceeded"), budget_(budget) {}
  std::size_t budget() const { return budget_; }

 private:
  std::size_t budget_;
};

struct SearchResult {
  Plan plan;
  Rational cost{0};
  std::size_t expanded = 0;
};

/// Cost-optimal plan by A* with an admissible, consistent heuristic (the most
/// expensive cheapest achiever among unsatisfied goal fluents). Ties are broken
/// on (f, higher g, lexicographically smaller action sequence), so the result is
/// deterministic. nullopt means unsolvable. Throws BudgetExceeded.
std::optional<SearchResult> optimal_plan(const PlanningModel& model, const PlannerOptions& options = {});

/// Same search started from an arbitrary state instead of init.
std::optional<SearchResult> optimal_plan_from(const PlanningModel& model, const FluentSet& start,
                                              const PlannerOptions& options = {});

/// Optimal cost, or +inf when unsolvable.
Cost optimal_cost(const PlanningModel& model, const PlannerOptions& options = {});

/// Up to `count` distinct loop-free plans in non-decreasing cost order (Yen's
/// algorithm over the state space). The first entry equals optimal_plan().
std::vector<SearchResult> cheapest_plans(const PlanningModel& model, std::size_t count,
                                         const PlannerOptions& options = {});

}  // namespace trustplan::planning
