#include "trustplan/reconcile/mce.hpp"

#include <optional>
#include <vector>

namespace trustplan::reconcile {

namespace {

/// Advances `idx` to the next k-combination of {0..n-1} in lexicographic order.
bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

MessageSet mce(ExplanationContext& ctx, const Plan& plan, const SearchLimits& limits) {
  const ModelPair& pair = ctx.pair();
  Cost robot_cost = planning::plan_cost(pair.robot(), plan);
  if (!robot_cost.is_finite() || robot_cost != ctx.robot_optimum()) {
    throw std::invalid_argument("mce: plan is not optimal in the robot model");
  }
  const MessageSet& all = pair.delta().messages;
  const std::size_t n = all.size();
  if (ctx.optimal_after(plan, {})) return {};
  if (n > limits.max_delta) throw ExplanationBudgetExceeded(n, limits.max_delta);

  for (std::size_t k = 1; k <= n; ++k) {
    std::optional<MessageSet> best;
    Rational best_cost{0};
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    do {
      ctx.check_cancelled();
      MessageSet subset;
      subset.reserve(k);
      for (auto i : idx) subset.push_back(all[i]);
      if (!ctx.optimal_after(plan, subset)) continue;
      Rational cost = pair.delta().cost_of(subset);
      // Combinations come out in lexicographic key order, so the first subset
      // at a given cost wins the tie.
      if (!best || cost < best_cost) {
        best = std::move(subset);
        best_cost = cost;
      }
    } while (next_combination(idx, n));
    if (best) return *best;
  }
  // Unreachable: the full delta turns the human model into the robot model.
  throw std::logic_error("mce: full delta does not make the plan optimal");
}

MessageSet mce(const ModelPair& pair, const Plan& plan, const SearchLimits& limits) {
  ExplanationContext ctx(pair, limits.planner, limits.cancel);
  return mce(ctx, plan, limits);
}

}  // namespace trustplan::reconcile
