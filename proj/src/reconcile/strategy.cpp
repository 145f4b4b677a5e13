#include "trustplan/reconcile/strategy.hpp"

#include <tuple>
#include <vector>

namespace trustplan::reconcile {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Explicable: return "explicable";
    case Strategy::Balanced: return "balanced";
    case Strategy::Optimal: return "optimal";
  }
  return "?";
}

Strategy parse_strategy(const std::string& text) {
  if (text == "explicable" || text == "exp") return Strategy::Explicable;
  if (text == "balanced" || text == "bal") return Strategy::Balanced;
  if (text == "optimal" || text == "opt") return Strategy::Optimal;
  throw std::invalid_argument("unknown strategy '" + text + "'");
}

const AnnotatedPlan& StrategyTriple::at(Strategy s) const {
  switch (s) {
    case Strategy::Explicable: return explicable;
    case Strategy::Balanced: return balanced;
    case Strategy::Optimal: return optimal;
  }
  throw std::invalid_argument("bad strategy");
}

bool dominance_holds(const StrategyTriple& t) {
  return t.explicable.execution_cost >= t.balanced.execution_cost &&
         t.balanced.execution_cost >= t.optimal.execution_cost && t.explicable.explicability >= t.balanced.explicability &&
         t.balanced.explicability >= t.optimal.explicability;
}

namespace {

AnnotatedPlan annotate(ExplanationContext& ctx, const Plan& plan, MessageSet messages, Strategy tag,
                       ExplicabilityMetric metric) {
  AnnotatedPlan a;
  a.plan = plan;
  a.explanation_cost = ctx.pair().delta().cost_of(messages);
  a.execution_cost = Cost(a.explanation_cost) + planning::plan_cost(ctx.pair().robot(), plan);
  a.explicability = ctx.explicability(plan, messages, metric);
  a.explanation = std::move(messages);
  a.tag = tag;
  return a;
}

AnnotatedPlan choose_explicable(ExplanationContext& ctx, const Plan& robot_optimal, const TripleOptions& options) {
  const ModelPair& pair = ctx.pair();
  std::vector<AnnotatedPlan> options_found;

  // (a) a plan the human already expects, executed as is.
  for (const auto& r : planning::cheapest_plans(pair.human(), options.candidate_budget, options.limits.planner)) {
    if (r.cost != pair.expected_cost()) break;
    auto a = annotate(ctx, r.plan, {}, Strategy::Explicable, options.metric);
    if (a.execution_cost.is_finite()) options_found.push_back(std::move(a));
  }
  // (b) the robot's optimal plan preceded by a minimally complete explanation.
  try {
    auto explanation = mce(ctx, robot_optimal, options.limits);
    options_found.push_back(annotate(ctx, robot_optimal, std::move(explanation), Strategy::Explicable, options.metric));
  } catch (const ExplanationBudgetExceeded&) {
  }
  if (options_found.empty()) {
    throw std::runtime_error("no perfectly explicable strategy for '" + pair.label() + "'");
  }
  const AnnotatedPlan* best = &options_found.front();
  for (const auto& a : options_found) {
    auto key = [](const AnnotatedPlan& p) {
      return std::make_tuple(p.execution_cost, -p.explicability.as_double(), p.explanation.size(), p.plan);
    };
    if (key(a) < key(*best)) best = &a;
  }
  return *best;
}

AnnotatedPlan choose_balanced(ExplanationContext& ctx, const AnnotatedPlan& explicable, const AnnotatedPlan& optimal,
                              const TripleOptions& options) {
  const ModelPair& pair = ctx.pair();
  const MessageSet& all = pair.delta().messages;

  std::vector<MessageSet> subsets;
  if (all.size() <= options.limits.max_balanced_delta) {
    const std::size_t count = std::size_t{1} << all.size();
    for (std::size_t mask = 0; mask < count; ++mask) {
      MessageSet s;
      for (std::size_t i = 0; i < all.size(); ++i) {
        if (mask & (std::size_t{1} << i)) s.push_back(all[i]);
      }
      subsets.push_back(std::move(s));
    }
  } else {
    subsets.push_back({});
    subsets.push_back(all);
  }

  struct Candidate {
    AnnotatedPlan plan;
    int rank;
  };
  std::vector<Candidate> candidates{{optimal, 0}, {explicable, 1}};
  for (const auto& r : planning::cheapest_plans(pair.robot(), options.candidate_budget, options.limits.planner)) {
    for (const auto& s : subsets) {
      ctx.check_cancelled();
      candidates.push_back({annotate(ctx, r.plan, s, Strategy::Balanced, options.metric), 2});
    }
  }

  const Candidate* best = nullptr;
  std::tuple<Rational, Score, Cost, int, Plan, std::string> best_key;
  for (const auto& c : candidates) {
    const auto& a = c.plan;
    // -inf explicability cannot be traded off against cost.
    if (!a.explicability.is_finite() || !a.execution_cost.is_finite()) continue;
    Rational objective = a.execution_cost.value() - options.balance_weight * a.explicability.value();
    auto key = std::make_tuple(objective, Score(-a.explicability.value()), a.execution_cost, c.rank, a.plan,
                               keys_of(a.explanation));
    if (best == nullptr || key < best_key) {
      best = &c;
      best_key = std::move(key);
    }
  }
  AnnotatedPlan chosen = best != nullptr ? best->plan : explicable;
  chosen.tag = Strategy::Balanced;

  StrategyTriple check{explicable, chosen, optimal};
  if (!dominance_holds(check)) {
    chosen = explicable;
    chosen.tag = Strategy::Balanced;
  }
  return chosen;
}

}  // namespace

StrategyTriple strategy_triple(const ModelPair& pair, const TripleOptions& options) {
  ExplanationContext ctx(pair, options.limits.planner, options.limits.cancel);
  auto robot_optimal = planning::optimal_plan(pair.robot(), options.limits.planner);
  if (!robot_optimal) throw UnsolvableModel("robot", pair.label());

  StrategyTriple t;
  t.optimal = annotate(ctx, robot_optimal->plan, {}, Strategy::Optimal, options.metric);
  t.explicable = choose_explicable(ctx, robot_optimal->plan, options);
  t.balanced = choose_balanced(ctx, t.explicable, t.optimal, options);
  return t;
}

}  // namespace trustplan::reconcile
