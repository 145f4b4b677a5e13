#include "trustplan/supervisor/supervisor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trustplan::supervisor {

using planning::Cost;
using planning::Rational;

bool monitor_decision(int level, const TrustScenario& scenario, Rng& rng) {
  return rng.bernoulli(scenario.omega_at(level));
}

std::optional<std::size_t> first_surprise(const AnnotatedPlan& plan, const ModelPair& pair,
                                          const planning::PlannerOptions& planner) {
  reconcile::ExplanationContext ctx(pair, planner);
  const planning::PlanningModel& human = ctx.updated_model(plan.explanation);
  const Cost best = ctx.updated_optimum(plan.explanation);
  planning::FluentSet state = human.init;
  Rational spent{0};
  for (std::size_t j = 0; j < plan.plan.size(); ++j) {
    const auto* action = human.find_action(plan.plan.steps[j]);
    if (action == nullptr) return j;
    auto next = planning::apply_action(state, *action);
    if (!next) return j;
    state = std::move(*next);
    spent = spent + action->cost;
    auto rest = planning::optimal_plan_from(human, state, planner);
    if (!rest || Cost(spent) + rest->cost > best) return j;
  }
  return std::nullopt;
}

std::optional<std::size_t> intervention_step(double anchor, const AnnotatedPlan& plan, const ModelPair& pair,
                                             const planning::PlannerOptions& planner) {
  if (plan.perfectly_explicable()) return std::nullopt;
  const std::size_t n = plan.plan.size();
  return stop_after(anchor, n, first_surprise(plan, pair, planner).value_or(n));
}

std::size_t stop_after(double anchor, std::size_t n, std::size_t d) {
  if (d >= n) return n;
  const auto patience = static_cast<std::size_t>(std::floor(anchor * static_cast<double>(n - d) + 1e-9));
  return std::min(n, d + patience);
}

std::optional<std::size_t> intervention_step(int level, const TrustScenario& scenario, const AnnotatedPlan& plan,
                                             const ModelPair& pair) {
  return intervention_step(scenario.anchor_at(level), plan, pair);
}

meta::InterventionMap intervention_map(const TrustScenario& scenario, const std::vector<ModelPair>& tasks,
                                       const std::vector<reconcile::StrategyTriple>& triples) {
  meta::InterventionMap map;
  for (int level = 1; level <= scenario.k(); ++level) {
    const auto i = static_cast<std::size_t>(level - 1);
    for (Strategy s : scenario.actions) {
      map[{level, s}] = intervention_step(level, scenario, triples.at(i).at(s), tasks.at(i));
    }
  }
  return map;
}

int sample_trust_transition(int level, const AnnotatedPlan& plan, bool monitored, bool stopped,
                            const TrustScenario& scenario, Rng& rng) {
  if (stopped && !monitored) throw std::invalid_argument("a plan can only be stopped while monitored");
  const int k = scenario.k();
  if (!monitored || plan.perfectly_explicable()) return std::min(level + 1, k);
  double keep = meta::explicability_response(plan.explicability, scenario.beta, scenario.response);
  return rng.bernoulli(keep) ? level : std::max(level - 1, 1);
}

TrustReading trust_from_questionnaire(const std::array<double, 4>& ratings, int k) {
  double sum = 0.0;
  for (double r : ratings) {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("questionnaire ratings must lie in [0,1]");
    sum += r;
  }
  TrustReading t;
  t.scalar = sum / 4.0;
  t.level = meta::level_of(t.scalar, k);
  return t;
}

OmegaEstimate estimate_omega(std::span<const MonitorObservation> rounds, double alpha, int k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  OmegaEstimate e;
  e.alpha = alpha;
  e.monitored.assign(static_cast<std::size_t>(k), 0);
  e.total.assign(static_cast<std::size_t>(k), 0);
  for (const auto& r : rounds) {
    if (r.level < 1 || r.level > k) throw std::invalid_argument("observation level out of range");
    const auto i = static_cast<std::size_t>(r.level - 1);
    ++e.total[i];
    if (r.monitored) ++e.monitored[i];
  }
  for (std::size_t i = 0; i < e.total.size(); ++i) {
    e.per_level.push_back((static_cast<double>(e.monitored[i]) + alpha) / (static_cast<double>(e.total[i]) + 2 * alpha));
    e.low_confidence.push_back(e.total[i] == 0);
  }
  return e;
}

}  // namespace trustplan::supervisor
