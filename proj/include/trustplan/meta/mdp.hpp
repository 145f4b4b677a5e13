#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "trustplan/meta/scenario.hpp"

namespace trustplan::meta {

using reconcile::StrategyTriple;

/// Step at which a monitoring human stops each (level, strategy) plan; nullopt
/// when they let it finish.
using InterventionMap = std::map<std::pair<int, Strategy>, std::optional<std::size_t>>;

inline constexpr std::size_t kStrategyCount = 3;
std::size_t strategy_index(Strategy s);

/// Per-level triples bound to the meta-level states. Rows and costs are only
/// meaningful for actions the scenario allows.
struct TrustMDP {
  int k = 0;
  double gamma = 0.9;
  std::vector<Strategy> actions;
  /// P[s][a][s'] with 0-based states.
  std::vector<std::array<std::vector<double>, kStrategyCount>> transition;
  std::vector<std::array<double, kStrategyCount>> cost;

  const std::vector<double>& row(int level, Strategy a) const;
  double cost_of(int level, Strategy a) const;
};

/// Monitored cost of one plan: C_e if completed, otherwise explanation cost,
/// the executed prefix and the failure penalty.
double monitored_cost(const reconcile::AnnotatedPlan& plan, const reconcile::ModelPair& pair,
                      std::optional<std::size_t> stop, double fail_penalty);

/// Throws ScenarioError on inconsistent inputs, a missing intervention entry
/// or a non-finite cost.
TrustMDP build_mdp(const TrustScenario& scenario, const std::vector<reconcile::ModelPair>& tasks,
                   const std::vector<StrategyTriple>& triples, const InterventionMap& interventions);

struct MetaPolicy {
  std::vector<Strategy> choice;
  std::vector<double> value;
  std::vector<double> reported_value;
  std::size_t iterations = 0;
};

/// Value iteration until the Bellman residual drops below tol*(1-gamma)/gamma.
/// Ties prefer the strategy listed first in the MDP's action list.
MetaPolicy solve(const TrustMDP& mdp, double tol = 1e-8);

/// Exact discounted cost of a stationary policy by a direct linear solve.
std::vector<double> evaluate_policy(const TrustMDP& mdp, const std::vector<Strategy>& choice);

/// Best policy found by evaluating every stationary policy.
MetaPolicy best_policy_by_enumeration(const TrustMDP& mdp);

/// Short form "[exp, exp, opt, opt]".
std::string format_policy(const std::vector<Strategy>& choice);
std::string short_name(Strategy s);

nlohmann::json to_json(const TrustMDP& mdp);
nlohmann::json to_json(const MetaPolicy& policy);

}  // namespace trustplan::meta
