#include "trustplan/meta/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Dense>

namespace trustplan::meta {

using reconcile::AnnotatedPlan;

std::size_t strategy_index(Strategy s) {
  switch (s) {
    case Strategy::Explicable: return 0;
    case Strategy::Balanced: return 1;
    case Strategy::Optimal: return 2;
  }
  return 0;
}

std::string short_name(Strategy s) {
  switch (s) {
    case Strategy::Explicable: return "exp";
    case Strategy::Balanced: return "bal";
    case Strategy::Optimal: return "opt";
  }
  return "?";
}

std::string format_policy(const std::vector<Strategy>& choice) {
  std::string out = "[";
  for (std::size_t i = 0; i < choice.size(); ++i) {
    if (i > 0) out += ", ";
    out += short_name(choice[i]);
  }
  return out + "]";
}

const std::vector<double>& TrustMDP::row(int level, Strategy a) const {
  return transition.at(static_cast<std::size_t>(level - 1))[strategy_index(a)];
}

double TrustMDP::cost_of(int level, Strategy a) const {
  return cost.at(static_cast<std::size_t>(level - 1))[strategy_index(a)];
}

double monitored_cost(const AnnotatedPlan& plan, const reconcile::ModelPair& pair, std::optional<std::size_t> stop,
                      double fail_penalty) {
  if (!plan.execution_cost.is_finite()) return INFINITY;
  if (!stop || *stop >= plan.plan.size()) return plan.execution_cost.as_double();
  planning::Cost prefix = planning::prefix_cost(pair.robot(), plan.plan, *stop);
  if (!prefix.is_finite()) return INFINITY;
  return planning::to_double(plan.explanation_cost) + prefix.as_double() + fail_penalty;
}

TrustMDP build_mdp(const TrustScenario& scenario, const std::vector<reconcile::ModelPair>& tasks,
                   const std::vector<StrategyTriple>& triples, const InterventionMap& interventions) {
  validate(scenario);
  const int k = scenario.k();
  if (static_cast<int>(triples.size()) != k || static_cast<int>(tasks.size()) != k) {
    throw ScenarioError("expected one task and one strategy triple per trust level");
  }
  TrustMDP mdp;
  mdp.k = k;
  mdp.gamma = scenario.gamma;
  mdp.actions = scenario.actions;
  mdp.transition.resize(static_cast<std::size_t>(k));
  mdp.cost.resize(static_cast<std::size_t>(k));

  for (int level = 1; level <= k; ++level) {
    const auto i = static_cast<std::size_t>(level - 1);
    const double w = scenario.omega_at(level);
    for (Strategy a : reconcile::kAllStrategies) {
      auto& row = mdp.transition[i][strategy_index(a)];
      row.assign(static_cast<std::size_t>(k), 0.0);
      mdp.cost[i][strategy_index(a)] = 0.0;
      if (!scenario.allows(a)) continue;

      const AnnotatedPlan& plan = triples[i].at(a);
      auto it = interventions.find({level, a});
      if (it == interventions.end()) {
        throw ScenarioError("no intervention entry for level " + std::to_string(level) + ", strategy " +
                            reconcile::to_string(a));
      }
      const std::size_t up = static_cast<std::size_t>(std::min(level + 1, k) - 1);
      const std::size_t down = static_cast<std::size_t>(std::max(level - 1, 1) - 1);
      double c_e = plan.execution_cost.is_finite() ? plan.execution_cost.as_double() : INFINITY;
      double c_mon;
      if (plan.perfectly_explicable()) {
        row[up] = 1.0;
        c_mon = c_e;
      } else {
        double p = explicability_response(plan.explicability, scenario.beta, scenario.response);
        row[up] += 1.0 - w;
        row[i] += w * p;
        row[down] += w * (1.0 - p);
        c_mon = monitored_cost(plan, tasks[i], it->second, scenario.fail_penalty);
      }
      double c = (1.0 - w) * c_e + w * c_mon;
      // A zero weight on an infinite term is still infinite by IEEE rules;
      // only the terms that can occur matter.
      if (w == 0.0) c = c_e;
      if (w == 1.0) c = c_mon;
      if (!std::isfinite(c)) {
        throw ScenarioError("non-finite cost at level " + std::to_string(level) + ", strategy " +
                            reconcile::to_string(a));
      }
      mdp.cost[i][strategy_index(a)] = c;
    }
  }
  return mdp;
}

namespace {

double q_value(const TrustMDP& mdp, std::size_t s, Strategy a, const std::vector<double>& v) {
  const auto& row = mdp.transition[s][strategy_index(a)];
  double q = mdp.cost[s][strategy_index(a)];
  for (std::size_t t = 0; t < v.size(); ++t) q += mdp.gamma * row[t] * v[t];
  return q;
}

Strategy greedy(const TrustMDP& mdp, std::size_t s, const std::vector<double>& v, double* best_q) {
  Strategy best = mdp.actions.front();
  double bq = q_value(mdp, s, best, v);
  for (Strategy a : mdp.actions) {
    double q = q_value(mdp, s, a, v);
    // Earlier actions win unless a later one is clearly cheaper.
    if (q < bq - 1e-9 * std::max(1.0, std::abs(bq))) {
      bq = q;
      best = a;
    }
  }
  if (best_q != nullptr) *best_q = bq;
  return best;
}

}  // namespace

MetaPolicy solve(const TrustMDP& mdp, double tol) {
  if (!(mdp.gamma < 1.0)) throw ScenarioError("gamma must be below 1");
  const std::size_t n = static_cast<std::size_t>(mdp.k);
  std::vector<double> v(n, 0.0);
  const double threshold = mdp.gamma > 0.0 ? tol * (1.0 - mdp.gamma) / mdp.gamma : INFINITY;
  MetaPolicy policy;
  for (;;) {
    std::vector<double> next(n);
    double residual = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      greedy(mdp, s, v, &next[s]);
      residual = std::max(residual, std::abs(next[s] - v[s]));
    }
    v = std::move(next);
    ++policy.iterations;
    if (residual < threshold || mdp.gamma == 0.0) break;
  }
  policy.choice.resize(n);
  for (std::size_t s = 0; s < n; ++s) policy.choice[s] = greedy(mdp, s, v, nullptr);
  policy.value = v;
  for (double x : v) policy.reported_value.push_back(-x);
  return policy;
}

std::vector<double> evaluate_policy(const TrustMDP& mdp, const std::vector<Strategy>& choice) {
  const auto n = static_cast<Eigen::Index>(mdp.k);
  if (static_cast<Eigen::Index>(choice.size()) != n) throw std::invalid_argument("policy length differs from k");
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd c(n);
  for (Eigen::Index s = 0; s < n; ++s) {
    const auto us = static_cast<std::size_t>(s);
    const auto& row = mdp.transition[us][strategy_index(choice[us])];
    for (Eigen::Index t = 0; t < n; ++t) a(s, t) -= mdp.gamma * row[static_cast<std::size_t>(t)];
    c(s) = mdp.cost[us][strategy_index(choice[us])];
  }
  Eigen::VectorXd v = a.partialPivLu().solve(c);
  return std::vector<double>(v.data(), v.data() + n);
}

MetaPolicy best_policy_by_enumeration(const TrustMDP& mdp) {
  const std::size_t n = static_cast<std::size_t>(mdp.k);
  std::vector<std::size_t> idx(n, 0);
  MetaPolicy best;
  for (;;) {
    std::vector<Strategy> choice(n);
    for (std::size_t s = 0; s < n; ++s) choice[s] = mdp.actions[idx[s]];
    auto v = evaluate_policy(mdp, choice);
    // The optimal policy minimizes every component at once, so comparing sums
    // is enough to pick it.
    auto total = [](const std::vector<double>& x) {
      double t = 0;
      for (double y : x) t += y;
      return t;
    };
    if (best.value.empty() || total(v) < total(best.value) - 1e-12) {
      best.choice = choice;
      best.value = v;
    }
    std::size_t s = 0;
    while (s < n && ++idx[s] == mdp.actions.size()) idx[s++] = 0;
    if (s == n) break;
  }
  for (double x : best.value) best.reported_value.push_back(-x);
  return best;
}

nlohmann::json to_json(const TrustMDP& mdp) {
  nlohmann::json j;
  j["k"] = mdp.k;
  j["gamma"] = mdp.gamma;
  nlohmann::json levels = nlohmann::json::array();
  for (int level = 1; level <= mdp.k; ++level) {
    nlohmann::json entry;
    entry["level"] = level;
    for (Strategy a : mdp.actions) {
      entry["actions"][short_name(a)] = {{"cost", mdp.cost_of(level, a)}, {"transition", mdp.row(level, a)}};
    }
    levels.push_back(entry);
  }
  j["levels"] = levels;
  return j;
}

nlohmann::json to_json(const MetaPolicy& policy) {
  nlohmann::json choice = nlohmann::json::array();
  for (Strategy s : policy.choice) choice.push_back(short_name(s));
  return {{"policy", choice}, {"value", policy.value}, {"reported_value", policy.reported_value}};
}

}  // namespace trustplan::meta
