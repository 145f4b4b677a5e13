#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "trustplan/harness/gridmap.hpp"
#include "trustplan/meta/mdp.hpp"

namespace trustplan::harness {

using reconcile::ModelPair;
using reconcile::Strategy;
using reconcile::StrategyTriple;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScoringTable {
  int monitor_success = 100;
  int monitor_stop = 50;
  int monitor_failure = -200;
  int task_success = 100;
  int label_bonus = 100;
  int label_failure = -200;
  /// Net a failed labeling round to label_failure alone instead of adding
  /// the labeling bonus to it.
  bool forfeit_label_bonus_on_failure = false;
};

struct SweepGrid {
  std::vector<double> gamma;
  std::vector<double> omega_scale;
  std::vector<std::vector<double>> anchors;
  /// Each entry lists, per level, the index of the task used at that level.
  std::vector<std::vector<int>> task_order;
};

struct ScenarioConfig {
  std::string name;
  std::filesystem::path source;
  std::vector<std::filesystem::path> pair_files;
  std::vector<double> anchors;
  std::vector<double> omega;
  double gamma = 0.9;
  double beta = 1.0;
  meta::ResponseMode response = meta::ResponseMode::Binary;
  reconcile::ExplicabilityMetric metric = reconcile::ExplicabilityMetric::HumanModelDiff;
  double fail_penalty = 0.0;
  planning::Rational balance_weight{1};
  std::size_t candidate_budget = 5;
  std::vector<Strategy> actions{Strategy::Explicable, Strategy::Balanced, Strategy::Optimal};
  int rounds = 10;
  double monitoring_cost_per_round = 3.0;
  int initial_level = 1;
  ScoringTable scoring;
  SweepGrid sweep;
  std::size_t node_budget = 2'000'000;
  std::size_t max_delta = 16;

  meta::TrustScenario trust_scenario() const;
};

/// A model pair loaded from a pair file, with the human map when the task is
/// a grid task.
struct Task {
  std::string label;
  std::filesystem::path source;
  ModelPair pair;
  std::optional<GridMap> human_map;
};

/// Pair file (JSON):
///   {"label": "...", "robot": "x.model", "human": "y.model",
///    "default_message_cost": "1", "message_costs": {"<key>": "3"}}
/// with "robot_map"/"human_map" in place of "robot"/"human" for grid tasks.
/// Paths are relative to the pair file.
Task load_task(const std::filesystem::path& path, const planning::PlannerOptions& planner = {});

ScenarioConfig parse_scenario(const nlohmann::json& j, const std::filesystem::path& source);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Everything the simulator and the service need, derived once from a config.
struct PreparedScenario {
  ScenarioConfig config;
  meta::TrustScenario trust;
  std::vector<Task> tasks;
  std::vector<StrategyTriple> triples;
  /// First surprising step per level and strategy (nullopt when none).
  std::vector<std::array<std::optional<std::size_t>, meta::kStrategyCount>> surprises;
  meta::InterventionMap interventions;
  meta::TrustMDP mdp;
  meta::MetaPolicy policy;
  /// Index into the configured pair files for each level.
  std::vector<int> task_order;

  const Task& task_at(int level) const { return tasks.at(static_cast<std::size_t>(level - 1)); }
  const StrategyTriple& triple_at(int level) const { return triples.at(static_cast<std::size_t>(level - 1)); }
};

PreparedScenario prepare(const ScenarioConfig& config);

/// Re-derives the trust model, interventions, MDP and policy after a change to
/// gamma, omega, anchors or the task order (a permutation applied to the
/// pair files as configured). Triples are reused. `base` must come from
/// prepare().
PreparedScenario reconfigure(const PreparedScenario& base, const meta::TrustScenario& trust,
                             const std::vector<int>& task_order);

std::vector<std::string> strategy_names(const std::vector<Strategy>& s);

}  // namespace trustplan::harness
