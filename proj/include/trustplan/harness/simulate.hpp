#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trustplan/harness/scoring.hpp"

namespace trustplan::harness {

enum class Condition { TrustAware, AlwaysExplicable, AlwaysOptimal, Random };
enum class PolicySource { Fixed, Recomputed };

inline constexpr Condition kAllConditions[] = {Condition::TrustAware, Condition::AlwaysExplicable,
                                               Condition::AlwaysOptimal, Condition::Random};

std::string to_string(Condition c);
Condition parse_condition(const std::string& text);
std::string to_string(PolicySource s);
PolicySource parse_policy_source(const std::string& text);

struct RoundOutcome {
  int round = 1;
  int level = 1;
  std::string task;
  Strategy strategy = Strategy::Explicable;
  bool monitored = false;
  std::optional<std::size_t> stopped_at;
  bool goal_reached = true;
  /// Explanation plus the executed actions.
  double execution_cost = 0.0;
  /// Fail penalty charged when the plan was stopped.
  double penalty = 0.0;
  double monitoring_cost = 0.0;
  int next_level = 1;
  double trust_scalar = 0.0;
  std::vector<PointEntry> points;
};

struct EpisodeTrace {
  Condition condition = Condition::TrustAware;
  std::uint64_t seed = 0;
  std::vector<RoundOutcome> rounds;
  /// Sum of execution costs and penalties.
  double cumulative_execution_cost = 0.0;
  double cumulative_monitoring_cost = 0.0;
  /// Level and scalar after each round.
  std::vector<int> trust_levels;
  std::vector<double> trust_scalars;

  double total_cost() const { return cumulative_execution_cost + cumulative_monitoring_cost; }
  int total_points() const;
};

/// Simulates config.rounds rounds. The task of each round is the one bound to
/// the current trust level. Deterministic in (scenario, condition, seed).
EpisodeTrace run_episode(const PreparedScenario& scenario, Condition condition, std::uint64_t seed,
                         PolicySource source = PolicySource::Fixed);

nlohmann::json to_json(const EpisodeTrace& trace);

/// One JSON line per event in the session-log format, so simulated episodes
/// can feed estimate_omega.
std::vector<std::string> session_log_lines(const EpisodeTrace& trace, const std::string& session_id);

struct Stat {
  double mean = 0.0;
  double std = 0.0;
};

struct DifferenceCI {
  std::string label;
  double mean_difference = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool excludes_zero() const { return lower > 0.0 || upper < 0.0; }
};

struct ConditionSummary {
  Condition condition = Condition::TrustAware;
  Stat total_cost;
  Stat execution_cost;
  Stat monitoring_cost;
  Stat final_trust;
  Stat final_level;
  Stat points;
};

struct ComparisonSummary {
  std::size_t episodes = 0;
  std::vector<ConditionSummary> conditions;
  /// Trust-aware minus each baseline, with two-sided 99% bootstrap intervals:
  /// total cost vs always-explicable, final trust vs always-optimal and random.
  std::vector<DifferenceCI> differences;
  /// Mean trust scalar per round, per condition (plot data).
  std::vector<std::vector<double>> trust_by_round;

  const ConditionSummary& at(Condition c) const;
};

ComparisonSummary compare_conditions(const PreparedScenario& scenario, const std::vector<std::uint64_t>& seeds,
                                     PolicySource source = PolicySource::Fixed, std::size_t resamples = 2000);

std::string format_table(const ComparisonSummary& summary);
std::string format_csv(const ComparisonSummary& summary);
nlohmann::json to_json(const ComparisonSummary& summary);

/// Percentile bootstrap interval for mean(a) - mean(b).
DifferenceCI bootstrap_difference(const std::vector<double>& a, const std::vector<double>& b, double level,
                                  std::size_t resamples, std::uint64_t seed);

enum class SweepAxis { Gamma, Omega, Anchors, TaskOrder };
SweepAxis parse_sweep_axis(const std::string& text);
std::string to_string(SweepAxis a);

struct SweepPoint {
  double gamma = 0.0;
  double omega_scale = 1.0;
  std::vector<double> anchors;
  std::vector<int> task_order;
  std::vector<Strategy> policy;
  std::vector<double> value;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::vector<Strategy> modal_policy;
  std::size_t modal_count = 0;
};

/// Solves the meta-MDP on the cartesian product of the chosen axes, taking
/// each grid from the scenario's sweep section (or a built-in default) and
/// leaving the other parameters at their configured values.
SweepResult sweep(const PreparedScenario& scenario, const std::vector<SweepAxis>& axes);
SweepGrid default_grid(const PreparedScenario& scenario);

std::string format_table(const SweepResult& result);
nlohmann::json to_json(const SweepResult& result);

}  // namespace trustplan::harness
