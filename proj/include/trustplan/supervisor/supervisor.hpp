#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "trustplan/meta/mdp.hpp"

namespace trustplan::supervisor {

using meta::TrustScenario;
using reconcile::AnnotatedPlan;
using reconcile::ModelPair;
using reconcile::Strategy;

/// Seeded random source. Draws are built from raw 64-bit engine output so that
/// sequences are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// True with probability omega(level).
bool monitor_decision(int level, const TrustScenario& scenario, Rng& rng);

/// Index of the first action after which the observed prefix no longer fits
/// the human's model updated by the plan's explanation: the action cannot be
/// applied, or the prefix can no longer be completed at the optimal cost.
/// nullopt when the whole plan is consistent.
std::optional<std::size_t> first_surprise(const AnnotatedPlan& plan, const ModelPair& pair,
                                          const planning::PlannerOptions& planner = {});

/// min(n, d + floor(anchor * (n - d))): the stop step for a plan of n steps
/// whose first surprise is at d.
std::size_t stop_after(double anchor, std::size_t n, std::size_t d);

/// Number of steps executed before a monitoring human stops the plan, or
/// nullopt for perfectly explicable plans. With d the first surprising step,
/// the human waits floor(anchor * (|plan| - d)) more steps.
std::optional<std::size_t> intervention_step(double anchor, const AnnotatedPlan& plan, const ModelPair& pair,
                                             const planning::PlannerOptions& planner = {});
std::optional<std::size_t> intervention_step(int level, const TrustScenario& scenario, const AnnotatedPlan& plan,
                                             const ModelPair& pair);

/// Stop steps for every level and allowed strategy, with level i running tasks[i-1].
meta::InterventionMap intervention_map(const TrustScenario& scenario, const std::vector<ModelPair>& tasks,
                                       const std::vector<reconcile::StrategyTriple>& triples);

/// Next trust level after one round. `stopped` requires `monitored`.
int sample_trust_transition(int level, const AnnotatedPlan& plan, bool monitored, bool stopped,
                            const TrustScenario& scenario, Rng& rng);

struct TrustReading {
  double scalar = 0.0;
  int level = 1;
};

/// Mean of the four questionnaire items (predictability, dependability, faith,
/// trust), each in [0,1], mapped to a level. Throws std::invalid_argument for
/// ratings outside [0,1].
TrustReading trust_from_questionnaire(const std::array<double, 4>& ratings, int k);

struct MonitorObservation {
  int level = 1;
  bool monitored = false;
};

struct OmegaEstimate {
  std::vector<double> per_level;
  std::vector<std::size_t> monitored;
  std::vector<std::size_t> total;
  /// Set for levels without observations; their estimate is the prior mean.
  std::vector<bool> low_confidence;
  double alpha = 1.0;
};

/// Posterior mean of a Beta(alpha, alpha) prior per level.
OmegaEstimate estimate_omega(std::span<const MonitorObservation> rounds, double alpha, int k);

}  // namespace trustplan::supervisor
