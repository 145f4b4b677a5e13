#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "trustplan/reconcile/strategy.hpp"

namespace trustplan::meta {

using planning::Score;
using reconcile::Strategy;

enum class ResponseMode { Boltzmann, Binary };

std::string to_string(ResponseMode mode);
ResponseMode parse_response_mode(const std::string& text);

/// Probability that a monitoring human keeps their trust level after seeing a
/// plan with explicability `ex`. Boltzmann: exp(beta * ex). Binary: 1 iff ex == 0.
double explicability_response(const Score& ex, double beta, ResponseMode mode);

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters of the trust meta-model. Levels are numbered 1..k.
struct TrustScenario {
  std::vector<double> anchors;
  /// Monitoring probability per level; empty means 1 - anchors.
  std::vector<double> omega;
  double gamma = 0.9;
  double fail_penalty = 0.0;
  double beta = 1.0;
  ResponseMode response = ResponseMode::Binary;
  /// Strategies the robot may pick, in tie-break priority order.
  std::vector<Strategy> actions{Strategy::Explicable, Strategy::Balanced, Strategy::Optimal};

  int k() const { return static_cast<int>(anchors.size()); }
  double omega_at(int level) const;
  double anchor_at(int level) const;
  bool allows(Strategy s) const;
};

/// Throws ScenarioError on k < 2, anchors outside [0,1] or not strictly
/// increasing, omega of the wrong length, outside [0,1] or increasing,
/// gamma outside [0,1), negative penalty or non-positive beta.
void validate(const TrustScenario& scenario);

/// Level whose equal-width interval contains `scalar`: [0,1/k] is level 1 and
/// ((i-1)/k, i/k] is level i.
int level_of(double scalar, int k);
/// Midpoint of level's interval.
double level_midpoint(int level, int k);

}  // namespace trustplan::meta
