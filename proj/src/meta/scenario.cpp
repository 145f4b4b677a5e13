#include "trustplan/meta/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace trustplan::meta {

std::string to_string(ResponseMode mode) { return mode == ResponseMode::Binary ? "binary" : "boltzmann"; }

ResponseMode parse_response_mode(const std::string& text) {
  if (text == "binary") return ResponseMode::Binary;
  if (text == "boltzmann") return ResponseMode::Boltzmann;
  throw ScenarioError("unknown response mode '" + text + "'");
}

double explicability_response(const Score& ex, double beta, ResponseMode mode) {
  if (!ex.is_finite()) return 0.0;
  if (mode == ResponseMode::Binary) return ex.is_perfect() ? 1.0 : 0.0;
  return std::exp(beta * planning::to_double(ex.value()));
}

double TrustScenario::omega_at(int level) const {
  if (omega.empty()) return 1.0 - anchor_at(level);
  return omega.at(static_cast<std::size_t>(level - 1));
}

double TrustScenario::anchor_at(int level) const { return anchors.at(static_cast<std::size_t>(level - 1)); }

bool TrustScenario::allows(Strategy s) const { return std::find(actions.begin(), actions.end(), s) != actions.end(); }

void validate(const TrustScenario& s) {
  if (s.k() < 2) throw ScenarioError("at least two trust levels are required");
  for (int i = 1; i <= s.k(); ++i) {
    double t = s.anchor_at(i);
    if (!(t >= 0.0 && t <= 1.0)) throw ScenarioError("anchor of level " + std::to_string(i) + " is outside [0,1]");
    if (i > 1 && !(t > s.anchor_at(i - 1))) throw ScenarioError("anchors must be strictly increasing");
  }
  if (!s.omega.empty() && static_cast<int>(s.omega.size()) != s.k()) {
    throw ScenarioError("omega has " + std::to_string(s.omega.size()) + " entries for " + std::to_string(s.k()) +
                        " levels");
  }
  for (int i = 1; i <= s.k(); ++i) {
    double w = s.omega_at(i);
    if (!(w >= 0.0 && w <= 1.0)) throw ScenarioError("omega of level " + std::to_string(i) + " is outside [0,1]");
    if (i > 1 && w > s.omega_at(i - 1)) throw ScenarioError("omega must not increase with trust");
  }
  if (!(s.gamma >= 0.0 && s.gamma < 1.0)) throw ScenarioError("gamma must lie in [0,1)");
  if (!(s.fail_penalty >= 0.0) || !std::isfinite(s.fail_penalty)) {
    throw ScenarioError("fail penalty must be a non-negative number");
  }
  if (!(s.beta > 0.0) || !std::isfinite(s.beta)) throw ScenarioError("beta must be positive");
  if (s.actions.empty()) throw ScenarioError("no strategies allowed");
}

int level_of(double scalar, int k) {
  if (!(scalar >= 0.0 && scalar <= 1.0)) throw std::invalid_argument("trust scalar outside [0,1]");
  // Small slack so that values like 0.75 produced by averaging land on the
  // closed upper end of their interval.
  int level = static_cast<int>(std::ceil(scalar * k - 1e-9));
  return std::clamp(level, 1, k);
}

double level_midpoint(int level, int k) { return (level - 0.5) / k; }

}  // namespace trustplan::meta
