#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "trustplan/harness/config.hpp"

namespace trustplan::harness {

enum class Choice { Monitor, Label };
enum class RoundResult { Success, Stopped, Failure };

std::string to_string(Choice c);
std::string to_string(RoundResult r);
Choice parse_choice(const std::string& text);

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PointEntry {
  std::string reason;
  int points = 0;
};

/// Ledger entries for one round. A labeling supervisor cannot stop the robot,
/// so (Label, Stopped) throws ValidationError.
std::vector<PointEntry> score_round(Choice choice, RoundResult result, const ScoringTable& table);
int total_points(const std::vector<PointEntry>& entries);

}  // namespace trustplan::harness
