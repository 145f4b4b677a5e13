#include "trustplan/harness/scoring.hpp"

namespace trustplan::harness {

std::string to_string(Choice c) { return c == Choice::Monitor ? "monitor" : "label"; }

std::string to_string(RoundResult r) {
  switch (r) {
    case RoundResult::Success: return "success";
    case RoundResult::Stopped: return "stopped";
    case RoundResult::Failure: return "failure";
  }
  return "?";
}

Choice parse_choice(const std::string& text) {
  if (text == "monitor") return Choice::Monitor;
  if (text == "label") return Choice::Label;
  throw ValidationError("choice must be 'monitor' or 'label'");
}

std::vector<PointEntry> score_round(Choice choice, RoundResult result, const ScoringTable& t) {
  if (choice == Choice::Monitor) {
    switch (result) {
      case RoundResult::Success: return {{"task-success", t.monitor_success}};
      case RoundResult::Stopped: return {{"stopped", t.monitor_stop}};
      case RoundResult::Failure: return {{"task-failure", t.monitor_failure}};
    }
  }
  switch (result) {
    case RoundResult::Success: return {{"task-success", t.task_success}, {"labeling", t.label_bonus}};
    case RoundResult::Stopped: throw ValidationError("a round spent labeling cannot end with a stop");
    case RoundResult::Failure:
      if (t.forfeit_label_bonus_on_failure) return {{"task-failure", t.label_failure}};
      return {{"task-failure", t.label_failure}, {"labeling", t.label_bonus}};
  }
  return {};
}

int total_points(const std::vector<PointEntry>& entries) {
  int sum = 0;
  for (const auto& e : entries) sum += e.points;
  return sum;
}

}  // namespace trustplan::harness
