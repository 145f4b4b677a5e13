#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "trustplan/harness/scoring.hpp"
#include "trustplan/supervisor/supervisor.hpp"

namespace trustplan::harness {

/// One line of a session log: {"kind", "payload", "round", "session", "ts"},
/// keys in sorted order.
struct LogEvent {
  std::int64_t ts = 0;
  std::string session;
  int round = 0;
  std::string kind;
  nlohmann::json payload = nlohmann::json::object();
};

std::string format_log_line(const LogEvent& e);
/// Throws ValidationError on malformed lines.
LogEvent parse_log_line(const std::string& line);
std::vector<LogEvent> read_log(const std::filesystem::path& path);

/// (level, monitored) from every "choice" event.
std::vector<supervisor::MonitorObservation> monitor_observations(const std::vector<LogEvent>& events);

struct ReplayResult {
  bool consistent = true;
  std::string problem;
  int total_points = 0;
  int stored_points = 0;
  std::size_t rounds = 0;
};

/// Re-scores every round from its choice and outcome events and compares the
/// result with the totals stored in the outcome events.
ReplayResult replay_points(const std::vector<LogEvent>& events, const ScoringTable& table);

}  // namespace trustplan::harness
