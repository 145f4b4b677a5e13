#include "trustplan/harness/session_log.hpp"

#include <fstream>
#include <map>

namespace trustplan::harness {

using nlohmann::json;

std::string format_log_line(const LogEvent& e) {
  json j = {{"ts", e.ts}, {"session", e.session}, {"round", e.round}, {"kind", e.kind}, {"payload", e.payload}};
  return j.dump();
}

LogEvent parse_log_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& err) {
    throw ValidationError(std::string("malformed log line: ") + err.what());
  }
  try {
    LogEvent e;
    e.ts = j.at("ts").get<std::int64_t>();
    e.session = j.at("session").get<std::string>();
    e.round = j.at("round").get<int>();
    e.kind = j.at("kind").get<std::string>();
    e.payload = j.at("payload");
    return e;
  } catch (const json::exception&) {
    throw ValidationError("log line lacks one of ts, session, round, kind, payload");
  }
}

std::vector<LogEvent> read_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open log '" + path.string() + "'");
  std::vector<LogEvent> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(parse_log_line(line));
  }
  return out;
}

std::vector<supervisor::MonitorObservation> monitor_observations(const std::vector<LogEvent>& events) {
  std::vector<supervisor::MonitorObservation> out;
  for (const auto& e : events) {
    if (e.kind != "choice") continue;
    try {
      out.push_back({e.payload.at("level").get<int>(), e.payload.at("choice").get<std::string>() == "monitor"});
    } catch (const json::exception&) {
      throw ValidationError("choice event without level or choice in session '" + e.session + "'");
    }
  }
  return out;
}

ReplayResult replay_points(const std::vector<LogEvent>& events, const ScoringTable& table) {
  ReplayResult r;
  std::map<std::pair<std::string, int>, Choice> choices;
  auto fail = [&](const std::string& why) {
    if (r.consistent) {
      r.consistent = false;
      r.problem = why;
    }
  };
  for (const auto& e : events) {
    const auto key = std::make_pair(e.session, e.round);
    if (e.kind == "choice") {
      choices[key] = parse_choice(e.payload.value("choice", std::string()));
    } else if (e.kind == "outcome") {
      auto it = choices.find(key);
      if (it == choices.end()) {
        fail("outcome without choice in round " + std::to_string(e.round));
        continue;
      }
      std::string result = e.payload.value("result", std::string());
      RoundResult rr = result == "success"   ? RoundResult::Success
                       : result == "stopped" ? RoundResult::Stopped
                                             : RoundResult::Failure;
      int points = total_points(score_round(it->second, rr, table));
      int stored = e.payload.value("total", 0);
      r.total_points += points;
      r.stored_points += stored;
      ++r.rounds;
      if (points != stored) {
        fail("round " + std::to_string(e.round) + " stores " + std::to_string(stored) + " points, replay gives " +
             std::to_string(points));
      }
    }
  }
  return r;
}

}  // namespace trustplan::harness
