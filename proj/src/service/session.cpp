#include "trustplan/service/session.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "trustplan/harness/session_log.hpp"

namespace trustplan::service {

using nlohmann::json;

std::string to_string(Phase p) {
  switch (p) {
    case Phase::Choice: return "choice";
    case Phase::Watching: return "watching";
    case Phase::Questionnaire: return "questionnaire";
    case Phase::Done: return "done";
  }
  return "?";
}

struct SessionManager::Session {
  std::mutex mutex;
  std::string id;
  Condition condition = Condition::TrustAware;
  supervisor::Rng rng{0};
  std::ofstream log;

  int round = 1;
  int level = 1;
  double scalar = 0.0;
  Phase phase = Phase::Choice;
  Strategy strategy = Strategy::Explicable;
  std::optional<harness::Choice> choice;
  std::size_t shown = 0;
  std::optional<std::size_t> stopped_at;
  bool plan_finished = false;
  int points = 0;
  json rounds = json::array();
  json current = json::object();
};

namespace {

std::int64_t wall_clock() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

ApiError conflict(const std::string& message, Phase phase) {
  return ApiError(409, "conflict", message, {{"phase", to_string(phase)}});
}

ApiError invalid(const std::string& message, json detail = nullptr) {
  return ApiError(400, "validation", message, std::move(detail));
}

const char* const kRatingNames[] = {"predictability", "dependability", "faith", "trust"};

}  // namespace

SessionManager::SessionManager(harness::PreparedScenario scenario, ServiceOptions options)
    : scenario_(std::move(scenario)), options_(std::move(options)) {
  if (!options_.clock) options_.clock = wall_clock;
  if (!options_.log_dir.empty()) std::filesystem::create_directories(options_.log_dir);
}

SessionManager::~SessionManager() = default;

std::filesystem::path SessionManager::log_path(const std::string& id) const {
  return options_.log_dir / (id + ".jsonl");
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) {
  std::lock_guard lock(registry_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ApiError(404, "not-found", "no session '" + id + "'");
  return it->second;
}

void SessionManager::log(Session& s, const std::string& kind, json payload) {
  harness::LogEvent e;
  e.ts = options_.clock();
  e.session = s.id;
  e.round = s.round;
  e.kind = kind;
  e.payload = std::move(payload);
  if (!s.log.is_open()) return;
  // One write per line keeps lines whole even if the process dies mid-way.
  std::string line = harness::format_log_line(e) + "\n";
  s.log.write(line.data(), static_cast<std::streamsize>(line.size()));
  s.log.flush();
  if (!s.log) throw ApiError(500, "storage", "cannot append to the log of session '" + s.id + "'");
}

Strategy SessionManager::pick_strategy(Session& s) {
  switch (s.condition) {
    case Condition::TrustAware: return scenario_.policy.choice.at(static_cast<std::size_t>(s.level - 1));
    case Condition::AlwaysExplicable: return Strategy::Explicable;
    case Condition::AlwaysOptimal: return Strategy::Optimal;
    case Condition::Random: return s.rng.bernoulli(0.5) ? Strategy::Explicable : Strategy::Optimal;
  }
  return Strategy::Explicable;
}

json SessionManager::round_view(const Session& s) const {
  json view = {{"session", s.id},
               {"condition", harness::to_string(s.condition)},
               {"round", s.round},
               {"rounds", scenario_.config.rounds},
               {"level", s.level},
               {"phase", to_string(s.phase)},
               {"points", s.points}};
  if (s.phase == Phase::Done) return view;
  const auto& task = scenario_.task_at(s.level);
  const auto& plan = scenario_.triple_at(s.level).at(s.strategy);
  json explanation = json::array();
  for (const auto& m : plan.explanation) explanation.push_back(m.describe());
  view["task"] = task.label;
  view["strategy"] = meta::short_name(s.strategy);
  view["plan_length"] = plan.plan.size();
  view["steps_shown"] = s.shown;
  view["explanation"] = explanation;
  if (task.human_map) {
    view["map"] = task.human_map->rows;
  } else {
    view["map"] = nullptr;
  }
  return view;
}

json SessionManager::create(const json& body) {
  if (!body.is_object()) throw invalid("body must be a JSON object");
  Condition condition = Condition::TrustAware;
  if (body.contains("condition")) {
    if (!body["condition"].is_string()) throw invalid("condition must be a string");
    try {
      condition = harness::parse_condition(body["condition"].get<std::string>());
    } catch (const std::exception& e) {
      throw invalid(e.what());
    }
  }
  auto s = std::make_shared<Session>();
  {
    std::lock_guard lock(registry_mutex_);
    char id[32];
    std::snprintf(id, sizeof id, "s%05llu", static_cast<unsigned long long>(next_id_));
    s->id = id;
    s->rng = supervisor::Rng(options_.seed * 1000003u + next_id_);
    ++next_id_;
    sessions_[s->id] = s;
  }
  std::lock_guard lock(s->mutex);
  s->condition = condition;
  s->level = scenario_.config.initial_level;
  s->scalar = meta::level_midpoint(s->level, scenario_.trust.k());
  s->strategy = pick_strategy(*s);
  if (!options_.log_dir.empty()) {
    s->log.open(log_path(s->id), std::ios::app | std::ios::binary);
    if (!s->log) throw ApiError(500, "storage", "cannot create the log of session '" + s->id + "'");
    json index = {{"session", s->id},
                  {"condition", harness::to_string(condition)},
                  {"scenario", scenario_.config.name},
                  {"created", options_.clock()}};
    std::lock_guard registry(registry_mutex_);
    std::ofstream out(options_.log_dir / "index.jsonl", std::ios::app | std::ios::binary);
    std::string line = index.dump() + "\n";
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    if (!out) throw ApiError(500, "storage", "cannot append to the session index");
  }
  log(*s, "created",
      {{"condition", harness::to_string(condition)}, {"level", s->level}, {"scenario", scenario_.config.name}});
  return round_view(*s);
}

json SessionManager::round(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  return round_view(*s);
}

json SessionManager::choice(const std::string& id, const json& body) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  if (!body.is_object() || !body.contains("choice") || !body["choice"].is_string()) {
    throw invalid("expected {\"choice\": \"monitor\" | \"label\"}");
  }
  harness::Choice choice;
  try {
    choice = harness::parse_choice(body["choice"].get<std::string>());
  } catch (const std::exception& e) {
    throw invalid(e.what());
  }
  if (s->phase != Phase::Choice) throw conflict("the round's choice has already been made", s->phase);

  const auto& task = scenario_.task_at(s->level);
  const auto& plan = scenario_.triple_at(s->level).at(s->strategy);
  s->choice = choice;
  s->shown = 0;
  s->stopped_at.reset();
  s->plan_finished = false;
  s->current = {{"round", s->round},
                {"level", s->level},
                {"task", task.label},
                {"strategy", meta::short_name(s->strategy)},
                {"choice", harness::to_string(choice)}};
  log(*s, "choice",
      {{"choice", harness::to_string(choice)},
       {"level", s->level},
       {"task", task.label},
       {"strategy", meta::short_name(s->strategy)}});
  if (choice == harness::Choice::Label || plan.plan.empty()) {
    // Unwatched execution: robot plans always reach the goal in its own model.
    s->shown = choice == harness::Choice::Label ? 0 : plan.plan.size();
    s->plan_finished = choice == harness::Choice::Monitor;
    close_round(*s, harness::RoundResult::Success);
  } else {
    s->phase = Phase::Watching;
  }
  return round_view(*s);
}

void SessionManager::close_round(Session& s, harness::RoundResult result) {
  auto entries = harness::score_round(*s.choice, result, scenario_.config.scoring);
  json points = json::array();
  for (const auto& e : entries) points.push_back({{"reason", e.reason}, {"points", e.points}});
  const int total = harness::total_points(entries);
  log(s, "outcome", {{"result", harness::to_string(result)}, {"points", points}, {"total", total}});
  s.points += total;
  s.current["result"] = harness::to_string(result);
  s.current["steps_shown"] = s.shown;
  s.current["stopped_at"] = s.stopped_at ? json(*s.stopped_at) : json(nullptr);
  s.current["points"] = total;
  s.phase = Phase::Questionnaire;
}

json SessionManager::step(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  if (s->phase != Phase::Watching) {
    if (s->plan_finished && s->phase == Phase::Questionnaire) {
      throw ApiError(404, "finished", "every step of the plan has been shown", {{"steps", s->shown}});
    }
    throw conflict("no plan is being watched", s->phase);
  }
  const auto& plan = scenario_.triple_at(s->level).at(s->strategy).plan;
  const std::string& action = plan.steps.at(s->shown);
  json payload = {{"index", s->shown}, {"action", action}};
  if (auto cell = harness::cell_after(action)) payload["cell"] = {cell->first, cell->second};
  log(*s, "step", payload);
  ++s->shown;
  json response = payload;
  response["last"] = s->shown == plan.size();
  if (s->shown == plan.size()) {
    s->plan_finished = true;
    close_round(*s, harness::RoundResult::Success);
  }
  response["round"] = round_view(*s);
  return response;
}

json SessionManager::stop(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  if (s->phase != Phase::Watching) throw conflict("the robot can only be stopped while it is watched", s->phase);
  s->stopped_at = s->shown;
  log(*s, "stop", {{"step", s->shown}});
  close_round(*s, harness::RoundResult::Stopped);
  return round_view(*s);
}

json SessionManager::questionnaire(const std::string& id, const json& body) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  if (!body.is_object()) throw invalid("body must be a JSON object");
  std::array<double, 4> ratings{};
  for (std::size_t i = 0; i < 4; ++i) {
    const char* name = kRatingNames[i];
    if (!body.contains(name) || !body[name].is_number()) throw invalid(std::string("missing rating '") + name + "'");
    ratings[i] = body[name].get<double>();
    if (!(ratings[i] >= 0.0 && ratings[i] <= 1.0)) {
      throw invalid(std::string("rating '") + name + "' must lie in [0, 1]", {{"value", ratings[i]}});
    }
  }
  if (s->phase != Phase::Questionnaire) throw conflict("no questionnaire is due", s->phase);
  auto reading = supervisor::trust_from_questionnaire(ratings, scenario_.trust.k());
  json answers = json::object();
  for (std::size_t i = 0; i < 4; ++i) answers[kRatingNames[i]] = ratings[i];
  log(*s, "questionnaire", {{"ratings", answers}, {"scalar", reading.scalar}, {"level", reading.level}});
  s->level = reading.level;
  s->scalar = reading.scalar;
  log(*s, "advance", {{"level", s->level}, {"scalar", s->scalar}});
  s->current["ratings"] = answers;
  s->current["next_level"] = s->level;
  s->current["trust_scalar"] = s->scalar;
  s->rounds.push_back(s->current);
  s->current = json::object();
  s->choice.reset();
  if (s->round >= scenario_.config.rounds) {
    s->phase = Phase::Done;
    log(*s, "finished", {{"points", s->points}});
  } else {
    ++s->round;
    s->strategy = pick_strategy(*s);
    s->phase = Phase::Choice;
  }
  return round_view(*s);
}

json SessionManager::summary(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  json levels = json::array();
  for (const auto& r : s->rounds) levels.push_back(r["next_level"]);
  return {{"session", s->id},
          {"condition", harness::to_string(s->condition)},
          {"phase", to_string(s->phase)},
          {"round", s->round},
          {"level", s->level},
          {"trust_scalar", s->scalar},
          {"points", s->points},
          {"trust_levels", levels},
          {"rounds", s->rounds}};
}

}  // namespace trustplan::service
