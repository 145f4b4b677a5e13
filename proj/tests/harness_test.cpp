#include <doctest.h>

#include <cmath>
#include <fstream>
#include <queue>

#include "trustplan/harness/session_log.hpp"
#include "trustplan/harness/simulate.hpp"
#include "trustplan/planning/planner.hpp"

using namespace trustplan;
using namespace trustplan::harness;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = TRUSTPLAN_SCENARIO_DIR;

const PreparedScenario& rover() {
  static const PreparedScenario p = prepare(load_scenario(kScenarios / "rover" / "rover.json"));
  return p;
}

const PreparedScenario& office() {
  static const PreparedScenario p = prepare(load_scenario(kScenarios / "office" / "office.json"));
  return p;
}

/// Dijkstra over the cells of a goal map, independent of grid_model.
double grid_distance(const GridMap& map) {
  auto [sx, sy] = *map.find('S');
  auto [gx, gy] = *map.find('G');
  std::vector<double> dist(static_cast<std::size_t>(map.width() * map.height()), INFINITY);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[static_cast<std::size_t>(sy * map.width() + sx)] = 0;
  open.push({0, sy * map.width() + sx});
  while (!open.empty()) {
    auto [d, id] = open.top();
    open.pop();
    if (d > dist[static_cast<std::size_t>(id)]) continue;
    int x = id % map.width(), y = id / map.width();
    const int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
    for (int i = 0; i < 4; ++i) {
      int nx = x + dx[i], ny = y + dy[i];
      if (!map.passable(nx, ny)) continue;
      double nd = d + planning::to_double(map.entry_cost(nx, ny));
      auto& slot = dist[static_cast<std::size_t>(ny * map.width() + nx)];
      if (nd < slot) {
        slot = nd;
        open.push({nd, ny * map.width() + nx});
      }
    }
  }
  return dist[static_cast<std::size_t>(gy * map.width() + gx)];
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "trustplan-harness-test";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

}  // namespace

TEST_CASE("grid maps parse and reject malformed input") {
  auto map = parse_grid_map("; demo\ncost R 7\ngrid\n#####\n#S.G#\n#.R.#\n#####\n");
  CHECK(map.width() == 5);
  CHECK(map.height() == 4);
  CHECK(map.entry_cost(2, 2) == planning::Rational(7));
  CHECK(map.entry_cost(2, 1) == planning::Rational(1));
  CHECK_FALSE(map.passable(0, 0));
  CHECK_FALSE(map.passable(-1, 1));

  CHECK_THROWS_AS(parse_grid_map("grid\n#S.X#\n"), MapError);
  CHECK_THROWS_AS(parse_grid_map("grid\n#S.G#\n#..#\n"), MapError);
  CHECK_THROWS_AS(parse_grid_map("grid\n#S.S#\n#..G#\n"), MapError);
  CHECK_THROWS_AS(parse_grid_map("grid\n#S..#\n"), MapError);
  CHECK_THROWS_AS(parse_grid_map("cost R 0\ngrid\n#SG#\n"), MapError);
  CHECK_THROWS_AS(parse_grid_map("colour R 2\ngrid\n#SG#\n"), MapError);
  CHECK_THROWS_AS(parse_grid_map("grid\n#SC#\n"), MapError);
  try {
    parse_grid_map("grid\n#S.G#\n#.?.#\n");
    FAIL("expected MapError");
  } catch (const MapError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("grid model costs match a direct shortest-path search") {
  const char* maps[] = {
      "grid\nS..\n.#.\n..G\n",
      "cost R 9\ngrid\nS.R.G\n.###.\n.....\n",
      "cost R 2\ngrid\nSRRRG\n.#.#.\n.....\n",
      "cost R 3/2\ngrid\nS.#..\nR.#.G\n.R...\n",
  };
  for (const char* text : maps) {
    auto map = parse_grid_map(text);
    auto model = grid_model(map);
    auto r = planning::optimal_plan(model);
    REQUIRE(r.has_value());
    CHECK(planning::to_double(r->cost) == doctest::Approx(grid_distance(map)));
    auto last = cell_after(r->plan.steps.back());
    REQUIRE(last.has_value());
    CHECK(*last == *map.find('G'));
  }
  CHECK_FALSE(cell_after("drop").has_value());
}

TEST_CASE("coffee maps need the pick-up and the delivery") {
  auto map = parse_grid_map("grid\nC.S.B\n");
  auto r = planning::optimal_plan(grid_model(map));
  REQUIRE(r.has_value());
  CHECK(r->plan.size() == 8);
  CHECK(r->plan.steps[2] == "pick-coffee-0-0");
  CHECK(r->plan.steps.back() == "deliver-4-0");
  CHECK(planning::to_double(r->cost) == 8.0);
}

TEST_CASE("scoring table") {
  ScoringTable t;
  CHECK(total_points(score_round(Choice::Monitor, RoundResult::Success, t)) == 100);
  CHECK(total_points(score_round(Choice::Monitor, RoundResult::Stopped, t)) == 50);
  CHECK(total_points(score_round(Choice::Monitor, RoundResult::Failure, t)) == -200);
  auto label = score_round(Choice::Label, RoundResult::Success, t);
  CHECK(label.size() == 2);
  CHECK(total_points(label) == 200);
  auto failed = score_round(Choice::Label, RoundResult::Failure, t);
  CHECK(failed.size() == 2);
  CHECK(total_points(failed) == -100);
  t.forfeit_label_bonus_on_failure = true;
  CHECK(total_points(score_round(Choice::Label, RoundResult::Failure, t)) == -200);
  CHECK_THROWS_AS(score_round(Choice::Label, RoundResult::Stopped, t), ValidationError);
  CHECK_THROWS_AS(parse_choice("watch"), ValidationError);
}

TEST_CASE("scenario configuration errors") {
  const std::string robot = "fluents: a b\naction go cost 1 pre {a} add {b} del {a}\ninit {a}\ngoal {b}\n";
  const std::string human = "fluents: a b\naction go cost 3 pre {a} add {b} del {a}\ninit {a}\ngoal {b}\n";
  write(scratch("r.model"), robot);
  write(scratch("h.model"), human);
  write(scratch("pair.json"), R"({"label": "t", "robot": "r.model", "human": "h.model"})");

  SUBCASE("pair files") {
    auto task = load_task(scratch("pair.json"));
    CHECK(task.label == "t");
    CHECK(task.pair.delta().messages.size() == 1);
    write(scratch("bad-cost.json"),
          R"({"label": "t", "robot": "r.model", "human": "h.model", "message_costs": {"cost go 9>1": "2"}})");
    CHECK_THROWS_AS(load_task(scratch("bad-cost.json")), ConfigError);
    write(scratch("missing.json"), R"({"label": "t", "robot": "nope.model", "human": "h.model"})");
    CHECK_THROWS_AS(load_task(scratch("missing.json")), ConfigError);
    write(scratch("extra.json"), R"({"label": "t", "robot": "r.model", "human": "h.model", "colour": 1})");
    CHECK_THROWS_AS(load_task(scratch("extra.json")), ConfigError);
  }

  SUBCASE("scenarios") {
    json base = {{"name", "s"},
                 {"levels", {{{"pair", "pair.json"}, {"anchor", 0.0}}, {{"pair", "pair.json"}, {"anchor", 0.5}}}}};
    auto source = scratch("s.json");
    CHECK_NOTHROW(parse_scenario(base, source));
    auto broken = [&](auto edit) {
      json j = base;
      edit(j);
      return j;
    };
    CHECK_THROWS_AS(parse_scenario(broken([](json& j) { j["colour"] = 1; }), source), ConfigError);
    CHECK_THROWS_AS(parse_scenario(broken([](json& j) { j["levels"][1]["anchor"] = 0.0; }), source), ConfigError);
    CHECK_THROWS_AS(parse_scenario(broken([](json& j) { j["omega"] = {0.2, 0.9}; }), source), ConfigError);
    CHECK_THROWS_AS(parse_scenario(broken([](json& j) { j["gamma"] = 1.0; }), source), ConfigError);
    CHECK_THROWS_AS(parse_scenario(broken([](json& j) { j["initial_level"] = 3; }), source), ConfigError);
    CHECK_THROWS_AS(parse_scenario(broken([](json& j) { j["levels"][0]["pair"] = "none.json"; }), source),
                    ConfigError);
    CHECK_THROWS_AS(parse_scenario(broken([](json& j) { j["sweep"] = {{"task_order", {{0, 0}}}}; }), source),
                    ConfigError);
    CHECK_THROWS_AS(parse_scenario(broken([](json& j) { j["sweep"] = {{"anchors", {{0.1}}}}; }), source),
                    ConfigError);
  }
}

TEST_CASE("bundled scenarios load") {
  CHECK(rover().trust.k() == 4);
  CHECK(office().trust.k() == 4);
  for (const auto* p : {&rover(), &office()}) {
    for (int level = 1; level <= 4; ++level) {
      const auto& t = p->triple_at(level);
      CHECK(t.explicable.perfectly_explicable());
      CHECK(t.optimal.execution_cost < t.explicable.execution_cost);
      CHECK(reconcile::dominance_holds(t));
    }
  }
  for (int level = 1; level <= 4; ++level) CHECK(office().task_at(level).human_map.has_value());
  CHECK_FALSE(rover().task_at(1).human_map.has_value());
}

TEST_CASE("episodes") {
  SUBCASE("always explicable is never stopped and trust never falls") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      for (const auto* p : {&rover(), &office()}) {
        auto t = run_episode(*p, Condition::AlwaysExplicable, seed);
        REQUIRE(t.rounds.size() == 10);
        int last = p->config.initial_level;
        for (const auto& r : t.rounds) {
          CHECK(r.goal_reached);
          CHECK_FALSE(r.stopped_at.has_value());
          CHECK(r.next_level >= last);
          last = r.next_level;
        }
      }
    }
  }
  SUBCASE("always optimal on the rover is watched and stopped in round one") {
    auto t = run_episode(rover(), Condition::AlwaysOptimal, 11);
    const auto& r = t.rounds.front();
    CHECK(r.level == 1);
    CHECK(r.monitored);
    REQUIRE(r.stopped_at.has_value());
    CHECK(*r.stopped_at == *rover().surprises[0][meta::strategy_index(Strategy::Optimal)]);
    CHECK(r.next_level == 1);
    CHECK(r.penalty == rover().config.fail_penalty);
    CHECK(total_points(r.points) == 50);
  }
  SUBCASE("trace bookkeeping") {
    for (auto c : kAllConditions) {
      auto t = run_episode(office(), c, 5);
      CHECK(t.trust_levels.size() == t.rounds.size());
      CHECK(t.trust_scalars.size() == t.rounds.size());
      double exec = 0, mon = 0;
      int points = 0;
      for (std::size_t i = 0; i < t.rounds.size(); ++i) {
        const auto& r = t.rounds[i];
        exec += r.execution_cost + r.penalty;
        mon += r.monitoring_cost;
        points += total_points(r.points);
        CHECK(r.monitoring_cost == (r.monitored ? office().config.monitoring_cost_per_round : 0.0));
        CHECK(t.trust_levels[i] == r.next_level);
        if (i > 0) CHECK(r.level == t.rounds[i - 1].next_level);
      }
      CHECK(t.cumulative_execution_cost == doctest::Approx(exec));
      CHECK(t.cumulative_monitoring_cost == doctest::Approx(mon));
      CHECK(t.total_points() == points);
    }
  }
  SUBCASE("same seed, same trace") {
    for (auto c : kAllConditions) {
      CHECK(to_json(run_episode(office(), c, 7)).dump() == to_json(run_episode(office(), c, 7)).dump());
    }
    CHECK(to_json(run_episode(office(), Condition::TrustAware, 7, PolicySource::Recomputed)).dump() ==
          to_json(run_episode(office(), Condition::TrustAware, 7)).dump());
  }
}

TEST_CASE("session logs") {
  LogEvent e;
  e.ts = 42;
  e.session = "s1";
  e.round = 3;
  e.kind = "choice";
  e.payload = {{"choice", "monitor"}, {"level", 2}};
  auto line = format_log_line(e);
  CHECK(line == R"({"kind":"choice","payload":{"choice":"monitor","level":2},"round":3,"session":"s1","ts":42})");
  auto back = parse_log_line(line);
  CHECK(back.ts == 42);
  CHECK(back.session == "s1");
  CHECK(back.round == 3);
  CHECK(back.kind == "choice");
  CHECK(back.payload == e.payload);
  CHECK_THROWS_AS(parse_log_line("{"), ValidationError);
  CHECK_THROWS_AS(parse_log_line(R"({"ts": 1})"), ValidationError);

  SUBCASE("simulated logs replay to their stored points") {
    for (auto c : kAllConditions) {
      auto trace = run_episode(rover(), c, 3);
      std::vector<LogEvent> events;
      for (const auto& l : session_log_lines(trace, "sim")) events.push_back(parse_log_line(l));
      auto r = replay_points(events, rover().config.scoring);
      CHECK(r.consistent);
      CHECK(r.rounds == 10);
      CHECK(r.total_points == trace.total_points());
      CHECK(r.stored_points == trace.total_points());

      for (auto& ev : events) {
        if (ev.kind == "outcome") {
          ev.payload["total"] = ev.payload["total"].get<int>() + 1;
          break;
        }
      }
      CHECK_FALSE(replay_points(events, rover().config.scoring).consistent);
    }
  }
}

TEST_CASE("omega is recovered from simulated session logs") {
  PreparedScenario p = office();
  p.config.rounds = 1;
  std::vector<supervisor::MonitorObservation> obs;
  for (int level = 1; level <= 4; ++level) {
    p.config.initial_level = level;
    for (std::uint64_t seed = 1; seed <= 10000; ++seed) {
      auto trace = run_episode(p, Condition::AlwaysExplicable, seed * 4 + static_cast<std::uint64_t>(level));
      std::vector<LogEvent> events;
      for (const auto& l : session_log_lines(trace, "s")) events.push_back(parse_log_line(l));
      auto more = monitor_observations(events);
      obs.insert(obs.end(), more.begin(), more.end());
    }
  }
  auto e = supervisor::estimate_omega(obs, 1.0, 4);
  for (int level = 1; level <= 4; ++level) {
    CHECK(e.total[static_cast<std::size_t>(level - 1)] == 10000);
    CHECK(std::abs(e.per_level[static_cast<std::size_t>(level - 1)] - office().trust.omega_at(level)) < 0.02);
  }
}

TEST_CASE("bootstrap interval") {
  std::vector<double> a, b;
  for (int i = 0; i < 50; ++i) {
    a.push_back(10.0 + i % 5);
    b.push_back(7.0 + i % 5);
  }
  auto ci = bootstrap_difference(a, b, 0.99, 500, 1);
  CHECK(ci.mean_difference == doctest::Approx(3.0));
  CHECK(ci.lower <= 3.0);
  CHECK(ci.upper >= 3.0);
  CHECK(ci.excludes_zero());

  std::vector<double> c(40, 5.0), d(40, 5.0);
  auto flat = bootstrap_difference(c, d, 0.99, 200, 2);
  CHECK(flat.lower == 0.0);
  CHECK(flat.upper == 0.0);
  CHECK_FALSE(flat.excludes_zero());
  CHECK_THROWS(bootstrap_difference({}, d, 0.99, 10, 1));
}

TEST_CASE("condition comparison is deterministic") {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 40; ++s) seeds.push_back(s);
  auto a = compare_conditions(rover(), seeds);
  auto b = compare_conditions(rover(), seeds);
  CHECK(format_table(a) == format_table(b));
  CHECK(format_csv(a) == format_csv(b));
  CHECK(a.conditions.size() == 4);
  CHECK(a.trust_by_round.front().size() == 10);
  CHECK(a.at(Condition::AlwaysOptimal).final_level.mean == 1.0);
  CHECK(a.at(Condition::AlwaysExplicable).final_level.mean == 4.0);
}

TEST_CASE("sweeps") {
  SUBCASE("zero monitoring makes the optimal plan best everywhere") {
    auto trust = office().trust;
    trust.omega.assign(4, 0.0);
    auto p = reconfigure(office(), trust, office().task_order);
    for (auto s : p.policy.choice) CHECK(s == Strategy::Optimal);
  }
  SUBCASE("near-zero discount is myopic") {
    auto trust = office().trust;
    trust.gamma = 1e-9;
    auto p = reconfigure(office(), trust, office().task_order);
    for (int level = 1; level <= 4; ++level) {
      Strategy best = trust.actions.front();
      for (auto s : trust.actions) {
        if (p.mdp.cost_of(level, s) < p.mdp.cost_of(level, best)) best = s;
      }
      CHECK(p.policy.choice[static_cast<std::size_t>(level - 1)] == best);
    }
  }
  SUBCASE("grid size and determinism") {
    auto axes = std::vector<SweepAxis>{SweepAxis::Gamma, SweepAxis::Omega, SweepAxis::Anchors};
    auto r = sweep(office(), axes);
    CHECK(r.points.size() == 27);
    CHECK(to_json(r).dump() == to_json(sweep(office(), axes)).dump());
    auto orders = sweep(office(), {SweepAxis::TaskOrder});
    CHECK(orders.points.size() == 24);
  }
}
