#include "trustplan/harness/config.hpp"

#include <fstream>
#include <set>

#include "trustplan/planning/model_io.hpp"
#include "trustplan/supervisor/supervisor.hpp"

namespace trustplan::harness {

namespace fs = std::filesystem;
using nlohmann::json;
using planning::Rational;

meta::TrustScenario ScenarioConfig::trust_scenario() const {
  meta::TrustScenario t;
  t.anchors = anchors;
  t.omega = omega;
  t.gamma = gamma;
  t.fail_penalty = fail_penalty;
  t.beta = beta;
  t.response = response;
  t.actions = actions;
  return t;
}

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

Rational rational_field(const json& v, const std::string& what) {
  try {
    if (v.is_string()) return planning::parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  } catch (const std::exception&) {
  }
  throw ConfigError(what + " must be an integer or a rational string such as \"5/2\"");
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError(where + ": unknown field '" + key + "'");
  }
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": field '" + key + "' is missing or has the wrong type");
  }
}

planning::PlanningModel load_side(const json& j, const fs::path& dir, const std::string& side,
                                  std::optional<GridMap>* map_out) {
  if (j.contains(side)) {
    try {
      return planning::load_model((dir / j[side].get<std::string>()).string());
    } catch (const planning::ParseError& e) {
      throw ConfigError((dir / j[side].get<std::string>()).string() + ":" + std::to_string(e.line()) + ":" +
                        std::to_string(e.column()) + ": " + e.message());
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what());
    }
  }
  if (j.contains(side + "_map")) {
    try {
      GridMap m = load_grid_map((dir / j[side + "_map"].get<std::string>()).string());
      if (map_out != nullptr) *map_out = m;
      return grid_model(m);
    } catch (const MapError& e) {
      throw ConfigError((dir / j[side + "_map"].get<std::string>()).string() + ": " + e.what());
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what());
    }
  }
  throw ConfigError("pair file needs '" + side + "' or '" + side + "_map'");
}

}  // namespace

Task load_task(const fs::path& path, const planning::PlannerOptions& planner) {
  json j = read_json(path);
  const std::string where = path.string();
  check_keys(j, {"label", "robot", "human", "robot_map", "human_map", "default_message_cost", "message_costs"},
             where);
  const fs::path dir = path.parent_path();
  std::optional<GridMap> human_map;
  auto robot = load_side(j, dir, "robot", nullptr);
  auto human = load_side(j, dir, "human", &human_map);
  std::string label = j.value("label", path.stem().string());

  Rational fallback{1};
  if (j.contains("default_message_cost")) fallback = rational_field(j["default_message_cost"], where + ": default_message_cost");
  // Price every message of the delta; explicit entries override the default.
  ModelPair probe(robot, human, {}, planner, label);
  reconcile::MessageCostTable costs;
  for (const auto& m : probe.delta().messages) costs[m.key()] = fallback;
  if (j.contains("message_costs")) {
    for (const auto& [key, value] : j["message_costs"].items()) {
      if (!costs.contains(key)) throw ConfigError(where + ": message '" + key + "' is not part of the model delta");
      costs[key] = rational_field(value, where + ": message cost");
    }
  }
  return Task{label, path, ModelPair(std::move(robot), std::move(human), costs, planner, label), human_map};
}

ScenarioConfig parse_scenario(const json& j, const fs::path& source) {
  const std::string where = source.string();
  check_keys(j,
             {"name", "levels", "omega", "gamma", "beta", "response", "metric", "fail_penalty", "balance_weight",
              "candidate_budget", "actions", "rounds", "monitoring_cost_per_round", "initial_level", "scoring",
              "sweep", "node_budget", "max_delta"},
             where);
  ScenarioConfig c;
  c.source = source;
  c.name = j.value("name", source.stem().string());
  const json& levels = j.at("levels");
  if (!levels.is_array() || levels.empty()) throw ConfigError(where + ": 'levels' must be a non-empty array");
  for (const auto& level : levels) {
    check_keys(level, {"pair", "anchor"}, where + ": level");
    c.pair_files.push_back(source.parent_path() / get<std::string>(level, "pair", where));
    c.anchors.push_back(get<double>(level, "anchor", where));
  }
  if (j.contains("omega") && !j["omega"].is_null()) c.omega = get<std::vector<double>>(j, "omega", where);
  c.gamma = j.value("gamma", c.gamma);
  c.beta = j.value("beta", c.beta);
  try {
    if (j.contains("response")) c.response = meta::parse_response_mode(j["response"].get<std::string>());
    if (j.contains("metric")) c.metric = reconcile::parse_metric(j["metric"].get<std::string>());
    if (j.contains("actions")) {
      c.actions.clear();
      for (const auto& a : j["actions"]) c.actions.push_back(reconcile::parse_strategy(a.get<std::string>()));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const meta::ScenarioError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  c.fail_penalty = j.value("fail_penalty", c.fail_penalty);
  if (j.contains("balance_weight")) c.balance_weight = rational_field(j["balance_weight"], where + ": balance_weight");
  c.candidate_budget = j.value("candidate_budget", c.candidate_budget);
  c.rounds = j.value("rounds", c.rounds);
  c.monitoring_cost_per_round = j.value("monitoring_cost_per_round", c.monitoring_cost_per_round);
  c.initial_level = j.value("initial_level", c.initial_level);
  c.node_budget = j.value("node_budget", c.node_budget);
  c.max_delta = j.value("max_delta", c.max_delta);
  if (j.contains("scoring")) {
    const json& s = j["scoring"];
    check_keys(s,
               {"monitor_success", "monitor_stop", "monitor_failure", "task_success", "label_bonus", "label_failure",
                "forfeit_label_bonus_on_failure"},
               where + ": scoring");
    auto& t = c.scoring;
    t.monitor_success = s.value("monitor_success", t.monitor_success);
    t.monitor_stop = s.value("monitor_stop", t.monitor_stop);
    t.monitor_failure = s.value("monitor_failure", t.monitor_failure);
    t.task_success = s.value("task_success", t.task_success);
    t.label_bonus = s.value("label_bonus", t.label_bonus);
    t.label_failure = s.value("label_failure", t.label_failure);
    t.forfeit_label_bonus_on_failure = s.value("forfeit_label_bonus_on_failure", t.forfeit_label_bonus_on_failure);
  }
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    check_keys(s, {"gamma", "omega_scale", "anchors", "task_order"}, where + ": sweep");
    if (s.contains("gamma")) c.sweep.gamma = s["gamma"].get<std::vector<double>>();
    if (s.contains("omega_scale")) c.sweep.omega_scale = s["omega_scale"].get<std::vector<double>>();
    if (s.contains("anchors")) c.sweep.anchors = s["anchors"].get<std::vector<std::vector<double>>>();
    if (s.contains("task_order")) c.sweep.task_order = s["task_order"].get<std::vector<std::vector<int>>>();
  }

  const int k = static_cast<int>(c.anchors.size());
  if (c.rounds < 1) throw ConfigError(where + ": rounds must be positive");
  if (c.initial_level < 1 || c.initial_level > k) throw ConfigError(where + ": initial_level out of range");
  if (c.monitoring_cost_per_round < 0) throw ConfigError(where + ": monitoring cost must be non-negative");
  if (c.candidate_budget < 1) throw ConfigError(where + ": candidate_budget must be positive");
  for (const auto& a : c.sweep.anchors) {
    if (static_cast<int>(a.size()) != k) throw ConfigError(where + ": sweep anchors need one value per level");
  }
  for (const auto& order : c.sweep.task_order) {
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < static_cast<int>(sorted.size()); ++i) {
      if (static_cast<int>(sorted.size()) != k || sorted[static_cast<std::size_t>(i)] != i) {
        throw ConfigError(where + ": each task_order must be a permutation of 0.." + std::to_string(k - 1));
      }
    }
  }
  try {
    meta::validate(c.trust_scenario());
  } catch (const meta::ScenarioError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  for (const auto& p : c.pair_files) {
    if (!fs::exists(p)) throw ConfigError(where + ": pair file '" + p.string() + "' does not exist");
  }
  return c;
}

ScenarioConfig load_scenario(const fs::path& path) { return parse_scenario(read_json(path), path); }

namespace {

void derive(PreparedScenario& p) {
  p.interventions.clear();
  for (int level = 1; level <= p.trust.k(); ++level) {
    const auto i = static_cast<std::size_t>(level - 1);
    // Every strategy gets an entry so baseline conditions can run strategies
    // the meta-policy is not allowed to pick.
    for (Strategy s : reconcile::kAllStrategies) {
      const auto& plan = p.triples[i].at(s);
      std::optional<std::size_t> stop;
      if (!plan.perfectly_explicable()) {
        const std::size_t n = plan.plan.size();
        stop = supervisor::stop_after(p.trust.anchor_at(level), n,
                                      p.surprises[i][meta::strategy_index(s)].value_or(n));
      }
      p.interventions[{level, s}] = stop;
    }
  }
  std::vector<ModelPair> pairs;
  for (const auto& t : p.tasks) pairs.push_back(t.pair);
  p.mdp = meta::build_mdp(p.trust, pairs, p.triples, p.interventions);
  p.policy = meta::solve(p.mdp);
}

}  // namespace

PreparedScenario prepare(const ScenarioConfig& config) {
  PreparedScenario p;
  p.config = config;
  p.trust = config.trust_scenario();
  planning::PlannerOptions planner;
  planner.node_budget = config.node_budget;
  reconcile::TripleOptions opts;
  opts.balance_weight = config.balance_weight;
  opts.candidate_budget = config.candidate_budget;
  opts.metric = config.metric;
  opts.limits.planner = planner;
  opts.limits.max_delta = config.max_delta;
  for (std::size_t i = 0; i < config.pair_files.size(); ++i) {
    p.tasks.push_back(load_task(config.pair_files[i], planner));
    p.triples.push_back(reconcile::strategy_triple(p.tasks.back().pair, opts));
    p.task_order.push_back(static_cast<int>(i));
    std::array<std::optional<std::size_t>, meta::kStrategyCount> s{};
    for (Strategy st : reconcile::kAllStrategies) {
      s[meta::strategy_index(st)] = supervisor::first_surprise(p.triples.back().at(st), p.tasks.back().pair, planner);
    }
    p.surprises.push_back(s);
  }
  derive(p);
  return p;
}

PreparedScenario reconfigure(const PreparedScenario& base, const meta::TrustScenario& trust,
                             const std::vector<int>& task_order) {
  PreparedScenario p;
  p.config = base.config;
  p.trust = trust;
  p.config.anchors = trust.anchors;
  p.config.omega = trust.omega;
  p.config.gamma = trust.gamma;
  p.task_order = task_order;
  for (int idx : task_order) {
    const auto i = static_cast<std::size_t>(idx);
    p.tasks.push_back(base.tasks.at(i));
    p.triples.push_back(base.triples.at(i));
    p.surprises.push_back(base.surprises.at(i));
  }
  derive(p);
  return p;
}

std::vector<std::string> strategy_names(const std::vector<Strategy>& s) {
  std::vector<std::string> out;
  for (Strategy x : s) out.push_back(meta::short_name(x));
  return out;
}

}  // namespace trustplan::harness
