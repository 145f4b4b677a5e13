// trustplan: command-line front end for planning, explanation, the trust
// meta-model, simulation and the live session service.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "trustplan/harness/session_log.hpp"
#include "trustplan/harness/simulate.hpp"
#include "trustplan/planning/model_io.hpp"
#include "trustplan/service/server.hpp"

using namespace trustplan;
using nlohmann::json;

namespace {

bool g_json = false;

void print(const json& j, const std::string& text) {
  if (g_json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << text;
  }
}

planning::Plan read_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open plan file '" + path + "'");
  planning::Plan plan;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string w;
    while (words >> w) plan.steps.push_back(w);
  }
  return plan;
}

json annotated_json(const reconcile::AnnotatedPlan& a) {
  json msgs = json::array();
  for (const auto& m : a.explanation) msgs.push_back(m.key());
  return {{"plan", a.plan.steps},
          {"explanation", msgs},
          {"explanation_cost", planning::format_rational(a.explanation_cost)},
          {"execution_cost", a.execution_cost.str()},
          {"explicability", a.explicability.str()}};
}

std::string annotated_text(const std::string& name, const reconcile::AnnotatedPlan& a) {
  std::ostringstream out;
  out << name << ": C_e " << a.execution_cost.str() << ", EX " << a.explicability.str() << ", "
      << a.plan.size() << " steps\n";
  out << "  plan: " << planning::to_string(a.plan) << "\n";
  if (!a.explanation.empty()) {
    out << "  explanation (cost " << planning::format_rational(a.explanation_cost) << "):\n";
    for (const auto& m : a.explanation) out << "    " << m.describe() << "\n";
  }
  return out.str();
}

int cmd_plan(const std::string& path, std::size_t budget) {
  auto model = planning::load_model(path);
  planning::PlannerOptions opts;
  opts.node_budget = budget;
  auto r = planning::optimal_plan(model, opts);
  if (!r) {
    print({{"solvable", false}}, "no plan\n");
    return 3;
  }
  std::ostringstream text;
  text << "cost " << planning::format_rational(r->cost) << "\n";
  for (const auto& s : r->plan.steps) text << s << "\n";
  print({{"solvable", true},
         {"cost", planning::format_rational(r->cost)},
         {"plan", r->plan.steps},
         {"expanded", r->expanded}},
        text.str());
  return 0;
}

int cmd_triple(const std::string& pair_path, const std::string& alpha, std::size_t budget, const std::string& metric) {
  auto task = harness::load_task(pair_path);
  reconcile::TripleOptions opts;
  opts.balance_weight = planning::parse_rational(alpha);
  opts.candidate_budget = budget;
  opts.metric = reconcile::parse_metric(metric);
  auto t = reconcile::strategy_triple(task.pair, opts);
  std::string text = "task " + task.label + "\n" + annotated_text("explicable", t.explicable) +
                     annotated_text("balanced", t.balanced) + annotated_text("optimal", t.optimal);
  print({{"task", task.label},
         {"explicable", annotated_json(t.explicable)},
         {"balanced", annotated_json(t.balanced)},
         {"optimal", annotated_json(t.optimal)},
         {"dominance", reconcile::dominance_holds(t)}},
        text);
  return 0;
}

int cmd_explain(const std::string& pair_path, const std::string& plan_path) {
  auto task = harness::load_task(pair_path);
  auto plan = read_plan(plan_path);
  const auto& pair = task.pair;
  auto robot = planning::validate_plan(pair.robot(), plan);
  auto human = planning::validate_plan(pair.human(), plan);
  auto ex = reconcile::explicability(plan, pair, {});
  json j = {{"robot_valid", robot.valid},
            {"human_valid", human.valid},
            {"robot_cost", planning::plan_cost(pair.robot(), plan).str()},
            {"explicability", ex.str()}};
  std::ostringstream text;
  text << "robot model: " << (robot.valid ? "valid" : "invalid") << ", cost "
       << planning::plan_cost(pair.robot(), plan).str() << "\n";
  text << "human model: " << (human.valid ? "valid" : "invalid at step " + std::to_string(human.fail_step.value_or(0))) << "\n";
  text << "explicability " << ex.str() << "\n";
  try {
    auto m = reconcile::mce(pair, plan);
    json keys = json::array();
    text << "minimally complete explanation (" << m.size() << " messages, cost "
         << planning::format_rational(pair.delta().cost_of(m)) << "):\n";
    for (const auto& msg : m) {
      keys.push_back(msg.key());
      text << "  " << msg.describe() << "\n";
    }
    j["mce"] = keys;
  } catch (const std::invalid_argument& e) {
    text << "no explanation: " << e.what() << "\n";
    j["mce"] = nullptr;
    j["mce_error"] = e.what();
  }
  print(j, text.str());
  return 0;
}

int cmd_solve(const std::string& path) {
  auto p = harness::prepare(harness::load_scenario(path));
  std::vector<reconcile::Strategy> always(static_cast<std::size_t>(p.trust.k()), reconcile::Strategy::Explicable);
  auto baseline = meta::evaluate_policy(p.mdp, always);
  std::ostringstream text;
  text << "scenario " << p.config.name << " (k=" << p.trust.k() << ", gamma " << p.trust.gamma << ")\n";
  for (int level = 1; level <= p.trust.k(); ++level) {
    const auto& t = p.triple_at(level);
    text << "level " << level << " task " << p.task_at(level).label << " omega " << p.trust.omega_at(level) << "\n";
    for (auto s : p.trust.actions) {
      const auto& row = p.mdp.row(level, s);
      text << "  " << meta::short_name(s) << ": C_e " << t.at(s).execution_cost.str() << " EX "
           << t.at(s).explicability.str() << " cost " << p.mdp.cost_of(level, s) << " row [";
      for (std::size_t i = 0; i < row.size(); ++i) text << (i ? " " : "") << row[i];
      text << "]\n";
    }
  }
  text << "policy " << meta::format_policy(p.policy.choice) << "\n";
  text << "value";
  for (double v : p.policy.reported_value) text << " " << v;
  text << "\nalways-explicable value";
  for (double v : baseline) text << " " << -v;
  text << "\n";
  json j = {{"mdp", meta::to_json(p.mdp)}, {"policy", meta::to_json(p.policy)}};
  std::vector<double> reported;
  for (double v : baseline) reported.push_back(-v);
  j["always_explicable"] = {{"value", baseline}, {"reported_value", reported}};
  print(j, text.str());
  return 0;
}

std::string trace_text(const harness::EpisodeTrace& t) {
  std::ostringstream out;
  out << "condition " << harness::to_string(t.condition) << " seed " << t.seed << "\n";
  for (const auto& r : t.rounds) {
    char line[256];
    std::snprintf(line, sizeof line, "round %2d level %d %-12s %s %-7s %-10s cost %.3f mon %.1f -> level %d points %d\n",
                  r.round, r.level, r.task.c_str(), meta::short_name(r.strategy).c_str(),
                  r.monitored ? "monitor" : "label",
                  r.stopped_at ? ("stop@" + std::to_string(*r.stopped_at)).c_str() : "complete",
                  r.execution_cost + r.penalty, r.monitoring_cost, r.next_level, harness::total_points(r.points));
    out << line;
  }
  char tail[160];
  std::snprintf(tail, sizeof tail, "total cost %.3f (execution %.3f, monitoring %.3f) points %d\n", t.total_cost(),
                t.cumulative_execution_cost, t.cumulative_monitoring_cost, t.total_points());
  out << tail;
  return out.str();
}

int cmd_simulate(const std::string& path, const std::string& condition, std::size_t seeds,
                 std::optional<std::uint64_t> seed, const std::string& source_text, const std::string& csv,
                 const std::string& log_dir) {
  auto p = harness::prepare(harness::load_scenario(path));
  auto source = harness::parse_policy_source(source_text);
  std::vector<harness::Condition> conditions;
  if (condition == "all") {
    conditions.assign(std::begin(harness::kAllConditions), std::end(harness::kAllConditions));
  } else {
    conditions.push_back(harness::parse_condition(condition));
  }
  if (seed) {
    json traces = json::array();
    std::string text;
    for (auto c : conditions) {
      auto t = harness::run_episode(p, c, *seed, source);
      traces.push_back(harness::to_json(t));
      text += trace_text(t);
      if (!log_dir.empty()) {
        std::filesystem::create_directories(log_dir);
        std::string id = "sim-" + harness::to_string(c) + "-" + std::to_string(*seed);
        std::ofstream out(std::filesystem::path(log_dir) / (id + ".jsonl"));
        for (const auto& line : harness::session_log_lines(t, id)) out << line << "\n";
      }
    }
    print(traces.size() == 1 ? traces[0] : traces, text);
    return 0;
  }
  std::vector<std::uint64_t> seed_list;
  for (std::size_t i = 1; i <= seeds; ++i) seed_list.push_back(i);
  if (!log_dir.empty()) {
    std::filesystem::create_directories(log_dir);
    for (auto c : conditions) {
      for (auto s : seed_list) {
        auto t = harness::run_episode(p, c, s, source);
        std::string id = "sim-" + harness::to_string(c) + "-" + std::to_string(s);
        std::ofstream out(std::filesystem::path(log_dir) / (id + ".jsonl"));
        for (const auto& line : harness::session_log_lines(t, id)) out << line << "\n";
      }
    }
  }
  auto summary = harness::compare_conditions(p, seed_list, source);
  if (condition != "all") {
    // Keep the requested condition only.
    auto keep = harness::parse_condition(condition);
    harness::ComparisonSummary one;
    one.episodes = summary.episodes;
    for (std::size_t i = 0; i < summary.conditions.size(); ++i) {
      if (summary.conditions[i].condition == keep) {
        one.conditions.push_back(summary.conditions[i]);
        one.trust_by_round.push_back(summary.trust_by_round[i]);
      }
    }
    summary = one;
  }
  if (!csv.empty()) {
    std::ofstream out(csv);
    out << harness::format_csv(summary);
  }
  print(harness::to_json(summary), harness::format_table(summary));
  return 0;
}

int cmd_sweep(const std::string& path, const std::vector<std::string>& axis_names) {
  auto p = harness::prepare(harness::load_scenario(path));
  std::vector<harness::SweepAxis> axes;
  for (const auto& a : axis_names) axes.push_back(harness::parse_sweep_axis(a));
  if (axes.empty()) axes = {harness::SweepAxis::Gamma, harness::SweepAxis::Omega, harness::SweepAxis::Anchors};
  auto r = harness::sweep(p, axes);
  print(harness::to_json(r), harness::format_table(r));
  return 0;
}

int cmd_estimate(const std::vector<std::string>& logs, double alpha, int k) {
  std::vector<supervisor::MonitorObservation> obs;
  for (const auto& path : logs) {
    auto events = harness::read_log(path);
    auto more = harness::monitor_observations(events);
    obs.insert(obs.end(), more.begin(), more.end());
  }
  if (k <= 0) {
    k = 1;
    for (const auto& o : obs) k = std::max(k, o.level);
  }
  auto e = supervisor::estimate_omega(obs, alpha, k);
  std::ostringstream text;
  json levels = json::array();
  for (int i = 0; i < k; ++i) {
    const auto u = static_cast<std::size_t>(i);
    char line[160];
    std::snprintf(line, sizeof line, "level %d omega %.4f (%zu of %zu monitored)%s\n", i + 1, e.per_level[u],
                  e.monitored[u], e.total[u], e.low_confidence[u] ? " low confidence" : "");
    text << line;
    levels.push_back({{"level", i + 1},
                      {"omega", e.per_level[u]},
                      {"monitored", e.monitored[u]},
                      {"total", e.total[u]},
                      {"low_confidence", static_cast<bool>(e.low_confidence[u])}});
  }
  print({{"alpha", alpha}, {"levels", levels}}, text.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-aware planning toolkit"};
  app.require_subcommand(1);
  app.add_flag("--json", g_json, "Emit canonical JSON");

  std::string model_path, pair_path, plan_path, scenario_path, alpha = "1", metric = "human-model-diff";
  std::size_t node_budget = 2'000'000, candidate_budget = 5, seeds = 30;
  std::optional<std::uint64_t> seed;
  std::string condition = "all", source = "fixed", csv, log_dir;
  std::vector<std::string> axes, logs;
  double omega_alpha = 1.0;
  int levels = 0;
  int port = 8080;
  std::string host = "127.0.0.1";

  auto* plan = app.add_subcommand("plan", "Cost-optimal plan for a model file");
  plan->add_option("model", model_path)->required()->check(CLI::ExistingFile);
  plan->add_option("--budget", node_budget, "Search node budget");

  auto* triple = app.add_subcommand("triple", "Explicable, balanced and optimal strategies for a pair file");
  triple->add_option("pair", pair_path)->required()->check(CLI::ExistingFile);
  triple->add_option("--alpha", alpha, "Balance weight");
  triple->add_option("--candidates", candidate_budget, "Robot plans considered for the balanced strategy");
  triple->add_option("--metric", metric, "human-model-diff or robot-model-diff");

  auto* explain = app.add_subcommand("explain", "Explicability and minimal explanation of a plan");
  explain->add_option("pair", pair_path)->required()->check(CLI::ExistingFile);
  explain->add_option("plan", plan_path)->required()->check(CLI::ExistingFile);

  auto* solve = app.add_subcommand("solve-meta", "Build and solve the trust meta-model of a scenario");
  solve->add_option("scenario", scenario_path)->required()->check(CLI::ExistingFile);

  auto* simulate = app.add_subcommand("simulate", "Simulate supervised episodes");
  simulate->add_option("scenario", scenario_path)->required()->check(CLI::ExistingFile);
  simulate->add_option("--condition", condition, "trust-aware, always-explicable, always-optimal, random or all");
  auto* seeds_opt = simulate->add_option("--seeds", seeds, "Number of seeded episodes per condition");
  simulate->add_option("--seed", seed, "Run a single episode with this seed")->excludes(seeds_opt);
  simulate->add_option("--policy-source", source, "fixed or recomputed");
  simulate->add_option("--csv", csv, "Write the summary table as CSV");
  simulate->add_option("--log-dir", log_dir, "Write session logs of the simulated episodes");

  auto* sweep = app.add_subcommand("sweep", "Policy table over a parameter grid");
  sweep->add_option("scenario", scenario_path)->required()->check(CLI::ExistingFile);
  sweep->add_option("--axis", axes, "gamma, omega, anchors or task-order (repeatable)");

  auto* estimate = app.add_subcommand("estimate-omega", "Monitoring probability per trust level from session logs");
  estimate->add_option("logs", logs)->required()->check(CLI::ExistingFile);
  estimate->add_option("--alpha", omega_alpha, "Prior pseudo-count");
  estimate->add_option("--levels", levels, "Number of trust levels (default: highest level seen)");

  auto* serve = app.add_subcommand("serve", "Run the live session HTTP service");
  serve->add_option("--scenario", scenario_path)->required()->check(CLI::ExistingFile);
  serve->add_option("--port", port);
  serve->add_option("--host", host);
  serve->add_option("--log-dir", log_dir, "Directory for session logs")->default_val("sessions");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*plan) return cmd_plan(model_path, node_budget);
    if (*triple) return cmd_triple(pair_path, alpha, candidate_budget, metric);
    if (*explain) return cmd_explain(pair_path, plan_path);
    if (*solve) return cmd_solve(scenario_path);
    if (*simulate) return cmd_simulate(scenario_path, condition, seeds, seed, source, csv, log_dir);
    if (*sweep) return cmd_sweep(scenario_path, axes);
    if (*estimate) return cmd_estimate(logs, omega_alpha, levels);
    if (*serve) {
      auto prepared = harness::prepare(harness::load_scenario(scenario_path));
      service::ServiceOptions opts;
      opts.log_dir = log_dir;
      service::Server server(std::move(prepared), opts);
      std::cerr << "listening on " << host << ":" << port << "\n";
      return server.listen(host, port) ? 0 : 1;
    }
  } catch (const planning::ParseError& e) {
    std::cerr << "error: line " << e.line() << ", column " << e.column() << ": " << e.message() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
