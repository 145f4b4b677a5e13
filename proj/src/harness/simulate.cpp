#include "trustplan/harness/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "trustplan/supervisor/supervisor.hpp"

namespace trustplan::harness {

using nlohmann::json;
using supervisor::Rng;

std::string to_string(Condition c) {
  switch (c) {
    case Condition::TrustAware: return "trust-aware";
    case Condition::AlwaysExplicable: return "always-explicable";
    case Condition::AlwaysOptimal: return "always-optimal";
    case Condition::Random: return "random";
  }
  return "?";
}

Condition parse_condition(const std::string& text) {
  for (Condition c : kAllConditions) {
    if (to_string(c) == text) return c;
  }
  throw ValidationError("unknown condition '" + text +
                        "' (expected trust-aware, always-explicable, always-optimal or random)");
}

std::string to_string(PolicySource s) { return s == PolicySource::Fixed ? "fixed" : "recomputed"; }

PolicySource parse_policy_source(const std::string& text) {
  if (text == "fixed") return PolicySource::Fixed;
  if (text == "recomputed") return PolicySource::Recomputed;
  throw ValidationError("policy source must be 'fixed' or 'recomputed'");
}

int EpisodeTrace::total_points() const {
  int sum = 0;
  for (const auto& r : rounds) sum += harness::total_points(r.points);
  return sum;
}

EpisodeTrace run_episode(const PreparedScenario& p, Condition condition, std::uint64_t seed, PolicySource source) {
  const auto& trust = p.trust;
  const int k = trust.k();
  Rng rng(seed);
  EpisodeTrace trace;
  trace.condition = condition;
  trace.seed = seed;
  int level = p.config.initial_level;
  double scalar = meta::level_midpoint(level, k);

  for (int round = 1; round <= p.config.rounds; ++round) {
    Strategy strategy = Strategy::Explicable;
    switch (condition) {
      case Condition::TrustAware:
        if (source == PolicySource::Fixed) {
          strategy = p.policy.choice.at(static_cast<std::size_t>(level - 1));
        } else {
          strategy = meta::solve(p.mdp).choice.at(static_cast<std::size_t>(level - 1));
        }
        break;
      case Condition::AlwaysExplicable: strategy = Strategy::Explicable; break;
      case Condition::AlwaysOptimal: strategy = Strategy::Optimal; break;
      case Condition::Random: strategy = rng.bernoulli(0.5) ? Strategy::Explicable : Strategy::Optimal; break;
    }
    const Task& task = p.task_at(level);
    const auto& plan = p.triple_at(level).at(strategy);

    RoundOutcome r;
    r.round = round;
    r.level = level;
    r.task = task.label;
    r.strategy = strategy;
    r.monitored = supervisor::monitor_decision(level, trust, rng);
    std::optional<std::size_t> stop;
    if (r.monitored) stop = p.interventions.at({level, strategy});
    const bool stopped = stop && *stop < plan.plan.size();
    if (stopped) {
      r.stopped_at = stop;
      r.goal_reached = false;
      r.execution_cost = planning::to_double(plan.explanation_cost) +
                         planning::prefix_cost(task.pair.robot(), plan.plan, *stop).as_double();
      r.penalty = trust.fail_penalty;
    } else {
      r.execution_cost = plan.execution_cost.as_double();
    }
    r.monitoring_cost = r.monitored ? p.config.monitoring_cost_per_round : 0.0;
    r.next_level = supervisor::sample_trust_transition(level, plan, r.monitored, stopped, trust, rng);
    if (r.next_level != level) scalar = meta::level_midpoint(r.next_level, k);
    r.trust_scalar = scalar;
    r.points = score_round(r.monitored ? Choice::Monitor : Choice::Label,
                           stopped ? RoundResult::Stopped : RoundResult::Success, p.config.scoring);

    trace.cumulative_execution_cost += r.execution_cost + r.penalty;
    trace.cumulative_monitoring_cost += r.monitoring_cost;
    trace.trust_levels.push_back(r.next_level);
    trace.trust_scalars.push_back(r.trust_scalar);
    level = r.next_level;
    trace.rounds.push_back(std::move(r));
  }
  return trace;
}

namespace {

json points_json(const std::vector<PointEntry>& entries) {
  json out = json::array();
  for (const auto& e : entries) out.push_back({{"reason", e.reason}, {"points", e.points}});
  return out;
}

}  // namespace

json to_json(const EpisodeTrace& t) {
  json rounds = json::array();
  for (const auto& r : t.rounds) {
    rounds.push_back({{"round", r.round},
                      {"level", r.level},
                      {"task", r.task},
                      {"strategy", meta::short_name(r.strategy)},
                      {"monitored", r.monitored},
                      {"stopped_at", r.stopped_at ? json(*r.stopped_at) : json(nullptr)},
                      {"goal_reached", r.goal_reached},
                      {"execution_cost", r.execution_cost},
                      {"penalty", r.penalty},
                      {"monitoring_cost", r.monitoring_cost},
                      {"next_level", r.next_level},
                      {"trust_scalar", r.trust_scalar},
                      {"points", points_json(r.points)}});
  }
  return {{"condition", to_string(t.condition)},
          {"seed", t.seed},
          {"rounds", rounds},
          {"cumulative_execution_cost", t.cumulative_execution_cost},
          {"cumulative_monitoring_cost", t.cumulative_monitoring_cost},
          {"total_cost", t.total_cost()},
          {"total_points", t.total_points()},
          {"trust_levels", t.trust_levels},
          {"trust_scalars", t.trust_scalars}};
}

std::vector<std::string> session_log_lines(const EpisodeTrace& trace, const std::string& session_id) {
  std::vector<std::string> lines;
  std::int64_t ts = 0;
  auto emit = [&](int round, const std::string& kind, json payload) {
    json line = {{"ts", ts++}, {"session", session_id}, {"round", round}, {"kind", kind}, {"payload", payload}};
    lines.push_back(line.dump());
  };
  emit(0, "created", {{"condition", to_string(trace.condition)}, {"simulated", true}, {"seed", trace.seed}});
  for (const auto& r : trace.rounds) {
    emit(r.round, "choice",
         {{"choice", r.monitored ? "monitor" : "label"},
          {"level", r.level},
          {"task", r.task},
          {"strategy", meta::short_name(r.strategy)}});
    if (r.stopped_at) emit(r.round, "stop", {{"step", *r.stopped_at}});
    emit(r.round, "outcome",
         {{"result", r.stopped_at ? "stopped" : "success"},
          {"points", points_json(r.points)},
          {"total", harness::total_points(r.points)}});
    emit(r.round, "advance", {{"level", r.next_level}, {"scalar", r.trust_scalar}});
  }
  return lines;
}

namespace {

Stat stat_of(const std::vector<double>& xs) {
  Stat s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

double quantile(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  double pos = q * static_cast<double>(xs.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  auto hi = std::min(lo + 1, xs.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return xs[lo] * (1 - frac) + xs[hi] * frac;
}

std::string fixed(double x, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

}  // namespace

DifferenceCI bootstrap_difference(const std::vector<double>& a, const std::vector<double>& b, double level,
                                  std::size_t resamples, std::uint64_t seed) {
  if (a.empty() || b.empty()) throw std::invalid_argument("bootstrap needs two non-empty samples");
  DifferenceCI ci;
  ci.mean_difference = stat_of(a).mean - stat_of(b).mean;
  Rng rng(seed);
  auto resample_mean = [&](const std::vector<double>& xs) {
    double sum = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(xs.size()));
      sum += xs[std::min(j, xs.size() - 1)];
    }
    return sum / static_cast<double>(xs.size());
  };
  std::vector<double> diffs;
  diffs.reserve(resamples);
  for (std::size_t r = 0; r < resamples; ++r) diffs.push_back(resample_mean(a) - resample_mean(b));
  double tail = (1.0 - level) / 2.0;
  ci.lower = quantile(diffs, tail);
  ci.upper = quantile(diffs, 1.0 - tail);
  return ci;
}

const ConditionSummary& ComparisonSummary::at(Condition c) const {
  for (const auto& s : conditions) {
    if (s.condition == c) return s;
  }
  throw std::out_of_range("condition not in summary");
}

ComparisonSummary compare_conditions(const PreparedScenario& p, const std::vector<std::uint64_t>& seeds,
                                     PolicySource source, std::size_t resamples) {
  ComparisonSummary out;
  out.episodes = seeds.size();
  std::map<Condition, std::vector<double>> total, final_trust;
  for (Condition c : kAllConditions) {
    std::vector<double> exec, mon, level, points;
    std::vector<double> by_round(static_cast<std::size_t>(p.config.rounds), 0.0);
    for (auto seed : seeds) {
      auto t = run_episode(p, c, seed, source);
      total[c].push_back(t.total_cost());
      exec.push_back(t.cumulative_execution_cost);
      mon.push_back(t.cumulative_monitoring_cost);
      final_trust[c].push_back(t.trust_scalars.back());
      level.push_back(t.trust_levels.back());
      points.push_back(t.total_points());
      for (std::size_t r = 0; r < by_round.size(); ++r) by_round[r] += t.trust_scalars[r];
    }
    for (auto& x : by_round) x /= static_cast<double>(std::max<std::size_t>(seeds.size(), 1));
    ConditionSummary s;
    s.condition = c;
    s.total_cost = stat_of(total[c]);
    s.execution_cost = stat_of(exec);
    s.monitoring_cost = stat_of(mon);
    s.final_trust = stat_of(final_trust[c]);
    s.final_level = stat_of(level);
    s.points = stat_of(points);
    out.conditions.push_back(s);
    out.trust_by_round.push_back(by_round);
  }
  if (!seeds.empty()) {
    auto add = [&](std::string label, const std::vector<double>& a, const std::vector<double>& b, std::uint64_t s) {
      auto ci = bootstrap_difference(a, b, 0.99, resamples, s);
      ci.label = std::move(label);
      out.differences.push_back(ci);
    };
    add("total_cost trust-aware - always-explicable", total[Condition::TrustAware],
        total[Condition::AlwaysExplicable], 1);
    add("final_trust trust-aware - always-optimal", final_trust[Condition::TrustAware],
        final_trust[Condition::AlwaysOptimal], 2);
    add("final_trust trust-aware - random", final_trust[Condition::TrustAware], final_trust[Condition::Random], 3);
  }
  return out;
}

std::string format_table(const ComparisonSummary& s) {
  std::ostringstream out;
  out << "episodes " << s.episodes << "\n";
  out << "condition          total_cost(mean±std)   final_trust(mean±std)  final_level  points\n";
  for (const auto& c : s.conditions) {
    char line[256];
    std::snprintf(line, sizeof line, "%-18s %9.3f ± %-9.3f   %6.3f ± %-6.3f        %6.3f  %9.1f\n",
                  to_string(c.condition).c_str(), c.total_cost.mean, c.total_cost.std, c.final_trust.mean,
                  c.final_trust.std, c.final_level.mean, c.points.mean);
    out << line;
  }
  for (const auto& d : s.differences) {
    out << d.label << ": " << fixed(d.mean_difference) << " [" << fixed(d.lower) << ", " << fixed(d.upper)
        << "] 99% CI" << (d.excludes_zero() ? "" : " (includes 0)") << "\n";
  }
  return out.str();
}

std::string format_csv(const ComparisonSummary& s) {
  std::ostringstream out;
  out << "condition,total_cost_mean,total_cost_std,execution_cost_mean,monitoring_cost_mean,final_trust_mean,"
         "final_trust_std,final_level_mean,points_mean\n";
  for (const auto& c : s.conditions) {
    out << to_string(c.condition) << "," << fixed(c.total_cost.mean, 6) << "," << fixed(c.total_cost.std, 6) << ","
        << fixed(c.execution_cost.mean, 6) << "," << fixed(c.monitoring_cost.mean, 6) << ","
        << fixed(c.final_trust.mean, 6) << "," << fixed(c.final_trust.std, 6) << "," << fixed(c.final_level.mean, 6)
        << "," << fixed(c.points.mean, 6) << "\n";
  }
  return out.str();
}

json to_json(const ComparisonSummary& s) {
  json conditions = json::array();
  for (std::size_t i = 0; i < s.conditions.size(); ++i) {
    const auto& c = s.conditions[i];
    auto st = [](const Stat& x) { return json{{"mean", x.mean}, {"std", x.std}}; };
    conditions.push_back({{"condition", to_string(c.condition)},
                          {"total_cost", st(c.total_cost)},
                          {"execution_cost", st(c.execution_cost)},
                          {"monitoring_cost", st(c.monitoring_cost)},
                          {"final_trust", st(c.final_trust)},
                          {"final_level", st(c.final_level)},
                          {"points", st(c.points)},
                          {"trust_by_round", s.trust_by_round[i]}});
  }
  json diffs = json::array();
  for (const auto& d : s.differences) {
    diffs.push_back({{"label", d.label},
                     {"mean_difference", d.mean_difference},
                     {"lower", d.lower},
                     {"upper", d.upper},
                     {"excludes_zero", d.excludes_zero()}});
  }
  return {{"episodes", s.episodes}, {"conditions", conditions}, {"differences", diffs}};
}

SweepAxis parse_sweep_axis(const std::string& text) {
  if (text == "gamma") return SweepAxis::Gamma;
  if (text == "omega") return SweepAxis::Omega;
  if (text == "anchors") return SweepAxis::Anchors;
  if (text == "task-order") return SweepAxis::TaskOrder;
  throw ValidationError("unknown sweep axis '" + text + "' (expected gamma, omega, anchors or task-order)");
}

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::Gamma: return "gamma";
    case SweepAxis::Omega: return "omega";
    case SweepAxis::Anchors: return "anchors";
    case SweepAxis::TaskOrder: return "task-order";
  }
  return "?";
}

SweepGrid default_grid(const PreparedScenario& p) {
  SweepGrid g = p.config.sweep;
  if (g.gamma.empty()) g.gamma = {0.8, 0.9, 0.95};
  if (g.omega_scale.empty()) g.omega_scale = {0.9, 1.0, 1.1};
  if (g.anchors.empty()) g.anchors = {p.config.anchors};
  if (g.task_order.empty()) {
    std::vector<int> order(p.tasks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    do {
      g.task_order.push_back(order);
    } while (std::next_permutation(order.begin(), order.end()));
  }
  return g;
}

SweepResult sweep(const PreparedScenario& p, const std::vector<SweepAxis>& axes) {
  auto on = [&](SweepAxis a) { return std::find(axes.begin(), axes.end(), a) != axes.end(); };
  SweepGrid grid = default_grid(p);
  std::vector<int> identity(p.tasks.size());
  for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = static_cast<int>(i);
  std::vector<double> gammas = on(SweepAxis::Gamma) ? grid.gamma : std::vector<double>{p.config.gamma};
  std::vector<double> scales = on(SweepAxis::Omega) ? grid.omega_scale : std::vector<double>{1.0};
  auto anchors = on(SweepAxis::Anchors) ? grid.anchors : std::vector<std::vector<double>>{p.config.anchors};
  auto orders = on(SweepAxis::TaskOrder) ? grid.task_order : std::vector<std::vector<int>>{identity};

  SweepResult result;
  std::map<std::string, std::size_t> counts;
  std::map<std::string, std::vector<Strategy>> by_name;
  std::vector<std::string> first_seen;
  for (double gamma : gammas) {
    for (double scale : scales) {
      for (const auto& a : anchors) {
        for (const auto& order : orders) {
          meta::TrustScenario t = p.config.trust_scenario();
          t.gamma = gamma;
          t.anchors = a;
          std::vector<double> omega;
          for (int level = 1; level <= t.k(); ++level) {
            double base = p.config.omega.empty() ? 1.0 - a[static_cast<std::size_t>(level - 1)]
                                                 : p.config.omega[static_cast<std::size_t>(level - 1)];
            omega.push_back(std::clamp(base * scale, 0.0, 1.0));
          }
          t.omega = omega;
          auto variant = reconfigure(p, t, order);
          SweepPoint point{gamma, scale, a, order, variant.policy.choice, variant.policy.value};
          std::string name = meta::format_policy(point.policy);
          if (counts[name]++ == 0) {
            first_seen.push_back(name);
            by_name[name] = point.policy;
          }
          result.points.push_back(std::move(point));
        }
      }
    }
  }
  for (const auto& name : first_seen) {
    if (counts[name] > result.modal_count) {
      result.modal_count = counts[name];
      result.modal_policy = by_name[name];
    }
  }
  return result;
}

std::string format_table(const SweepResult& r) {
  std::ostringstream out;
  out << "gamma  omega_scale  anchors                  task_order  policy\n";
  for (const auto& p : r.points) {
    std::string anchors, order;
    for (double a : p.anchors) anchors += (anchors.empty() ? "" : ",") + fixed(a, 2);
    for (int o : p.task_order) order += (order.empty() ? "" : ",") + std::to_string(o);
    char line[256];
    std::snprintf(line, sizeof line, "%-6s %-12s %-24s %-11s %s\n", fixed(p.gamma, 2).c_str(),
                  fixed(p.omega_scale, 2).c_str(), anchors.c_str(), order.c_str(),
                  meta::format_policy(p.policy).c_str());
    out << line;
  }
  out << "modal policy " << meta::format_policy(r.modal_policy) << " (" << r.modal_count << " of "
      << r.points.size() << " points)\n";
  return out.str();
}

json to_json(const SweepResult& r) {
  json points = json::array();
  for (const auto& p : r.points) {
    points.push_back({{"gamma", p.gamma},
                      {"omega_scale", p.omega_scale},
                      {"anchors", p.anchors},
                      {"task_order", p.task_order},
                      {"policy", strategy_names(p.policy)},
                      {"value", p.value}});
  }
  return {{"points", points}, {"modal_policy", strategy_names(r.modal_policy)}, {"modal_count", r.modal_count}};
}

}  // namespace trustplan::harness
