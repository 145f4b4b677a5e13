#include <doctest.h>

#include <cmath>
#include <random>

#include "support/fixtures.hpp"
#include "trustplan/meta/mdp.hpp"

using namespace trustplan;
using namespace trustplan::meta;
using planning::Rational;
using planning::Score;
using reconcile::ModelPair;
using reconcile::StrategyTriple;
namespace fx = trustplan::testing;

namespace {

constexpr int kSteps = 10;

TrustScenario four_levels() {
  TrustScenario s;
  s.anchors = {0.0, 0.26, 0.51, 0.76};
  s.fail_penalty = 50;
  return s;
}

struct Instance {
  TrustScenario scenario;
  std::vector<ModelPair> tasks;
  std::vector<StrategyTriple> triples;
  InterventionMap stops;
};

Instance uniform_instance(TrustScenario s, std::int64_t c_exp, std::int64_t c_bal, std::int64_t c_opt,
                          Score ex_bal, Score ex_opt, std::size_t stop) {
  Instance in;
  in.scenario = std::move(s);
  for (int level = 1; level <= in.scenario.k(); ++level) {
    in.tasks.emplace_back(fx::corridor(kSteps), fx::corridor(kSteps));
    in.triples.push_back(fx::synthetic_triple(kSteps, c_exp, c_bal, c_opt, ex_bal, ex_opt));
    in.stops[{level, Strategy::Explicable}] = std::nullopt;
    in.stops[{level, Strategy::Balanced}] = stop;
    in.stops[{level, Strategy::Optimal}] = stop;
  }
  return in;
}

TrustMDP build(const Instance& in) { return build_mdp(in.scenario, in.tasks, in.triples, in.stops); }

Instance random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kd(2, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Instance in;
  const int k = kd(rng);
  std::vector<double> anchors;
  for (int i = 0; i < k; ++i) anchors.push_back(u(rng));
  std::sort(anchors.begin(), anchors.end());
  for (int i = 1; i < k; ++i) {
    if (anchors[i] <= anchors[i - 1]) anchors[i] = std::min(1.0, anchors[i - 1] + 1e-3);
  }
  in.scenario.anchors = anchors;
  in.scenario.gamma = u(rng) * 0.99;
  in.scenario.fail_penalty = std::floor(u(rng) * 100);
  in.scenario.beta = 0.1 + u(rng) * 2;
  in.scenario.response = u(rng) < 0.5 ? ResponseMode::Binary : ResponseMode::Boltzmann;
  std::uniform_int_distribution<int> cost(1, 30);
  std::uniform_int_distribution<int> stop(0, kSteps);
  for (int level = 1; level <= k; ++level) {
    int c_opt = cost(rng);
    int c_bal = c_opt + cost(rng) / 3;
    int c_exp = c_bal + cost(rng);
    auto ex = [&]() { return u(rng) < 0.3 ? Score::negative_infinity() : Score(Rational(-cost(rng))); };
    in.tasks.emplace_back(fx::corridor(kSteps), fx::corridor(kSteps));
    in.triples.push_back(fx::synthetic_triple(kSteps, c_exp, c_bal, c_opt, ex(), ex()));
    in.stops[{level, Strategy::Explicable}] = std::nullopt;
    in.stops[{level, Strategy::Balanced}] = static_cast<std::size_t>(stop(rng));
    in.stops[{level, Strategy::Optimal}] = static_cast<std::size_t>(stop(rng));
  }
  return in;
}

/// Policy value by fixed-point iteration, independent of the linear solver.
std::vector<double> iterate_policy(const TrustMDP& mdp, const std::vector<Strategy>& choice) {
  std::vector<double> v(static_cast<std::size_t>(mdp.k), 0.0);
  for (int it = 0; it < 100000; ++it) {
    std::vector<double> next(v.size());
    double change = 0;
    for (int s = 1; s <= mdp.k; ++s) {
      const auto& row = mdp.row(s, choice[s - 1]);
      double x = mdp.cost_of(s, choice[s - 1]);
      for (std::size_t t = 0; t < v.size(); ++t) x += mdp.gamma * row[t] * v[t];
      next[s - 1] = x;
      change = std::max(change, std::abs(x - v[s - 1]));
    }
    v = next;
    if (change < 1e-13) break;
  }
  return v;
}

}  // namespace

TEST_CASE("explicability response") {
  CHECK(explicability_response(Score(), 0.5, ResponseMode::Boltzmann) == 1.0);
  CHECK(explicability_response(Score::negative_infinity(), 0.5, ResponseMode::Boltzmann) == 0.0);
  CHECK(explicability_response(Score(Rational(-3)), 0.5, ResponseMode::Boltzmann) ==
        doctest::Approx(0.22313).epsilon(1e-5));
  CHECK(explicability_response(Score(), 2.0, ResponseMode::Binary) == 1.0);
  CHECK(explicability_response(Score(Rational(-1, 4)), 2.0, ResponseMode::Binary) == 0.0);

  double last = 0.0;
  for (int i = 40; i >= 0; --i) {
    double p = explicability_response(Score(Rational(-i, 4)), 0.7, ResponseMode::Boltzmann);
    CHECK(p > last);
    last = p;
  }
}

TEST_CASE("trust level intervals") {
  CHECK(level_of(0.0, 4) == 1);
  CHECK(level_of(0.25, 4) == 1);
  CHECK(level_of(0.250001, 4) == 2);
  CHECK(level_of(0.5, 4) == 2);
  CHECK(level_of(0.75, 4) == 3);
  CHECK(level_of(0.750001, 4) == 4);
  CHECK(level_of(1.0, 4) == 4);
  CHECK_THROWS(level_of(1.5, 4));
  int last = 1;
  for (int i = 0; i <= 1000; ++i) {
    int l = level_of(i / 1000.0, 5);
    CHECK(l >= last);
    last = l;
  }
  for (int level = 1; level <= 4; ++level) CHECK(level_of(level_midpoint(level, 4), 4) == level);
}

TEST_CASE("scenario validation") {
  TrustScenario s = four_levels();
  CHECK_NOTHROW(validate(s));
  auto broken = s;
  broken.anchors = {0.5};
  CHECK_THROWS_AS(validate(broken), ScenarioError);
  broken = s;
  broken.anchors = {0.0, 0.3, 0.3, 0.9};
  CHECK_THROWS_AS(validate(broken), ScenarioError);
  broken = s;
  broken.omega = {0.2, 0.5, 0.1, 0.0};
  CHECK_THROWS_AS(validate(broken), ScenarioError);
  broken = s;
  broken.gamma = 1.0;
  CHECK_THROWS_AS(validate(broken), ScenarioError);
  broken = s;
  broken.omega = {1.0, 0.5};
  CHECK_THROWS_AS(validate(broken), ScenarioError);
  CHECK(s.omega_at(2) == doctest::Approx(0.74));
}

TEST_CASE("transition rows") {
  auto in = uniform_instance(four_levels(), 20, 15, 10, Score(Rational(-2)), Score::negative_infinity(), 2);
  TrustMDP mdp = build(in);
  SUBCASE("optimal action at level 2") {
    const auto& row = mdp.row(2, Strategy::Optimal);
    CHECK(row[0] == doctest::Approx(0.74));
    CHECK(row[1] == doctest::Approx(0.0));
    CHECK(row[2] == doctest::Approx(0.26));
    CHECK(row[3] == 0.0);
  }
  SUBCASE("optimal action at the top level") {
    const auto& row = mdp.row(4, Strategy::Optimal);
    CHECK(row[3] == doctest::Approx(0.76));
    CHECK(row[2] == doctest::Approx(0.24));
  }
  SUBCASE("optimal action at the bottom level folds down into stay") {
    const auto& row = mdp.row(1, Strategy::Optimal);
    CHECK(row[0] == doctest::Approx(1.0));
  }
  SUBCASE("explicable action moves up one level") {
    for (int level = 1; level <= 4; ++level) {
      const auto& row = mdp.row(level, Strategy::Explicable);
      for (int t = 1; t <= 4; ++t) CHECK(row[t - 1] == (t == std::min(level + 1, 4) ? 1.0 : 0.0));
    }
  }
  SUBCASE("costs mix execution and monitored outcomes") {
    // Level 2, omega 0.74: stopped after two unit steps plus the penalty.
    CHECK(mdp.cost_of(2, Strategy::Optimal) == doctest::Approx(0.26 * 10 + 0.74 * (2 + 50)));
    CHECK(mdp.cost_of(3, Strategy::Explicable) == doctest::Approx(20));
  }
}

TEST_CASE("rows are stochastic on random scenarios") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 200; ++i) {
    auto in = random_instance(rng);
    TrustMDP mdp = build(in);
    for (int s = 1; s <= mdp.k; ++s) {
      for (Strategy a : mdp.actions) {
        double sum = 0;
        for (double p : mdp.row(s, a)) {
          CHECK(p >= 0.0);
          CHECK(p <= 1.0);
          sum += p;
        }
        CHECK(std::abs(sum - 1.0) < 1e-9);
        CHECK(mdp.cost_of(s, a) >= 0.0);
      }
    }
  }
}

TEST_CASE("higher explicability never lowers the chance of keeping trust") {
  // EX = 0 is the perfectly explicable case, which moves up instead.
  for (int e = 1; e < 20; ++e) {
    auto lo = uniform_instance(four_levels(), 20, 15, 10, Score(Rational(-e - 1)), Score(Rational(-e - 1)), 3);
    auto hi = uniform_instance(four_levels(), 20, 15, 10, Score(Rational(-e)), Score(Rational(-e)), 3);
    lo.scenario.response = hi.scenario.response = ResponseMode::Boltzmann;
    lo.scenario.beta = hi.scenario.beta = 0.3;
    TrustMDP a = build(lo);
    TrustMDP b = build(hi);
    for (int s = 2; s <= 3; ++s) {
      CHECK(b.row(s, Strategy::Optimal)[s - 1] >= a.row(s, Strategy::Optimal)[s - 1]);
      CHECK(b.row(s, Strategy::Optimal)[s - 2] <= a.row(s, Strategy::Optimal)[s - 2]);
    }
  }
}

TEST_CASE("construction errors") {
  auto in = uniform_instance(four_levels(), 20, 15, 10, Score(Rational(-2)), Score::negative_infinity(), 2);
  SUBCASE("missing intervention entry") {
    in.stops.erase({3, Strategy::Balanced});
    try {
      build(in);
      FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
      CHECK(std::string(e.what()).find("level 3, strategy balanced") != std::string::npos);
    }
  }
  SUBCASE("non-finite cost") {
    in.triples[1].optimal.execution_cost = planning::Cost::infinite();
    CHECK_THROWS_AS(build(in), ScenarioError);
  }
  SUBCASE("triple count") {
    in.triples.pop_back();
    CHECK_THROWS_AS(build(in), ScenarioError);
  }
}

TEST_CASE("single absorbing state") {
  TrustMDP mdp;
  mdp.k = 1;
  mdp.gamma = 0.9;
  mdp.actions = {Strategy::Optimal};
  mdp.transition.resize(1);
  mdp.cost.resize(1);
  for (auto& row : mdp.transition[0]) row = {1.0};
  mdp.cost[0] = {0.0, 0.0, 7.0};
  auto p = solve(mdp);
  CHECK(p.value[0] == doctest::Approx(70.0).epsilon(1e-9));
  CHECK(evaluate_policy(mdp, p.choice)[0] == doctest::Approx(70.0).epsilon(1e-12));
  CHECK(p.reported_value[0] == doctest::Approx(-70.0).epsilon(1e-9));
}

TEST_CASE("deterministic chain evaluates in closed form") {
  // Levels climb one step per round at cost 1 until the top, which costs 0.
  TrustMDP mdp;
  mdp.k = 4;
  mdp.gamma = 0.9;
  mdp.actions = {Strategy::Explicable};
  mdp.transition.resize(4);
  mdp.cost.resize(4);
  for (int s = 0; s < 4; ++s) {
    std::vector<double> row(4, 0.0);
    row[std::min(s + 1, 3)] = 1.0;
    for (auto& r : mdp.transition[s]) r = row;
    mdp.cost[s] = {s == 3 ? 0.0 : 1.0, 0.0, 0.0};
  }
  auto v = evaluate_policy(mdp, std::vector<Strategy>(4, Strategy::Explicable));
  CHECK(v[3] == doctest::Approx(0.0));
  CHECK(v[2] == doctest::Approx(1.0));
  CHECK(v[1] == doctest::Approx(1.9));
  CHECK(v[0] == doctest::Approx(2.71));
}

TEST_CASE("value iteration agrees with exhaustive policy search") {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 150; ++i) {
    auto in = random_instance(rng);
    if (i % 3 == 0) in.scenario.actions = {Strategy::Explicable, Strategy::Optimal};
    TrustMDP mdp = build(in);
    MetaPolicy solved = solve(mdp, 1e-10);
    MetaPolicy brute = best_policy_by_enumeration(mdp);
    auto exact = evaluate_policy(mdp, solved.choice);
    auto independent = iterate_policy(mdp, solved.choice);
    for (int s = 0; s < mdp.k; ++s) {
      CHECK(std::abs(solved.value[s] - brute.value[s]) < 1e-6);
      CHECK(std::abs(exact[s] - brute.value[s]) < 1e-6);
      CHECK(std::abs(independent[s] - exact[s]) < 1e-8 * std::max(1.0, std::abs(exact[s])));
    }
  }
}

TEST_CASE("policy invariants") {
  SUBCASE("never monitored: cheapest execution everywhere") {
    auto s = four_levels();
    s.omega = {0, 0, 0, 0};
    auto in = uniform_instance(s, 20, 15, 10, Score(Rational(-2)), Score::negative_infinity(), 2);
    auto p = solve(build(in));
    CHECK(format_policy(p.choice) == "[opt, opt, opt, opt]");
  }
  SUBCASE("always monitored with a heavy penalty: explicable everywhere") {
    auto s = four_levels();
    s.omega = {1, 1, 1, 1};
    s.fail_penalty = 10 * 20;
    auto in = uniform_instance(s, 20, 15, 10, Score(Rational(-2)), Score::negative_infinity(), 2);
    auto p = solve(build(in));
    CHECK(format_policy(p.choice) == "[exp, exp, exp, exp]");
  }
  SUBCASE("myopic limit") {
    auto s = four_levels();
    s.gamma = 0.0;
    auto in = uniform_instance(s, 20, 15, 10, Score(Rational(-2)), Score::negative_infinity(), 2);
    TrustMDP mdp = build(in);
    auto p = solve(mdp);
    for (int level = 1; level <= 4; ++level) {
      Strategy best = Strategy::Explicable;
      for (Strategy a : mdp.actions) {
        if (mdp.cost_of(level, a) < mdp.cost_of(level, best) - 1e-12) best = a;
      }
      CHECK(p.choice[level - 1] == best);
    }
  }
  SUBCASE("ties prefer explicable") {
    auto in = uniform_instance(four_levels(), 10, 10, 10, Score(), Score(), 2);
    auto p = solve(build(in));
    CHECK(format_policy(p.choice) == "[exp, exp, exp, exp]");
  }
}

TEST_CASE("mdp dump is deterministic") {
  auto in = uniform_instance(four_levels(), 20, 15, 10, Score(Rational(-2)), Score::negative_infinity(), 2);
  TrustMDP mdp = build(in);
  auto a = to_json(mdp).dump();
  auto b = to_json(build(in)).dump();
  CHECK(a == b);
  auto j = to_json(mdp);
  CHECK(j["k"] == 4);
  CHECK(j["levels"][1]["actions"]["opt"]["transition"][0].get<double>() == doctest::Approx(0.74));
  auto pj = to_json(solve(mdp));
  CHECK(pj["policy"].size() == 4);
}
