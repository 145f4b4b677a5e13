#include <doctest.h>

#include <algorithm>
#include <random>

#include "support/oracles.hpp"
#include "trustplan/planning/model_io.hpp"
#include "trustplan/reconcile/strategy.hpp"

using namespace trustplan::planning;
using namespace trustplan::reconcile;
namespace oracle = trustplan::testing;

namespace {

// Desk-scale rover: the human believes imaging needs the soil data sent first
// and that sampling needs an empty store.
const char* kRoverRobot = R"(
fluents: at-base at-rock have-soil have-image comm-soil comm-image store-empty store-full
action drive-out cost 2 pre {at-base} add {at-rock} del {at-base}
action drive-back cost 2 pre {at-rock} add {at-base} del {at-rock}
action sample-soil cost 1 pre {at-rock} add {have-soil store-full} del {store-empty}
action drop cost 1 pre {store-full} add {store-empty} del {store-full}
action take-image cost 1 pre {at-rock} add {have-image}
action send-soil cost 1 pre {have-soil at-base} add {comm-soil}
action send-image cost 1 pre {have-image at-base} add {comm-image}
init {at-base store-full}
goal {comm-soil comm-image}
)";

PlanningModel rover_human() {
  PlanningModel h = parse_model(kRoverRobot);
  for (auto& a : h.actions) {
    if (a.name == "take-image") a.pre.insert("comm-soil");
    if (a.name == "sample-soil") a.pre.insert("store-empty");
  }
  return normalize_model(h);
}

const char* kDetour = R"(
fluents: p0 p1 p2
action direct cost 1 pre {p0} add {p1} del {p0}
action detour cost 4 pre {p0} add {p1} del {p0}
action finish cost 1 pre {p1} add {p2} del {p1}
init {p0}
goal {p2}
)";

Plan plan_of(std::initializer_list<const char*> steps) {
  Plan p;
  for (auto s : steps) p.steps.emplace_back(s);
  return p;
}

/// Exhaustive MCE: minimum cardinality, then minimum cost, then the
/// lexicographically smallest key list.
MessageSet oracle_mce(const ModelPair& pair, const Plan& plan) {
  const auto& all = pair.delta().messages;
  std::optional<std::tuple<std::size_t, Rational, std::vector<std::string>>> best_key;
  MessageSet best;
  for (std::size_t mask = 0; mask < (std::size_t{1} << all.size()); ++mask) {
    MessageSet s;
    std::vector<std::string> keys;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (mask & (std::size_t{1} << i)) {
        s.push_back(all[i]);
        keys.push_back(all[i].key());
      }
    }
    PlanningModel updated = apply_explanation(pair.human(), s);
    Cost c = plan_cost(updated, plan);
    if (!c.is_finite() || c != oracle::brute_force_cost(updated)) continue;
    auto key = std::make_tuple(s.size(), pair.delta().cost_of(s), keys);
    if (!best_key || key < *best_key) {
      best_key = key;
      best = s;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("identical models have an empty delta") {
  auto m = parse_model(kRoverRobot);
  ModelPair pair(m, m);
  CHECK(pair.delta().messages.empty());
  CHECK(serialize_model(apply_explanation(pair.human(), {})) == serialize_model(pair.human()));
}

TEST_CASE("one extra precondition yields one removal message") {
  auto robot = parse_model(kRoverRobot);
  auto human = robot;
  for (auto& a : human.actions) {
    if (a.name == "take-image") a.pre.insert("comm-soil");
  }
  ModelPair pair(robot, normalize_model(human));
  REQUIRE(pair.delta().messages.size() == 1);
  const Message& m = pair.delta().messages.front();
  CHECK(m.kind == EditKind::PreconditionRemove);
  CHECK(m.key() == "pre- take-image comm-soil");
  CHECK(m.describe() == "take-image does not require comm-soil");
}

TEST_CASE("mixed differences enumerate one message per slot") {
  auto robot = parse_model(kRoverRobot);
  auto human = rover_human();
  for (auto& a : human.actions) {
    if (a.name == "drive-out") a.cost = Rational(5);
    if (a.name == "send-image") a.pre.insert("comm-soil");
  }
  ModelPair pair(robot, normalize_model(human));
  std::vector<std::string> keys;
  for (const auto& m : pair.delta().messages) keys.push_back(m.key());
  CHECK(keys == std::vector<std::string>{"cost drive-out 5>2", "pre- sample-soil store-empty",
                                         "pre- send-image comm-soil", "pre- take-image comm-soil"});
}

TEST_CASE("effect, init, goal and action differences") {
  auto robot = parse_model(kRoverRobot);
  auto human = robot;
  human.init = {"at-base", "store-empty"};
  human.goal = {"comm-soil"};
  for (auto& a : human.actions) {
    if (a.name == "sample-soil") a.del.clear();
  }
  human.actions.erase(std::find_if(human.actions.begin(), human.actions.end(),
                                   [](const ActionSchema& a) { return a.name == "drop"; }));
  human.actions.push_back({"teleport", Rational(1), {"at-base"}, {"at-rock"}, {"at-base"}});
  human = normalize_model(human);
  ModelPair pair(robot, human);
  std::vector<std::string> keys;
  for (const auto& m : pair.delta().messages) keys.push_back(m.key());
  CHECK(keys == std::vector<std::string>{"action+ drop", "action- teleport", "eff sample-soil store-empty none>del",
                                         "goal+ comm-image", "init+ store-full", "init- store-empty"});
  CHECK(serialize_model(apply_explanation(human, pair.delta().messages)) == serialize_model(pair.robot()));
}

TEST_CASE("inapplicable message names itself") {
  auto robot = parse_model(kRoverRobot);
  ModelPair pair(robot, rover_human());
  Message stale = pair.delta().messages.front();
  auto once = apply_explanation(pair.human(), std::vector<Message>{stale});
  try {
    apply_explanation(once, std::vector<Message>{stale});
    FAIL("expected ExplanationError");
  } catch (const ExplanationError& e) {
    CHECK(e.message_key() == stale.key());
  }
}

TEST_CASE("the full delta turns the human model into the robot model") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 30; ++i) {
    auto robot = i % 2 == 0 ? oracle::random_grid(rng, 3, 3, 0.15, 4) : oracle::random_blocks(rng, 3, 4);
    if (!oracle::brute_force_cost(robot).is_finite()) continue;
    auto human = oracle::perturb(rng, robot, 4, 5);
    ModelPair pair(robot, human);
    CHECK(serialize_model(apply_explanation(pair.human(), pair.delta().messages)) ==
          serialize_model(pair.robot()));
  }
}

TEST_CASE("explanations compose and ignore order") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 30; ++i) {
    auto robot = oracle::random_blocks(rng, 3, 4);
    auto human = oracle::perturb(rng, robot, 5, 5);
    ModelPair pair(robot, human);
    MessageSet all = pair.delta().messages;
    std::shuffle(all.begin(), all.end(), rng);
    std::size_t cut = all.empty() ? 0 : std::uniform_int_distribution<std::size_t>(0, all.size())(rng);
    std::vector<Message> a(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(cut));
    std::vector<Message> b(all.begin() + static_cast<std::ptrdiff_t>(cut), all.end());
    auto stepwise = apply_explanation(apply_explanation(human, a), b);
    auto at_once = apply_explanation(human, all);
    auto reversed = all;
    std::reverse(reversed.begin(), reversed.end());
    CHECK(serialize_model(stepwise) == serialize_model(at_once));
    CHECK(serialize_model(apply_explanation(human, reversed)) == serialize_model(at_once));
  }
}

TEST_CASE("explicability scores") {
  auto detour = parse_model(kDetour);
  ModelPair pair(detour, detour);
  SUBCASE("the expected plan scores zero") {
    CHECK(explicability(pair.expected_plan(), pair, {}).is_perfect());
  }
  SUBCASE("a costlier valid plan scores the negated gap") {
    auto plans = oracle::enumerate_plans(detour, 5);
    Rational best = std::min_element(plans.begin(), plans.end(), [](auto& x, auto& y) {
                      return x.second < y.second;
                    })->second;
    Plan p = plan_of({"detour", "finish"});
    CHECK(best == Rational(2));
    Score ex = explicability(p, pair, {});
    REQUIRE(ex.is_finite());
    CHECK(ex.value() == Rational(-3));
  }
  SUBCASE("an invalid plan scores -inf") {
    Score ex = explicability(plan_of({"finish"}), pair, {});
    CHECK_FALSE(ex.is_finite());
  }
  SUBCASE("robot optimum is invalid for the rover human") {
    ModelPair rover(parse_model(kRoverRobot), rover_human());
    auto opt = optimal_plan(rover.robot());
    REQUIRE(opt);
    CHECK(opt->cost == Cost(Rational(8)));
    auto report = validate_plan(rover.human(), opt->plan);
    CHECK_FALSE(report.valid);
    CHECK(report.fail_step == 1);
    CHECK_FALSE(explicability(opt->plan, rover, {}).is_finite());
    CHECK(explicability(opt->plan, rover, rover.delta().messages).is_perfect());
    CHECK_FALSE(explicability(opt->plan, rover, {}, ExplicabilityMetric::RobotModelDiff).is_finite());
  }
}

TEST_CASE("explicability matches a plan-enumeration oracle") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 25; ++i) {
    auto robot = oracle::random_grid(rng, 3, 2, 0.0, 4);
    auto human = oracle::perturb(rng, robot, 3, 4);
    ModelPair pair(robot, human);
    auto plans = oracle::enumerate_plans(human, 5);
    Rational best = std::min_element(plans.begin(), plans.end(), [](auto& x, auto& y) {
                      return x.second < y.second;
                    })->second;
    for (const auto& [plan, cost] : oracle::enumerate_plans(robot, 4)) {
      Score ex = explicability(plan, pair, {});
      Cost in_human = plan_cost(human, plan);
      if (!in_human.is_finite()) {
        CHECK_FALSE(ex.is_finite());
      } else {
        REQUIRE(ex.is_finite());
        CHECK(ex.value() == best - in_human.value());
      }
    }
  }
}

TEST_CASE("minimally complete explanations") {
  SUBCASE("already optimal plans need nothing") {
    auto m = parse_model(kDetour);
    ModelPair pair(m, m);
    CHECK(mce(pair, pair.expected_plan()).empty());
  }
  SUBCASE("a single decisive message") {
    auto robot = parse_model(kRoverRobot);
    auto human = robot;
    for (auto& a : human.actions) {
      if (a.name == "take-image") a.pre.insert("comm-soil");
      if (a.name == "drop") a.cost = Rational(3);
    }
    ModelPair pair(robot, normalize_model(human));
    auto opt = optimal_plan(pair.robot());
    auto m = mce(pair, opt->plan);
    REQUIRE(m.size() == 1);
    CHECK(m.front().key() == "pre- take-image comm-soil");
    CHECK(keys_of(m) == keys_of(oracle_mce(pair, opt->plan)));
  }
  SUBCASE("rover needs both corrections") {
    ModelPair pair(parse_model(kRoverRobot), rover_human());
    auto opt = optimal_plan(pair.robot());
    auto m = mce(pair, opt->plan);
    CHECK(keys_of(m) == "pre- sample-soil store-empty; pre- take-image comm-soil");
    CHECK(keys_of(m) == keys_of(oracle_mce(pair, opt->plan)));
  }
  SUBCASE("plans that are not robot-optimal are rejected") {
    ModelPair pair(parse_model(kDetour), parse_model(kDetour));
    CHECK_THROWS_AS(mce(pair, plan_of({"detour", "finish"})), std::invalid_argument);
  }
  SUBCASE("oversized deltas report the cap") {
    ModelPair pair(parse_model(kRoverRobot), rover_human());
    SearchLimits limits;
    limits.max_delta = 1;
    auto opt = optimal_plan(pair.robot());
    CHECK_THROWS_AS(mce(pair, opt->plan, limits), ExplanationBudgetExceeded);
  }
}

TEST_CASE("mce agrees with exhaustive subset search and is minimal") {
  std::mt19937_64 rng(14);
  int checked = 0;
  for (int i = 0; i < 40; ++i) {
    auto robot = i % 2 == 0 ? oracle::random_grid(rng, 3, 3, 0.1, 4) : oracle::random_blocks(rng, 3, 3);
    if (!oracle::brute_force_cost(robot).is_finite()) continue;
    auto human = oracle::perturb(rng, robot, 4, 5);
    MessageCostTable costs;
    ModelPair probe(robot, human);
    for (const auto& m : probe.delta().messages) {
      costs[m.key()] = Rational(std::uniform_int_distribution<int>(1, 3)(rng));
    }
    ModelPair pair(robot, human, costs);
    auto opt = optimal_plan(pair.robot());
    REQUIRE(opt);
    auto found = mce(pair, opt->plan);
    CHECK(keys_of(found) == keys_of(oracle_mce(pair, opt->plan)));
    // No strict subset works.
    for (std::size_t drop = 0; drop < found.size(); ++drop) {
      MessageSet smaller = found;
      smaller.erase(smaller.begin() + static_cast<std::ptrdiff_t>(drop));
      auto updated = apply_explanation(pair.human(), smaller);
      Cost c = plan_cost(updated, opt->plan);
      CHECK_FALSE((c.is_finite() && c == oracle::brute_force_cost(updated)));
    }
    ++checked;
  }
  CHECK(checked >= 20);
}

TEST_CASE("strategy triple") {
  SUBCASE("identical models collapse") {
    auto m = parse_model(kRoverRobot);
    ModelPair pair(m, m);
    auto t = strategy_triple(pair);
    CHECK(t.explicable.plan == t.optimal.plan);
    CHECK(t.balanced.plan == t.optimal.plan);
    CHECK(t.explicable.execution_cost == t.optimal.execution_cost);
    for (auto s : kAllStrategies) CHECK(t.at(s).perfectly_explicable());
  }
  SUBCASE("rover triple orders cost against explicability") {
    ModelPair pair(parse_model(kRoverRobot), rover_human());
    auto t = strategy_triple(pair);
    CHECK(t.optimal.execution_cost == Cost(Rational(8)));
    CHECK_FALSE(t.optimal.explicability.is_finite());
    CHECK(t.explicable.perfectly_explicable());
    CHECK(dominance_holds(t));
  }
  SUBCASE("a huge balance weight makes balanced explicable") {
    MessageCostTable costs{{"pre- sample-soil store-empty", Rational(6)}, {"pre- take-image comm-soil", Rational(6)}};
    ModelPair pair(parse_model(kRoverRobot), rover_human(), costs);
    TripleOptions opts;
    opts.balance_weight = Rational(1000000);
    auto t = strategy_triple(pair, opts);
    CHECK(t.balanced.perfectly_explicable());
    CHECK(t.balanced.execution_cost == t.explicable.execution_cost);
  }
  SUBCASE("strategy names") {
    for (auto s : kAllStrategies) CHECK(parse_strategy(to_string(s)) == s);
    CHECK(parse_strategy("bal") == Strategy::Balanced);
    CHECK_THROWS_AS(parse_strategy("greedy"), std::invalid_argument);
  }
}

TEST_CASE("dominance holds on random pairs") {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 40; ++i) {
    auto robot = i % 2 == 0 ? oracle::random_grid(rng, 3, 3, 0.1, 4) : oracle::random_blocks(rng, 3, 3);
    if (!oracle::brute_force_cost(robot).is_finite()) continue;
    auto human = oracle::perturb(rng, robot, 4, 5);
    ModelPair pair(robot, human);
    TripleOptions opts;
    opts.balance_weight = Rational(std::uniform_int_distribution<int>(0, 4)(rng));
    auto t = strategy_triple(pair, opts);
    CHECK(dominance_holds(t));
    CHECK(t.explicable.perfectly_explicable());
    CHECK(t.optimal.execution_cost == oracle::brute_force_cost(robot));
  }
}
