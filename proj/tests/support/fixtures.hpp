#pragma once

// Hand-built tasks and triples for meta-level tests.

#include <cstdint>
#include <string>
#include <vector>

#include "trustplan/meta/mdp.hpp"

namespace trustplan::testing {

using reconcile::AnnotatedPlan;
using reconcile::ModelPair;
using reconcile::Strategy;
using reconcile::StrategyTriple;

/// Corridor of `n` unit-cost steps s0 -> s1 -> ... -> sn.
inline planning::PlanningModel corridor(int n) {
  planning::PlanningModel m;
  for (int i = 0; i <= n; ++i) m.fluents.insert("s" + std::to_string(i));
  for (int i = 0; i < n; ++i) {
    m.actions.push_back({"step-" + std::to_string(i),
                         planning::Rational(1),
                         {"s" + std::to_string(i)},
                         {"s" + std::to_string(i + 1)},
                         {"s" + std::to_string(i)}});
  }
  m.init = {"s0"};
  m.goal = {"s" + std::to_string(n)};
  return planning::normalize_model(m);
}

inline planning::Plan corridor_plan(int n) {
  planning::Plan p;
  for (int i = 0; i < n; ++i) p.steps.push_back("step-" + std::to_string(i));
  return p;
}

inline AnnotatedPlan annotated(int n, std::int64_t cost, planning::Score ex, Strategy tag) {
  AnnotatedPlan a;
  a.plan = corridor_plan(n);
  a.execution_cost = planning::Cost(cost);
  a.explicability = ex;
  a.tag = tag;
  return a;
}

/// Triple over a corridor task: the explicable plan costs `c_exp` and is
/// expected, the optimal plan costs `c_opt` with explicability `ex_opt`, the
/// balanced plan sits in between.
inline StrategyTriple synthetic_triple(int n, std::int64_t c_exp, std::int64_t c_bal, std::int64_t c_opt, planning::Score ex_bal,
                                       planning::Score ex_opt) {
  StrategyTriple t;
  t.explicable = annotated(n, c_exp, planning::Score(), Strategy::Explicable);
  t.balanced = annotated(n, c_bal, ex_bal, Strategy::Balanced);
  t.optimal = annotated(n, c_opt, ex_opt, Strategy::Optimal);
  return t;
}

}  // namespace trustplan::testing
