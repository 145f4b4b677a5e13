#include "trustplan/planning/planner.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace trustplan::planning {

namespace {

struct Bits {
  std::vector<std::uint64_t> words;

  explicit Bits(std::size_t n = 0) : words((n + 63) / 64, 0) {}
  void set(std::size_t i) { words[i / 64] |= (std::uint64_t{1} << (i % 64)); }
  bool test(std::size_t i) const { return (words[i / 64] >> (i % 64)) & 1U; }
  bool contains_all(const Bits& other) const {
    for (std::size_t i = 0; i < words.size(); ++i) {
      if ((words[i] & other.words[i]) != other.words[i]) return false;
    }
    return true;
  }
  bool operator==(const Bits&) const = default;
};

struct BitsHash {
  std::size_t operator()(const Bits& b) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto w : b.words) {
      h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

struct CompiledAction {
  Bits pre;
  Bits add;
  Bits del;
  Rational cost;
};

struct Compiled {
  std::unordered_map<std::string, std::size_t> index;
  std::vector<CompiledAction> actions;
  Bits init;
  std::vector<std::size_t> goal;
  Bits goal_bits;
  std::vector<std::optional<Rational>> cheapest_achiever;

  Bits to_bits(const FluentSet& set) const {
    Bits b(index.size());
    for (const auto& f : set) {
      auto it = index.find(f);
      if (it == index.end()) throw ModelError("undeclared fluent '" + f + "' in state", f);
      b.set(it->second);
    }
    return b;
  }

  Bits successor(const Bits& state, const CompiledAction& a) const {
    Bits next = state;
    for (std::size_t i = 0; i < next.words.size(); ++i) {
      next.words[i] = (next.words[i] | a.add.words[i]) & ~a.del.words[i];
    }
    return next;
  }

  /// nullopt when some unsatisfied goal fluent has no achiever.
  std::optional<Rational> heuristic(const Bits& state) const {
    Rational h{0};
    for (std::size_t g : goal) {
      if (state.test(g)) continue;
      const auto& c = cheapest_achiever[g];
      if (!c) return std::nullopt;
      h = std::max(h, *c);
    }
    return h;
  }
};

Compiled compile(const PlanningModel& model) {
  Compiled c;
  for (const auto& f : model.fluents) c.index.emplace(f, c.index.size());
  const std::size_t n = c.index.size();
  c.cheapest_achiever.assign(n, std::nullopt);
  for (const auto& a : model.actions) {
    CompiledAction ca{c.to_bits(a.pre), c.to_bits(a.add), c.to_bits(a.del), a.cost};
    for (const auto& f : a.add) {
      auto& slot = c.cheapest_achiever[c.index.at(f)];
      if (!slot || a.cost < *slot) slot = a.cost;
    }
    c.actions.push_back(std::move(ca));
  }
  c.init = c.to_bits(model.init);
  c.goal_bits = c.to_bits(model.goal);
  for (const auto& g : model.goal) c.goal.push_back(c.index.at(g));
  return c;
}

struct Constraints {
  std::unordered_set<Bits, BitsHash> banned_states;
  std::vector<bool> banned_first;
};

struct Found {
  std::vector<std::uint32_t> path;
  Rational cost;
};

struct Node {
  Bits state;
  Rational g;
  Rational f;
  std::vector<std::uint32_t> path;
};

std::optional<Found> astar(const Compiled& task, const Bits& start, const Constraints* constraints,
                           std::size_t budget, std::size_t& expanded) {
  std::vector<Node> nodes;
  auto worse = [&nodes](std::size_t l, std::size_t r) {
    const Node& a = nodes[l];
    const Node& b = nodes[r];
    if (a.f != b.f) return b.f < a.f;
    if (a.g != b.g) return a.g < b.g;
    return b.path < a.path;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(worse)> open(worse);
  std::unordered_map<Bits, Rational, BitsHash> best_g;
  std::unordered_set<Bits, BitsHash> closed;

  auto h0 = task.heuristic(start);
  if (!h0) return std::nullopt;
  nodes.push_back({start, Rational(0), *h0, {}});
  best_g.emplace(start, Rational(0));
  open.push(0);

  while (!open.empty()) {
    std::size_t id = open.top();
    open.pop();
    if (closed.contains(nodes[id].state)) continue;
    if (nodes[id].state.contains_all(task.goal_bits)) {
      return Found{nodes[id].path, nodes[id].g};
    }
    closed.insert(nodes[id].state);
    if (++expanded > budget) throw BudgetExceeded(budget);

    for (std::uint32_t a = 0; a < task.actions.size(); ++a) {
      const Node& cur = nodes[id];
      const auto& act = task.actions[a];
      if (!cur.state.contains_all(act.pre)) continue;
      if (constraints != nullptr && cur.path.empty() && constraints->banned_first[a]) continue;
      Bits next = task.successor(cur.state, act);
      if (closed.contains(next)) continue;
      if (constraints != nullptr && constraints->banned_states.contains(next)) continue;
      Rational g = cur.g + act.cost;
      auto it = best_g.find(next);
      if (it != best_g.end() && it->second < g) continue;
      auto h = task.heuristic(next);
      if (!h) continue;
      if (it == best_g.end()) best_g.emplace(next, g);
      else it->second = g;
      std::vector<std::uint32_t> path = cur.path;
      path.push_back(a);
      nodes.push_back({std::move(next), g, g + *h, std::move(path)});
      open.push(nodes.size() - 1);
    }
  }
  return std::nullopt;
}

Plan to_plan(const PlanningModel& model, const std::vector<std::uint32_t>& path) {
  Plan plan;
  plan.steps.reserve(path.size());
  for (auto a : path) plan.steps.push_back(model.actions[a].name);
  return plan;
}

}  // namespace

std::optional<SearchResult> optimal_plan_from(const PlanningModel& model, const FluentSet& start,
                                              const PlannerOptions& options) {
  Compiled task = compile(model);
  std::size_t expanded = 0;
  auto found = astar(task, task.to_bits(start), nullptr, options.node_budget, expanded);
  if (!found) return std::nullopt;
  return SearchResult{to_plan(model, found->path), found->cost, expanded};
}

std::optional<SearchResult> optimal_plan(const PlanningModel& model, const PlannerOptions& options) {
  return optimal_plan_from(model, model.init, options);
}

Cost optimal_cost(const PlanningModel& model, const PlannerOptions& options) {
  auto result = optimal_plan(model, options);
  return result ? Cost(result->cost) : Cost::infinite();
}

std::vector<SearchResult> cheapest_plans(const PlanningModel& model, std::size_t count,
                                         const PlannerOptions& options) {
  std::vector<SearchResult> accepted;
  if (count == 0) return accepted;
  Compiled task = compile(model);
  std::size_t expanded = 0;

  auto first = astar(task, task.init, nullptr, options.node_budget, expanded);
  if (!first) return accepted;
  std::vector<Found> paths{*first};

  // Candidate pool ordered by (cost, action sequence).
  std::map<std::pair<Rational, std::vector<std::uint32_t>>, bool> pool;

  while (paths.size() < count) {
    const Found& last = paths.back();
    std::vector<Bits> states{task.init};
    for (auto a : last.path) states.push_back(task.successor(states.back(), task.actions[a]));

    Rational root_cost{0};
    for (std::size_t i = 0; i < last.path.size(); ++i) {
      std::vector<std::uint32_t> root(last.path.begin(), last.path.begin() + static_cast<std::ptrdiff_t>(i));
      Constraints constraints;
      constraints.banned_first.assign(task.actions.size(), false);
      for (const auto& p : paths) {
        if (p.path.size() > i && std::equal(root.begin(), root.end(), p.path.begin())) {
          constraints.banned_first[p.path[i]] = true;
        }
      }
      for (std::size_t j = 0; j < i; ++j) constraints.banned_states.insert(states[j]);
      // The spur node itself must not be re-entered either.
      constraints.banned_states.insert(states[i]);

      auto spur = astar(task, states[i], &constraints, options.node_budget, expanded);
      if (spur) {
        std::vector<std::uint32_t> total = root;
        total.insert(total.end(), spur->path.begin(), spur->path.end());
        pool.emplace(std::make_pair(root_cost + spur->cost, std::move(total)), true);
      }
      root_cost += task.actions[last.path[i]].cost;
    }

    bool added = false;
    while (!pool.empty()) {
      auto node = pool.extract(pool.begin());
      const auto& key = node.key();
      bool duplicate = std::any_of(paths.begin(), paths.end(),
                                   [&key](const Found& p) { return p.path == key.second; });
      if (duplicate) continue;
      paths.push_back(Found{key.second, key.first});
      added = true;
      break;
    }
    if (!added) break;
  }

  for (const auto& p : paths) accepted.push_back(SearchResult{to_plan(model, p.path), p.cost, expanded});
  return accepted;
}

}  // namespace trustplan::planning
