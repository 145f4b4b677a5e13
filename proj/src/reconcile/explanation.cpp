#include "trustplan/reconcile/explanation.hpp"

#include <algorithm>
#include <set>

namespace trustplan::reconcile {

using planning::FluentSet;
using planning::format_rational;

std::string to_string(EffectMark mark) {
  switch (mark) {
    case EffectMark::None: return "none";
    case EffectMark::Add: return "add";
    case EffectMark::Del: return "del";
  }
  return "?";
}

std::string Message::key() const {
  switch (kind) {
    case EditKind::PreconditionAdd: return "pre+ " + action + " " + fluent;
    case EditKind::PreconditionRemove: return "pre- " + action + " " + fluent;
    case EditKind::EffectChange:
      return "eff " + action + " " + fluent + " " + to_string(effect_from) + ">" + to_string(effect_to);
    case EditKind::CostChange:
      return "cost " + action + " " + format_rational(cost_from) + ">" + format_rational(cost_to);
    case EditKind::InitAdd: return "init+ " + fluent;
    case EditKind::InitRemove: return "init- " + fluent;
    case EditKind::GoalAdd: return "goal+ " + fluent;
    case EditKind::GoalRemove: return "goal- " + fluent;
    case EditKind::ActionAdd: return "action+ " + action;
    case EditKind::ActionRemove: return "action- " + action;
  }
  return "?";
}

namespace {

std::string join(const FluentSet& set) {
  std::string out;
  for (const auto& f : set) {
    if (!out.empty()) out += ", ";
    out += f;
  }
  return out.empty() ? "nothing" : out;
}

}  // namespace

std::string Message::describe() const {
  switch (kind) {
    case EditKind::PreconditionAdd: return action + " requires " + fluent;
    case EditKind::PreconditionRemove: return action + " does not require " + fluent;
    case EditKind::EffectChange:
      switch (effect_to) {
        case EffectMark::Add: return action + " makes " + fluent + " true";
        case EffectMark::Del: return action + " makes " + fluent + " false";
        case EffectMark::None: return action + " does not change " + fluent;
      }
      break;
    case EditKind::CostChange:
      return action + " costs " + format_rational(cost_to) + ", not " + format_rational(cost_from);
    case EditKind::InitAdd: return fluent + " holds initially";
    case EditKind::InitRemove: return fluent + " does not hold initially";
    case EditKind::GoalAdd: return fluent + " is part of the goal";
    case EditKind::GoalRemove: return fluent + " is not part of the goal";
    case EditKind::ActionAdd:
      if (schema) {
        return action + " is available (cost " + format_rational(schema->cost) + ", needs " + join(schema->pre) +
               ", achieves " + join(schema->add) + ")";
      }
      return action + " is available";
    case EditKind::ActionRemove: return action + " is not available";
  }
  return key();
}

Rational ModelDelta::cost_of(const Message& m) const {
  auto it = costs.find(m.key());
  return it == costs.end() ? Rational(1) : it->second;
}

Rational ModelDelta::cost_of(std::span<const Message> subset) const {
  Rational total{0};
  for (const auto& m : subset) total += cost_of(m);
  return total;
}

MessageSet normalize(MessageSet messages) {
  std::sort(messages.begin(), messages.end());
  messages.erase(std::unique(messages.begin(), messages.end()), messages.end());
  return messages;
}

std::string keys_of(std::span<const Message> messages) {
  std::string out;
  for (const auto& m : messages) {
    if (!out.empty()) out += "; ";
    out += m.key();
  }
  return out;
}

namespace {

EffectMark mark_of(const ActionSchema& a, const std::string& fluent) {
  if (a.add.contains(fluent)) return EffectMark::Add;
  if (a.del.contains(fluent)) return EffectMark::Del;
  return EffectMark::None;
}

[[noreturn]] void inapplicable(const Message& m, const std::string& why) {
  throw ExplanationError("message '" + m.key() + "' is not applicable: " + why, m.key());
}

ActionSchema& action_of(PlanningModel& model, const Message& m) {
  auto it = std::lower_bound(model.actions.begin(), model.actions.end(), m.action,
                             [](const ActionSchema& a, const std::string& n) { return a.name < n; });
  if (it == model.actions.end() || it->name != m.action) inapplicable(m, "no action '" + m.action + "'");
  return *it;
}

void require_fluent(const PlanningModel& model, const Message& m) {
  if (!model.fluents.contains(m.fluent)) inapplicable(m, "undeclared fluent '" + m.fluent + "'");
}

void toggle(FluentSet& set, const Message& m, bool insert) {
  if (set.contains(m.fluent) == insert) inapplicable(m, insert ? "already present" : "not present");
  if (insert) set.insert(m.fluent);
  else set.erase(m.fluent);
}

}  // namespace

PlanningModel apply_explanation(const PlanningModel& model, std::span<const Message> messages) {
  PlanningModel out = model;
  for (const auto& m : messages) {
    switch (m.kind) {
      case EditKind::PreconditionAdd:
      case EditKind::PreconditionRemove: {
        require_fluent(out, m);
        toggle(action_of(out, m).pre, m, m.kind == EditKind::PreconditionAdd);
        break;
      }
      case EditKind::EffectChange: {
        require_fluent(out, m);
        ActionSchema& a = action_of(out, m);
        if (mark_of(a, m.fluent) != m.effect_from) inapplicable(m, "effect is " + to_string(mark_of(a, m.fluent)));
        a.add.erase(m.fluent);
        a.del.erase(m.fluent);
        if (m.effect_to == EffectMark::Add) a.add.insert(m.fluent);
        if (m.effect_to == EffectMark::Del) a.del.insert(m.fluent);
        break;
      }
      case EditKind::CostChange: {
        ActionSchema& a = action_of(out, m);
        if (a.cost != m.cost_from) inapplicable(m, "cost is " + format_rational(a.cost));
        a.cost = m.cost_to;
        break;
      }
      case EditKind::InitAdd:
      case EditKind::InitRemove:
        require_fluent(out, m);
        toggle(out.init, m, m.kind == EditKind::InitAdd);
        break;
      case EditKind::GoalAdd:
      case EditKind::GoalRemove:
        require_fluent(out, m);
        toggle(out.goal, m, m.kind == EditKind::GoalAdd);
        break;
      case EditKind::ActionAdd: {
        if (!m.schema) inapplicable(m, "missing schema");
        if (out.find_action(m.action) != nullptr) inapplicable(m, "action already exists");
        auto pos = std::lower_bound(out.actions.begin(), out.actions.end(), m.action,
                                    [](const ActionSchema& a, const std::string& n) { return a.name < n; });
        out.actions.insert(pos, *m.schema);
        break;
      }
      case EditKind::ActionRemove: {
        ActionSchema& a = action_of(out, m);
        out.actions.erase(out.actions.begin() + (&a - out.actions.data()));
        break;
      }
    }
  }
  planning::check_model(out);
  return out;
}

MessageSet diff_models(const PlanningModel& from, const PlanningModel& to) {
  if (from.fluents != to.fluents) {
    throw std::invalid_argument("diff_models: fluent vocabularies differ; unify declarations first");
  }
  MessageSet out;
  auto fluent_msg = [&out](EditKind kind, const std::string& f) {
    Message m;
    m.kind = kind;
    m.fluent = f;
    out.push_back(std::move(m));
  };
  for (const auto& f : from.init) {
    if (!to.init.contains(f)) fluent_msg(EditKind::InitRemove, f);
  }
  for (const auto& f : to.init) {
    if (!from.init.contains(f)) fluent_msg(EditKind::InitAdd, f);
  }
  for (const auto& f : from.goal) {
    if (!to.goal.contains(f)) fluent_msg(EditKind::GoalRemove, f);
  }
  for (const auto& f : to.goal) {
    if (!from.goal.contains(f)) fluent_msg(EditKind::GoalAdd, f);
  }

  for (const auto& a : from.actions) {
    if (to.find_action(a.name) == nullptr) {
      Message m;
      m.kind = EditKind::ActionRemove;
      m.action = a.name;
      out.push_back(std::move(m));
    }
  }
  for (const auto& b : to.actions) {
    const ActionSchema* a = from.find_action(b.name);
    if (a == nullptr) {
      Message m;
      m.kind = EditKind::ActionAdd;
      m.action = b.name;
      m.schema = b;
      out.push_back(std::move(m));
      continue;
    }
    if (a->cost != b.cost) {
      Message m;
      m.kind = EditKind::CostChange;
      m.action = b.name;
      m.cost_from = a->cost;
      m.cost_to = b.cost;
      out.push_back(std::move(m));
    }
    std::set<std::string> pre_union(a->pre.begin(), a->pre.end());
    pre_union.insert(b.pre.begin(), b.pre.end());
    for (const auto& f : pre_union) {
      bool in_a = a->pre.contains(f);
      if (in_a == b.pre.contains(f)) continue;
      Message m;
      m.kind = in_a ? EditKind::PreconditionRemove : EditKind::PreconditionAdd;
      m.action = b.name;
      m.fluent = f;
      out.push_back(std::move(m));
    }
    std::set<std::string> eff_union;
    for (const auto* s : {&a->add, &a->del, &b.add, &b.del}) eff_union.insert(s->begin(), s->end());
    for (const auto& f : eff_union) {
      EffectMark ma = mark_of(*a, f);
      EffectMark mb = mark_of(b, f);
      if (ma == mb) continue;
      Message m;
      m.kind = EditKind::EffectChange;
      m.action = b.name;
      m.fluent = f;
      m.effect_from = ma;
      m.effect_to = mb;
      out.push_back(std::move(m));
    }
  }
  return normalize(std::move(out));
}

}  // namespace trustplan::reconcile
