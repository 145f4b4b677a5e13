#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "trustplan/planning/model.hpp"

namespace trustplan::reconcile {

using planning::ActionSchema;
using planning::PlanningModel;
using planning::Rational;

enum class EditKind {
  PreconditionAdd,
  PreconditionRemove,
  EffectChange,
  CostChange,
  InitAdd,
  InitRemove,
  GoalAdd,
  GoalRemove,
  ActionAdd,
  ActionRemove,
};

/// How an action treats one fluent.
enum class EffectMark { None, Add, Del };

/// One atomic piece of model information. Every message edits a distinct slot
/// of the model (an action/fluent pair, an action's cost, an init or goal entry,
/// or a whole action), so any subset applies in any order with the same result.
struct Message {
  EditKind kind = EditKind::PreconditionAdd;
  std::string action;
  std::string fluent;
  EffectMark effect_from = EffectMark::None;
  EffectMark effect_to = EffectMark::None;
  Rational cost_from{0};
  Rational cost_to{0};
  /// Full schema for ActionAdd.
  std::optional<ActionSchema> schema;

  /// Canonical identifier, e.g. "pre- take-image comm-soil-w1". Used for
  /// ordering, cost tables and serialization.
  std::string key() const;
  /// Plain-language rendering shown to a supervisor.
  std::string describe() const;

  bool operator==(const Message& o) const { return key() == o.key(); }
  bool operator<(const Message& o) const { return key() < o.key(); }
};

/// Messages kept sorted by key.
using MessageSet = std::vector<Message>;

class ExplanationError : public std::runtime_error {
 public:
  ExplanationError(const std::string& what, std::string message_key)
      : std::runtime_error(what), message_key_(std::move(message_key)) {}
  const std::string& message_key() const { return message_key_; }

 private:
  std::string message_key_;
};

/// Per-message communication cost; keys absent from the table cost 1.
using MessageCostTable = std::map<std::string, Rational>;

struct ModelDelta {
  MessageSet messages;
  MessageCostTable costs;

  Rational cost_of(const Message& m) const;
  Rational cost_of(std::span<const Message> subset) const;
};

/// The model after the human receives `messages`. Throws ExplanationError
/// naming the first inapplicable message.
PlanningModel apply_explanation(const PlanningModel& model, std::span<const Message> messages);

/// Every atomic edit turning `from` into `to`. Both models must declare the
/// same fluents.
MessageSet diff_models(const PlanningModel& from, const PlanningModel& to);

/// Sorts and deduplicates.
MessageSet normalize(MessageSet messages);

std::string to_string(EffectMark mark);
std::string keys_of(std::span<const Message> messages);

}  // namespace trustplan::reconcile
