#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "trustplan/harness/simulate.hpp"
#include "trustplan/supervisor/supervisor.hpp"

namespace trustplan::service {

using harness::Condition;
using reconcile::Strategy;

/// Error carried to the HTTP layer as {code, message, detail}.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, std::string code, const std::string& message, nlohmann::json detail = nullptr)
      : std::runtime_error(message), status_(status), code_(std::move(code)), detail_(std::move(detail)) {}

  int status() const { return status_; }
  const std::string& code() const { return code_; }
  const nlohmann::json& detail() const { return detail_; }
  nlohmann::json envelope() const { return {{"code", code_}, {"message", what()}, {"detail", detail_}}; }

 private:
  int status_;
  std::string code_;
  nlohmann::json detail_;
};

enum class Phase { Choice, Watching, Questionnaire, Done };
std::string to_string(Phase p);

struct ServiceOptions {
  /// Empty disables persistence.
  std::filesystem::path log_dir;
  /// Milliseconds since the epoch unless replaced (tests use a counter).
  std::function<std::int64_t()> clock;
  /// Seeds the coin of random-condition sessions together with the session
  /// number.
  std::uint64_t seed = 1;
};

/// Live supervised sessions over one prepared scenario. Each round runs
/// choice -> (step* -> stop?)? -> questionnaire -> advance. Every event is
/// appended to the session's log before the call returns.
class SessionManager {
 public:
  SessionManager(harness::PreparedScenario scenario, ServiceOptions options);
  ~SessionManager();

  nlohmann::json create(const nlohmann::json& body);
  nlohmann::json round(const std::string& id);
  nlohmann::json choice(const std::string& id, const nlohmann::json& body);
  nlohmann::json step(const std::string& id);
  nlohmann::json stop(const std::string& id);
  nlohmann::json questionnaire(const std::string& id, const nlohmann::json& body);
  nlohmann::json summary(const std::string& id);

  const harness::PreparedScenario& scenario() const { return scenario_; }
  std::filesystem::path log_path(const std::string& id) const;

 private:
  struct Session;

  std::shared_ptr<Session> find(const std::string& id);
  Strategy pick_strategy(Session& s);
  void log(Session& s, const std::string& kind, nlohmann::json payload);
  void close_round(Session& s, harness::RoundResult result);
  nlohmann::json round_view(const Session& s) const;

  harness::PreparedScenario scenario_;
  ServiceOptions options_;
  std::mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

}  // namespace trustplan::service
