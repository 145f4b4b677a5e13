#pragma once

#include <memory>
#include <string>

#include "trustplan/service/session.hpp"

namespace httplib {
class Server;
}

namespace trustplan::service {

/// HTTP front end of SessionManager.
///
///   POST /sessions                       {"condition": "trust-aware"}
///   GET  /sessions/{id}/round
///   POST /sessions/{id}/choice           {"choice": "monitor" | "label"}
///   GET  /sessions/{id}/step             404 once the plan has been shown
///   POST /sessions/{id}/stop
///   POST /sessions/{id}/questionnaire    {"predictability", "dependability", "faith", "trust"}
///   GET  /sessions/{id}/summary
class Server {
 public:
  Server(harness::PreparedScenario scenario, ServiceOptions options);
  ~Server();

  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and returns it, or -1.
  int bind_any(const std::string& host);
  bool listen_after_bind();
  void stop();

  SessionManager& sessions() { return manager_; }

 private:
  void routes();

  SessionManager manager_;
  std::unique_ptr<httplib::Server> http_;
};

}  // namespace trustplan::service
