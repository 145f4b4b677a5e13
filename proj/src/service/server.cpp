#include "trustplan/service/server.hpp"

#include <httplib.h>

namespace trustplan::service {

using nlohmann::json;

namespace {

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ApiError(400, "validation", "request body is not valid JSON", {{"error", e.what()}});
  }
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      send(res, 200, f(req));
    } catch (const ApiError& e) {
      send(res, e.status(), e.envelope());
    } catch (const std::exception& e) {
      send(res, 500, {{"code", "internal"}, {"message", e.what()}, {"detail", nullptr}});
    }
  };
}

}  // namespace

Server::Server(harness::PreparedScenario scenario, ServiceOptions options)
    : manager_(std::move(scenario), std::move(options)), http_(std::make_unique<httplib::Server>()) {
  routes();
}

Server::~Server() = default;

void Server::routes() {
  auto& m = manager_;
  http_->Post("/sessions", guarded([&m](const httplib::Request& req) { return m.create(parse_body(req)); }));
  http_->Get("/sessions/:id/round",
             guarded([&m](const httplib::Request& req) { return m.round(req.path_params.at("id")); }));
  http_->Post("/sessions/:id/choice", guarded([&m](const httplib::Request& req) {
                return m.choice(req.path_params.at("id"), parse_body(req));
              }));
  http_->Get("/sessions/:id/step",
             guarded([&m](const httplib::Request& req) { return m.step(req.path_params.at("id")); }));
  http_->Post("/sessions/:id/stop",
              guarded([&m](const httplib::Request& req) { return m.stop(req.path_params.at("id")); }));
  http_->Post("/sessions/:id/questionnaire", guarded([&m](const httplib::Request& req) {
                return m.questionnaire(req.path_params.at("id"), parse_body(req));
              }));
  http_->Get("/sessions/:id/summary",
             guarded([&m](const httplib::Request& req) { return m.summary(req.path_params.at("id")); }));
  http_->set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    send(res, res.status, {{"code", res.status == 404 ? "not-found" : "http"},
                           {"message", "no route for " + req.method + " " + req.path},
                           {"detail", nullptr}});
    return httplib::Server::HandlerResponse::Handled;
  });
}

bool Server::listen(const std::string& host, int port) { return http_->listen(host, port); }

int Server::bind_any(const std::string& host) { return http_->bind_to_any_port(host); }

bool Server::listen_after_bind() { return http_->listen_after_bind(); }

void Server::stop() { http_->stop(); }

}  // namespace trustplan::service
