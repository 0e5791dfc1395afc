// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfar/http_server.hpp"

#include <httplib.h>

namespace sfar {

using nlohmann::json;

struct HttpServer::Impl {
  ChatService& service;
  HttpOptions options;
  httplib::Server server;

  Impl(ChatService& s, HttpOptions o) : service(s), options(std::move(o)) {}

  void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
    send_json(res, {{"error", message}, {"code", code}}, status);
  }

  // Runs a handler and maps library errors onto JSON error bodies.
  template <class F>
  void guarded(httplib::Response& res, F&& f) {
    try {
      f();
    } catch (const ServiceError& e) {
      send_error(res, e.status(), e.code(), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "invalid_json", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal_error", e.what());
    }
  }

  static json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    json j = json::parse(req.body);
    if (!j.is_object()) throw ServiceError(400, "invalid_request", "request body must be a JSON object");
    return j;
  }

  void install() {
    server.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Get("/api/health", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { send_json(res, service.health()); });
    });

    server.Post("/api/session", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const json body = parse_body(req);
        std::optional<std::vector<std::string>> persona;
        if (body.contains("persona") && !body["persona"].is_null()) {
          if (!body["persona"].is_array())
            throw ServiceError(400, "invalid_persona", "persona must be an array of strings");
          persona = body["persona"].get<std::vector<std::string>>();
        }
        const bool debug = body.value("debug", false);
        const SessionView v = service.create_session(persona, debug);
        send_json(res, {{"id", v.id}, {"persona", v.persona}, {"debug", v.debug}, {"created", v.created}});
      });
    });

    server.Post(R"(/api/session/([^/]+)/message)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const json body = parse_body(req);
        if (!body.contains("text") || !body["text"].is_string())
          throw ServiceError(400, "invalid_request", "body must contain a string field 'text'");
        const MessageReply r = service.post_message(req.matches[1], body["text"].get<std::string>());
        json out = {{"reply", r.reply}};
        if (r.debug) out["debug"] = *r.debug;
        send_json(res, out);
      });
    });

    server.Get(R"(/api/session/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const SessionView v = service.get_session(req.matches[1]);
        send_json(res, v.to_json());
      });
    });

    if (options.static_dir) server.set_mount_point("/", options.static_dir->string());
  }
};

HttpServer::HttpServer(ChatService& service, HttpOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
  impl_->install();
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }
int HttpServer::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }
void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}
bool HttpServer::is_running() const { return impl_->server.is_running(); }
void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace sfar
