// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <httplib.h>

#include <thread>

#include "sfar/http_server.hpp"
#include "support.hpp"

using namespace sfar;
using nlohmann::json;

namespace {

struct Running {
  ChatService service;
  HttpServer server;
  int port = 0;
  std::thread thread;

  explicit Running(bool load = true) : service(options()), server(service) {
    if (load) service.load(sfar::testing::tiny_loaded(Variant::sf_a), nullptr, {{"i am a nurse ."}});
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~Running() {
    server.stop();
    thread.join();
  }
  static ServiceOptions options() {
    ServiceOptions o;
    o.generation.beam_size = 2;
    o.generation.candidate_cap = 4;
    o.generation.max_length = 6;
    o.checkpoint_name = "tiny.sfar";
    return o;
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

}  // namespace

TEST_CASE("health reports the checkpoint") {
  Running r;
  auto cli = r.client();
  auto res = cli.Get("/api/health");
  REQUIRE(res);
  CHECK(res->status == 200);
  const auto j = json::parse(res->body);
  CHECK(j["status"] == "ok");
  CHECK(j["checkpoint"] == "tiny.sfar");
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
}

TEST_CASE("session lifecycle over http") {
  Running r;
  auto cli = r.client();
  auto created = cli.Post("/api/session", R"({"persona": ["i am a bee farmer ."], "debug": true})",
                          "application/json");
  REQUIRE(created);
  CHECK(created->status == 200);
  const auto s = json::parse(created->body);
  const std::string id = s["id"];
  CHECK(s["persona"] == json::array({"i am a bee farmer ."}));

  auto msg = cli.Post("/api/session/" + id + "/message", R"({"text": "what do you do ?"})", "application/json");
  REQUIRE(msg);
  CHECK(msg->status == 200);
  const auto m = json::parse(msg->body);
  CHECK(m["reply"].is_string());
  CHECK(m.contains("debug"));

  auto view = cli.Get("/api/session/" + id);
  REQUIRE(view);
  const auto v = json::parse(view->body);
  CHECK(v["history"].size() == 2);
  CHECK(v["history"][1]["text"] == m["reply"]);

  auto pooled = cli.Post("/api/session", "", "application/json");
  REQUIRE(pooled);
  CHECK(json::parse(pooled->body)["persona"] == json::array({"i am a nurse ."}));
}

TEST_CASE("errors map to status codes") {
  Running r;
  auto cli = r.client();
  auto missing = cli.Get("/api/session/nope");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(json::parse(missing->body)["code"] == "session_not_found");

  auto bad_json = cli.Post("/api/session", "{oops", "application/json");
  REQUIRE(bad_json);
  CHECK(bad_json->status == 400);
  CHECK(json::parse(bad_json->body)["code"] == "invalid_json");

  auto bad_persona = cli.Post("/api/session", R"({"persona": "x"})", "application/json");
  REQUIRE(bad_persona);
  CHECK(bad_persona->status == 400);

  auto s = json::parse(cli.Post("/api/session", "{}", "application/json")->body);
  auto no_text = cli.Post("/api/session/" + s["id"].get<std::string>() + "/message", "{}", "application/json");
  REQUIRE(no_text);
  CHECK(no_text->status == 400);

  auto pre = cli.Options("/api/session");
  REQUIRE(pre);
  CHECK(pre->status == 204);
}

TEST_CASE("service without a model answers 503") {
  Running r(false);
  auto cli = r.client();
  auto res = cli.Post("/api/session", R"({"persona": ["x y"]})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 503);
  CHECK(json::parse(cli.Get("/api/health")->body)["status"] == "loading");
}
