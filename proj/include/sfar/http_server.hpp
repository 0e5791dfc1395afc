// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0
//
// JSON-over-HTTP front end for ChatService.
//
//   POST /api/session               {persona?: [string], debug?: bool} -> {id, persona}
//   POST /api/session/{id}/message  {text}                             -> {reply, debug?}
//   GET  /api/session/{id}                                             -> {persona, history}
//   GET  /api/health                                                   -> {status, checkpoint}
//
// Errors are {error, code} with a matching HTTP status.

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "sfar/chat_service.hpp"

namespace sfar {

struct HttpOptions {
  std::string cors_origin = "*";
  std::optional<std::filesystem::path> static_dir;  // served at /
};

class HttpServer {
 public:
  HttpServer(ChatService& service, HttpOptions options = {});
  ~HttpServer();

  /// Blocks until stop().
  bool listen(const std::string& host, int port);
  /// Binds to a free port and returns it; follow with listen_after_bind().
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  bool is_running() const;
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sfar
