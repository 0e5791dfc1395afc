// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0
//
// Chat sessions over a loaded model, independent of any transport.

#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "sfar/checkpoint.hpp"
#include "sfar/error.hpp"
#include "sfar/inference.hpp"

namespace sfar {

class ServiceError : public Error {
 public:
  ServiceError(int status, std::string code, const std::string& what)
      : Error(what), status_(status), code_(std::move(code)) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }

 private:
  int status_;
  std::string code_;
};

struct ServiceOptions {
  GenerationConfig generation{.beam_size = 10};
  std::optional<FillMode> fill;  // default: rerank for -R variants, pointer otherwise
  std::uint64_t seed = 0;
  std::string checkpoint_name;
};

struct Turn {
  std::string speaker;  // "human" or "model"
  std::string text;
};

struct SessionView {
  std::string id;
  std::vector<std::string> persona;
  std::vector<Turn> history;
  std::string created;  // ISO 8601, UTC
  bool debug = false;

  nlohmann::json to_json() const;
};

struct MessageReply {
  std::string reply;
  std::optional<nlohmann::json> debug;
};

class ChatService {
 public:
  explicit ChatService(ServiceOptions options = {});
  ~ChatService();

  /// Installs the model. `lm` may be null when the fill mode is pointer.
  void load(LoadedModel model, std::shared_ptr<const TokenLogProbModel> lm,
            std::vector<std::vector<std::string>> persona_pool);
  bool ready() const;

  /// Without a persona one is drawn from the pool.
  SessionView create_session(const std::optional<std::vector<std::string>>& persona, bool debug = false);
  MessageReply post_message(const std::string& id, const std::string& text);
  SessionView get_session(const std::string& id) const;
  nlohmann::json health() const;
  FillMode fill_mode() const;

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id) const;

  ServiceOptions options_;
  mutable std::mutex mutex_;  // guards sessions_, rng_ and the loaded state
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mt19937_64 rng_;
  std::shared_ptr<const LoadedModel> model_;
  std::shared_ptr<const TokenLogProbModel> lm_;
  std::vector<std::vector<std::string>> persona_pool_;
  FillMode fill_ = FillMode::pointer;
};

}  // namespace sfar
