// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfar/chat_service.hpp"

#include <ctime>
#include <sstream>

namespace sfar {

using nlohmann::json;

struct ChatService::Session {
  std::mutex mutex;  // serialises the messages of one session
  SessionView view;
  std::vector<PersonaTrait> traits;
  std::vector<Tokens> turns;  // tokenised history fed to the model
};

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

json SessionView::to_json() const {
  json hist = json::array();
  for (const auto& t : history) hist.push_back({{"speaker", t.speaker}, {"text", t.text}});
  return {{"id", id}, {"persona", persona}, {"history", hist}, {"created", created}, {"debug", debug}};
}

ChatService::ChatService(ServiceOptions options) : options_(std::move(options)), rng_(options_.seed) {
  options_.generation.validate();
}

ChatService::~ChatService() = default;

void ChatService::load(LoadedModel model, std::shared_ptr<const TokenLogProbModel> lm,
                       std::vector<std::vector<std::string>> persona_pool) {
  const FillMode fill = options_.fill.value_or(uses_rerank(model.variant) ? FillMode::rerank : FillMode::pointer);
  if (fill == FillMode::rerank && !lm) throw Error("rerank fill needs a language model (--lm)");
  if (lm && lm->vocab_size() != model.vocab.size())
    throw Error("language model vocabulary does not match the sketch model");
  std::lock_guard lock(mutex_);
  model_ = std::make_shared<const LoadedModel>(std::move(model));
  lm_ = std::move(lm);
  persona_pool_ = std::move(persona_pool);
  fill_ = fill;
}

bool ChatService::ready() const {
  std::lock_guard lock(mutex_);
  return model_ != nullptr;
}

FillMode ChatService::fill_mode() const {
  std::lock_guard lock(mutex_);
  return fill_;
}

SessionView ChatService::create_session(const std::optional<std::vector<std::string>>& persona, bool debug) {
  std::lock_guard lock(mutex_);
  if (!model_) throw ServiceError(503, "model_not_loaded", "no model is loaded");
  auto s = std::make_shared<Session>();
  if (persona) {
    if (persona->empty()) throw ServiceError(400, "invalid_persona", "persona must hold at least one trait");
    s->view.persona = *persona;
  } else {
    if (persona_pool_.empty())
      throw ServiceError(400, "no_persona_pool", "no persona given and the service has no persona pool");
    std::uniform_int_distribution<std::size_t> d(0, persona_pool_.size() - 1);
    s->view.persona = persona_pool_[d(rng_)];
  }
  for (const auto& t : s->view.persona) s->traits.push_back(make_trait(t));
  std::string id;
  do {
    std::ostringstream ss;
    ss << std::hex << rng_();
    id = ss.str();
  } while (sessions_.count(id));
  s->view.id = id;
  s->view.created = utc_now();
  s->view.debug = debug;
  sessions_[id] = s;
  return s->view;
}

std::shared_ptr<ChatService::Session> ChatService::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "session_not_found", "unknown session '" + id + "'");
  return it->second;
}

MessageReply ChatService::post_message(const std::string& id, const std::string& text) {
  std::shared_ptr<Session> s = find(id);
  Tokens tokens = tokenize(text);
  if (tokens.empty()) throw ServiceError(400, "empty_message", "message text is empty");
  std::shared_ptr<const LoadedModel> model;
  std::shared_ptr<const TokenLogProbModel> lm;
  GenerationConfig cfg = options_.generation;
  {
    std::lock_guard lock(mutex_);
    model = model_;
    lm = lm_;
    cfg.fill = fill_;
  }
  if (!model) throw ServiceError(503, "model_not_loaded", "no model is loaded");

  std::lock_guard session_lock(s->mutex);
  std::vector<Tokens> turns = s->turns;
  turns.push_back(tokens);
  GenerationResult r = generate_response(model->model, model->vocab, lm.get(), s->traits, turns, cfg);
  s->turns = std::move(turns);
  s->turns.push_back(r.tokens);
  s->view.history.push_back({"human", text});
  s->view.history.push_back({"model", r.text});

  MessageReply reply;
  reply.reply = r.text;
  if (s->view.debug) {
    json d = r.debug.to_json();
    d["persona_text"] = r.debug.persona ? json(s->view.persona[*r.debug.persona]) : json(nullptr);
    reply.debug = std::move(d);
  }
  return reply;
}

SessionView ChatService::get_session(const std::string& id) const {
  std::shared_ptr<Session> s = find(id);
  std::lock_guard session_lock(s->mutex);
  return s->view;
}

json ChatService::health() const {
  std::lock_guard lock(mutex_);
  return {{"status", model_ ? "ok" : "loading"},
          {"checkpoint", options_.checkpoint_name},
          {"variant", model_ ? to_string(model_->variant) : std::string()},
          {"fill", to_string(fill_)},
          {"sessions", sessions_.size()}};
}

}  // namespace sfar
