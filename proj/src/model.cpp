// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfar/model.hpp"

#include "sfar/error.hpp"

namespace sfar {

using nlohmann::json;

std::string to_string(Variant v) {
  switch (v) {
    case Variant::sf: return "SF";
    case Variant::sf_a: return "SF-A";
    case Variant::sf_r: return "SF-R";
    case Variant::sf_a_r: return "SF-A-R";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  if (name == "SF" || name == "sf") return Variant::sf;
  if (name == "SF-A" || name == "sf-a") return Variant::sf_a;
  if (name == "SF-R" || name == "sf-r") return Variant::sf_r;
  if (name == "SF-A-R" || name == "sf-a-r") return Variant::sf_a_r;
  throw Error("unknown model variant '" + name + "' (expected SF, SF-A, SF-R or SF-A-R)");
}

json ModelConfig::to_json() const {
  return {{"vocab_size", vocab_size},
          {"emb_dim", emb_dim},
          {"hidden_dim", hidden_dim},
          {"attention", attention == AttentionMode::full},
          {"shared_encoder", shared_encoder},
          {"dropout", dropout},
          {"dropout_embeddings", dropout_embeddings},
          {"dropout_context", dropout_context},
          {"pointer_per_step", pointer_per_step},
          {"max_history_turns", max_history_turns},
          {"lambda_global", lambda_global},
          {"lambda_local", lambda_local}};
}

ModelConfig ModelConfig::from_json(const json& j) {
  ModelConfig c;
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  c.emb_dim = j.at("emb_dim").get<std::size_t>();
  c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  c.attention = j.at("attention").get<bool>() ? AttentionMode::full : AttentionMode::none;
  c.shared_encoder = j.at("shared_encoder").get<bool>();
  c.dropout = j.at("dropout").get<double>();
  c.dropout_embeddings = j.at("dropout_embeddings").get<bool>();
  c.dropout_context = j.at("dropout_context").get<bool>();
  c.pointer_per_step = j.at("pointer_per_step").get<bool>();
  c.max_history_turns = j.at("max_history_turns").get<std::size_t>();
  c.lambda_global = j.at("lambda_global").get<double>();
  c.lambda_local = j.at("lambda_local").get<double>();
  return c;
}

SketchModel::SketchModel(const ModelConfig& config, std::uint64_t seed) : config_(config) {
  if (config.vocab_size <= static_cast<std::size_t>(kReservedCount)) throw Error("model vocabulary is too small");
  const std::size_t v = config.vocab_size, e = config.emb_dim, h = config.hidden_dim;
  embedding_ = params_.add("embedding", {v, e});
  conv_encoder_ = LstmParams::create(params_, "encoder", e, h);
  persona_encoder_ =
      config.shared_encoder ? conv_encoder_ : LstmParams::create(params_, "persona_encoder", e, h);
  memory_ = MemoryParams::create(params_, v, h);
  decoder_ = DecoderParams::create(params_, embedding_, e, h);
  pointer_ = PointerParams::create(params_, e, h);

  std::mt19937_64 rng(seed);
  init_normal(params_[embedding_], 0.1, rng);
  conv_encoder_.init(params_, rng);
  if (!config.shared_encoder) persona_encoder_.init(params_, rng);
  init_normal(params_[memory_.c1], 0.1, rng);
  init_normal(params_[memory_.c2], 0.1, rng);
  decoder_.init(params_, rng);
  pointer_.init(params_, rng);
  params_.round_to_f32();
}

SketchModel::SketchModel(const ModelConfig& config, ParamSet params) : config_(config), params_(std::move(params)) {
  bind();
}

void SketchModel::bind() {
  embedding_ = params_.require("embedding");
  conv_encoder_ = LstmParams::bind(params_, "encoder");
  persona_encoder_ = config_.shared_encoder ? conv_encoder_ : LstmParams::bind(params_, "persona_encoder");
  memory_ = MemoryParams::bind(params_);
  decoder_ = DecoderParams::bind(params_, embedding_);
  pointer_ = PointerParams::bind(params_);
  if (params_[embedding_].shape.rows != config_.vocab_size)
    throw Error("embedding rows do not match the configured vocabulary size");
}

PretrainedCoverage SketchModel::load_pretrained(const Vocabulary& vocab, const WordVectors& vectors,
                                                std::mt19937_64& rng) {
  auto cov = init_embeddings(params_[embedding_], vocab, &vectors, rng);
  params_.round_to_f32();
  return cov;
}

DropoutSpec SketchModel::dropout_spec(bool training, std::mt19937_64* rng) const {
  DropoutSpec d;
  d.p = config_.dropout;
  d.training = training;
  d.rng = rng;
  d.on_embeddings = config_.dropout_embeddings;
  d.on_context = config_.dropout_context;
  return d;
}

EncodedExample SketchModel::encode(const DialogueExample& ex, const Vocabulary& vocab) const {
  if (vocab.size() != config_.vocab_size) throw Error("vocabulary size does not match the model");
  if (ex.personas.empty()) throw Error("example has no persona traits");
  EncodedExample out;
  out.history = vocab.encode(ex.history_tokens(config_.max_history_turns));
  for (const auto& p : ex.personas) {
    TokenIds ids = vocab.encode(p.tokens);
    if (ids.empty()) ids.push_back(kEosId);
    out.traits.push_back(std::move(ids));
  }
  out.bank = MemoryBank::from_personas(ex.personas, vocab);
  out.sketch = vocab.encode(ex.sketch.tokens);
  for (std::size_t i = 0; i < out.sketch.size(); ++i)
    if (out.sketch[i] == kUnkId && ex.sketch.tokens[i] != kUnkToken) ++out.unknown_targets;
  out.sketch_info = ex.sketch;
  out.response = vocab.encode(ex.response);
  return out;
}

ModelContext SketchModel::encode_context(Graph& g, const EncodedExample& ex, const DropoutSpec& dropout) const {
  ModelContext ctx;
  SequenceEncoding conv = encode_sequence(g, ex.history, conv_encoder_, embedding_, dropout);
  ctx.encoder.conv_states = std::move(conv.states);
  ctx.encoder.conv_final = conv.final.h;
  if (config_.attention == AttentionMode::full)
    ctx.encoder.persona_finals = encode_personas(g, ex.traits, persona_encoder_, embedding_, dropout);
  ctx.bank = ex.bank;
  ctx.memory = memory_readout(g, ctx.encoder.conv_final, ctx.bank, memory_);
  ctx.initial = init_decoder_state(g, ctx.encoder.conv_final, ctx.memory.h_mem, decoder_);
  return ctx;
}

DecoderStep SketchModel::step(Graph& g, int y_prev, const LstmState& state, const ModelContext& ctx,
                              const DropoutSpec& dropout) const {
  return decode_step(g, y_prev, state, ctx.encoder, decoder_, config_.attention, dropout);
}

Tensor SketchModel::pointer_gates(Graph& g, const ModelContext& ctx, int y_prev, Tensor h_d) const {
  return global_pointer(g, embed(g, embedding_, y_prev), h_d, ctx.memory.keys, pointer_);
}

SketchLoss SketchModel::teacher_forced_loss(Graph& g, const EncodedExample& ex, const DropoutSpec& dropout,
                                            bool with_pointer) const {
  ModelContext ctx = encode_context(g, ex, dropout);
  TokenIds targets = ex.sketch;
  targets.push_back(kEosId);

  const bool pointer = with_pointer && !ctx.bank.empty();
  std::vector<std::size_t> local_labels;
  std::vector<double> global_labels;
  std::vector<Tensor> masked;
  std::vector<Tensor> global_terms, local_terms;
  if (pointer) {
    local_labels = local_pointer_labels(ctx.bank, ex.sketch_info, targets.size());
    global_labels = global_pointer_labels(ctx.bank, ex.response);
    if (!config_.pointer_per_step) {
      Tensor gates = pointer_gates(g, ctx, kEosId, ctx.initial.h);
      global_terms.push_back(global_pointer_loss(gates, global_labels));
      masked = mask_memory(ctx.memory.keys, gates);
    }
  }

  SketchLoss loss;
  LstmState state = ctx.initial;
  int prev = kEosId;
  for (int target : targets) {
    DecoderStep s = step(g, prev, state, ctx, dropout);
    loss.token_nll.push_back(ad::scale(ad::pick(s.log_probs, static_cast<std::size_t>(target)), -1.0));
    if (pointer) {
      if (config_.pointer_per_step) {
        Tensor gates = pointer_gates(g, ctx, prev, s.state.h);
        global_terms.push_back(global_pointer_loss(gates, global_labels));
        masked = mask_memory(ctx.memory.keys, gates);
      }
      const std::size_t u = local_terms.size();
      Tensor lp = ad::log_softmax(local_pointer_logits(g, s.state.h, masked, pointer_));
      local_terms.push_back(ad::scale(ad::pick(lp, local_labels[u]), -1.0));
    }
    state = s.state;
    prev = target;
  }
  loss.tokens = targets.size();
  loss.nll = ad::add_n(loss.token_nll);
  loss.total = loss.nll;
  if (pointer) {
    loss.global = ad::add_n(global_terms);
    loss.local = ad::add_n(local_terms);
    Tensor parts[] = {loss.nll, ad::scale(loss.global, config_.lambda_global),
                      ad::scale(loss.local, config_.lambda_local)};
    loss.total = ad::add_n(parts);
  }
  return loss;
}

}  // namespace sfar
