// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0
//
// The sketch model: encoder, persona memory, attention decoder and the
// auxiliary memory pointer, with one ParamSet holding every weight.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "sfar/decoder.hpp"
#include "sfar/encoder.hpp"
#include "sfar/memory.hpp"
#include "sfar/pointer.hpp"
#include "sfar/text.hpp"

namespace sfar {

/// The four trained/inferred configurations. The "-R" variants share the
/// training of their counterpart and differ only in how slots are filled.
enum class Variant { sf, sf_a, sf_r, sf_a_r };

std::string to_string(Variant v);
Variant parse_variant(const std::string& name);
inline bool uses_attention(Variant v) { return v == Variant::sf_a || v == Variant::sf_a_r; }
inline bool uses_rerank(Variant v) { return v == Variant::sf_r || v == Variant::sf_a_r; }

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t emb_dim = 300;
  std::size_t hidden_dim = 300;
  AttentionMode attention = AttentionMode::full;
  bool shared_encoder = true;
  double dropout = 0.4;
  bool dropout_embeddings = true;
  bool dropout_context = true;
  bool pointer_per_step = false;
  std::size_t max_history_turns = 10;
  double lambda_global = 1.0;
  double lambda_local = 1.0;

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

/// A dialogue example mapped to vocabulary ids.
struct EncodedExample {
  TokenIds history;
  std::vector<TokenIds> traits;
  MemoryBank bank;
  TokenIds sketch;    // decoder targets without the closing EOS
  Sketch sketch_info;
  TokenIds response;  // for global pointer labels
  std::size_t unknown_targets = 0;  // sketch tokens that mapped to UNK
};

/// Everything the decoder needs about one input, built in a graph.
/// Persona finals are only computed when attention is on.
struct ModelContext {
  EncoderOutput encoder;
  MemoryBank bank;
  MemoryReadout memory;
  LstmState initial;
};

struct SketchLoss {
  Tensor nll;                    // summed over target tokens
  std::vector<Tensor> token_nll;  // one per target, closing EOS included
  Tensor global;                 // undefined when the bank is empty
  Tensor local;                  // undefined when the bank is empty
  Tensor total;                  // nll + lambda_g global + lambda_l local
  std::size_t tokens = 0;
};

class SketchModel {
 public:
  SketchModel() = default;
  /// Allocates and initialises every parameter from `seed`.
  SketchModel(const ModelConfig& config, std::uint64_t seed);
  /// Wraps existing parameters (e.g. from a checkpoint).
  SketchModel(const ModelConfig& config, ParamSet params);

  const ModelConfig& config() const { return config_; }
  ModelConfig& mutable_config() { return config_; }
  const ParamSet& params() const { return params_; }
  ParamSet& params() { return params_; }

  ParamId embedding() const { return embedding_; }
  const LstmParams& conv_encoder() const { return conv_encoder_; }
  const LstmParams& persona_encoder() const { return persona_encoder_; }
  const MemoryParams& memory() const { return memory_; }
  const DecoderParams& decoder() const { return decoder_; }
  const PointerParams& pointer() const { return pointer_; }

  EncodedExample encode(const DialogueExample& ex, const Vocabulary& vocab) const;
  ModelContext encode_context(Graph& g, const EncodedExample& ex, const DropoutSpec& dropout) const;
  DecoderStep step(Graph& g, int y_prev, const LstmState& state, const ModelContext& ctx,
                   const DropoutSpec& dropout) const;

  /// Teacher-forced loss over the sketch (start symbol EOS, closing EOS as
  /// last target), plus the pointer losses when `with_pointer` is set and
  /// the bank is non-empty.
  SketchLoss teacher_forced_loss(Graph& g, const EncodedExample& ex, const DropoutSpec& dropout,
                                 bool with_pointer = true) const;

  /// Pointer gates used for the whole response (once-per-response mode) or
  /// for step `u` given its previous token and state (per-step mode).
  Tensor pointer_gates(Graph& g, const ModelContext& ctx, int y_prev, Tensor h_d) const;

  DropoutSpec dropout_spec(bool training, std::mt19937_64* rng) const;

  /// Overwrites the embedding table from pretrained vectors.
  PretrainedCoverage load_pretrained(const Vocabulary& vocab, const WordVectors& vectors, std::mt19937_64& rng);

 private:
  void bind();

  ModelConfig config_;
  ParamSet params_;
  ParamId embedding_;
  LstmParams conv_encoder_;
  LstmParams persona_encoder_;
  MemoryParams memory_;
  DecoderParams decoder_;
  PointerParams pointer_;
};

}  // namespace sfar
