// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0
//
// Word embeddings and the single-layer LSTM encoder shared by the
// conversation history and the persona traits.

#pragma once

#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sfar/autograd.hpp"
#include "sfar/text.hpp"

namespace sfar {

/// Dropout settings threaded through a forward pass. `rng` may be null
/// when training is false.
struct DropoutSpec {
  double p = 0.0;
  bool training = false;
  std::mt19937_64* rng = nullptr;
  bool on_embeddings = true;  // word embeddings fed to the recurrent cells
  bool on_context = true;     // decoder context before the output projection

  Tensor apply(Tensor x) const;
  Tensor embedding(Tensor x) const { return on_embeddings ? apply(x) : x; }
  Tensor context(Tensor x) const { return on_context ? apply(x) : x; }
  static DropoutSpec off() { return {}; }
};

// ---------------------------------------------------------------- embeddings

/// Row lookup; PAD maps to the zero vector. Throws for ids outside the table.
Tensor embed(Graph& g, ParamId table, int id);
std::vector<Tensor> embed(Graph& g, ParamId table, const TokenIds& ids);

/// Word vectors parsed from a text file: one line per word, the word
/// followed by its space-separated components. An optional word2vec-style
/// "<count> <dim>" header line is skipped.
struct WordVectors {
  std::size_t dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;
};

WordVectors read_word_vectors(const std::filesystem::path& path, std::size_t expected_dim = 0);

struct PretrainedCoverage {
  std::size_t matched = 0;
  std::size_t missing = 0;
};

/// Fills `table` (V x d) from `vectors`. Reserved symbols and words missing
/// from the file are drawn from N(0, 0.1^2). `pretrained_rows`, when given,
/// receives one flag per row.
PretrainedCoverage init_embeddings(Parameter& table, const Vocabulary& vocab, const WordVectors* vectors,
                                   std::mt19937_64& rng, std::vector<bool>* pretrained_rows = nullptr);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// ------------------------------------------------------------------- LSTM

struct LstmParams {
  ParamId w_input;   // 4h x input
  ParamId w_hidden;  // 4h x h
  ParamId bias;      // 4h, gate order: input, forget, candidate, output
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;

  static LstmParams create(ParamSet& params, const std::string& prefix, std::size_t input_dim,
                           std::size_t hidden_dim);
  static LstmParams bind(const ParamSet& params, const std::string& prefix);
  /// Glorot-uniform weights, zero bias except the forget gate (1.0).
  void init(ParamSet& params, std::mt19937_64& rng) const;
};

struct LstmState {
  Tensor h;
  Tensor c;
};

LstmState zero_state(Graph& g, std::size_t hidden_dim);
LstmState recurrent_step(Graph& g, Tensor x, const LstmState& state, const LstmParams& params);

struct SequenceEncoding {
  std::vector<Tensor> states;  // h_t for every input position
  LstmState final;
};

/// Left-to-right unrolling from the zero state. Throws on an empty sequence.
SequenceEncoding encode_sequence(Graph& g, const TokenIds& ids, const LstmParams& params, ParamId embedding,
                                 const DropoutSpec& dropout = DropoutSpec::off());

/// Encodes a PAD-padded batch (all rows equally long). At PAD positions the
/// state is carried over unchanged, so every row's states at its real
/// positions and its final state equal encode_sequence on the unpadded row.
/// Returned `states` hold one entry per real token only.
std::vector<SequenceEncoding> encode_batch(Graph& g, const std::vector<TokenIds>& padded, const LstmParams& params,
                                           ParamId embedding, const DropoutSpec& dropout = DropoutSpec::off());

/// Final hidden state of each trait, encoded independently.
std::vector<Tensor> encode_personas(Graph& g, const std::vector<TokenIds>& traits, const LstmParams& params,
                                    ParamId embedding, const DropoutSpec& dropout = DropoutSpec::off());

struct EncoderOutput {
  std::vector<Tensor> conv_states;
  Tensor conv_final;
  std::vector<Tensor> persona_finals;
};

}  // namespace sfar
