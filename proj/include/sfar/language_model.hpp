// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0
//
// Candidate scoring. Any model that can give per-token log-probabilities
// can rank candidates; RecurrentLm is the small trainable default.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

#include "sfar/autograd.hpp"
#include "sfar/encoder.hpp"
#include "sfar/text.hpp"

namespace sfar {

class TokenLogProbModel {
 public:
  virtual ~TokenLogProbModel() = default;
  /// log P(seq[u] | EOS, seq[0..u-1]) for every position u.
  virtual std::vector<double> token_log_probs(const TokenIds& seq) const = 0;
  virtual std::size_t vocab_size() const = 0;
};

struct LmConfig {
  std::size_t vocab_size = 0;
  std::size_t emb_dim = 64;
  std::size_t hidden_dim = 64;

  nlohmann::json to_json() const;
  static LmConfig from_json(const nlohmann::json& j);
};

/// Single-layer LSTM language model. The output projection reuses the
/// embedding table (through a d_hid -> d_emb map when sizes differ) plus an
/// output bias.
class RecurrentLm : public TokenLogProbModel {
 public:
  RecurrentLm() = default;
  RecurrentLm(const LmConfig& config, std::uint64_t seed);
  RecurrentLm(const LmConfig& config, ParamSet params);

  std::vector<double> token_log_probs(const TokenIds& seq) const override;
  std::size_t vocab_size() const override { return config_.vocab_size; }

  /// Summed next-token NLL of seq followed by EOS, as a graph scalar.
  Tensor sequence_nll(Graph& g, const TokenIds& seq, const DropoutSpec& dropout = DropoutSpec::off()) const;

  const LmConfig& config() const { return config_; }
  const ParamSet& params() const { return params_; }
  ParamSet& params() { return params_; }

 private:
  void bind();
  Tensor step_log_probs(Graph& g, int prev, LstmState& state, const DropoutSpec& dropout) const;

  LmConfig config_;
  ParamSet params_;
  ParamId embedding_;
  LstmParams cell_;
  ParamId adapter_;
  ParamId out_bias_;
};

/// exp of the mean NLL of tokens + EOS. Throws on an empty sequence.
double lm_score(const TokenLogProbModel& lm, const TokenIds& tokens);

struct LmPerplexity {
  double nll = 0.0;
  std::size_t tokens = 0;
  double ppl() const;
};
/// Token-weighted perplexity over a corpus, each sequence closed by EOS.
LmPerplexity lm_perplexity(const TokenLogProbModel& lm, const std::vector<TokenIds>& corpus);

struct LmTrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 10;
  std::size_t patience = 2;
  std::size_t max_steps = 0;  // 0: no cap
  double dropout = 0.0;
  double clip_norm = 5.0;
  std::uint64_t seed = 0;
};

struct LmEpoch {
  std::size_t epoch = 0;
  double train_ppl = 0.0;
  double val_ppl = 0.0;
  double seconds = 0.0;
};

struct LmTrainResult {
  RecurrentLm lm;  // parameters of the best validation epoch
  std::vector<LmEpoch> history;
  double best_val_ppl = 0.0;
};

/// Next-token training with Adam. When `validation` is empty the training
/// corpus doubles as the held-out set. Throws if the corpus holds fewer
/// sequences than one batch.
LmTrainResult train_lm(const std::vector<TokenIds>& train, const std::vector<TokenIds>& validation,
                       const LmConfig& config, const LmTrainConfig& train_config,
                       const std::function<void(const LmEpoch&)>& on_epoch = {});

struct ScoredCandidate {
  Tokens tokens;
  double score = 0.0;  // perplexity under the ranker LM
  std::size_t beam = 0;
  std::vector<std::size_t> fill;  // rare-word index placed in each slot
};

/// Index of the minimum score; ties go to the lower beam index, then to
/// the lexicographically smaller token sequence. Throws on an empty list.
std::size_t rank(std::span<const ScoredCandidate> candidates);

}  // namespace sfar
