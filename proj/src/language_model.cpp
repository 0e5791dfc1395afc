// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfar/language_model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "sfar/error.hpp"
#include "sfar/optimizer.hpp"

namespace sfar {

using nlohmann::json;

json LmConfig::to_json() const {
  return {{"vocab_size", vocab_size}, {"emb_dim", emb_dim}, {"hidden_dim", hidden_dim}};
}

LmConfig LmConfig::from_json(const json& j) {
  LmConfig c;
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  c.emb_dim = j.at("emb_dim").get<std::size_t>();
  c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  return c;
}

RecurrentLm::RecurrentLm(const LmConfig& config, std::uint64_t seed) : config_(config) {
  if (config.vocab_size <= static_cast<std::size_t>(kReservedCount))
    throw Error("language model vocabulary is too small");
  embedding_ = params_.add("lm.embedding", {config.vocab_size, config.emb_dim});
  cell_ = LstmParams::create(params_, "lm.cell", config.emb_dim, config.hidden_dim);
  if (config.emb_dim != config.hidden_dim)
    adapter_ = params_.add("lm.adapter", {config.emb_dim, config.hidden_dim});
  out_bias_ = params_.add("lm.out_bias", {config.vocab_size, 1});
  std::mt19937_64 rng(seed);
  init_normal(params_[embedding_], 0.1, rng);
  cell_.init(params_, rng);
  if (adapter_.valid()) init_glorot_uniform(params_[adapter_], rng);
  params_.round_to_f32();
}

RecurrentLm::RecurrentLm(const LmConfig& config, ParamSet params) : config_(config), params_(std::move(params)) {
  bind();
}

void RecurrentLm::bind() {
  embedding_ = params_.require("lm.embedding");
  cell_ = LstmParams::bind(params_, "lm.cell");
  adapter_ = params_.find("lm.adapter");
  out_bias_ = params_.require("lm.out_bias");
  if (params_[embedding_].shape.rows != config_.vocab_size)
    throw Error("language model embedding does not match its vocabulary size");
}

Tensor RecurrentLm::step_log_probs(Graph& g, int prev, LstmState& state, const DropoutSpec& dropout) const {
  state = recurrent_step(g, dropout.embedding(embed(g, embedding_, prev)), state, cell_);
  Tensor h = dropout.context(state.h);
  if (adapter_.valid()) h = ad::matvec(g.param(adapter_), h);
  return ad::log_softmax(ad::add(ad::matvec(g.param(embedding_), h), g.param(out_bias_)));
}

Tensor RecurrentLm::sequence_nll(Graph& g, const TokenIds& seq, const DropoutSpec& dropout) const {
  LstmState state = zero_state(g, config_.hidden_dim);
  std::vector<Tensor> terms;
  terms.reserve(seq.size() + 1);
  int prev = kEosId;
  for (std::size_t u = 0; u <= seq.size(); ++u) {
    const int target = u < seq.size() ? seq[u] : kEosId;
    Tensor lp = step_log_probs(g, prev, state, dropout);
    terms.push_back(ad::scale(ad::pick(lp, static_cast<std::size_t>(target)), -1.0));
    prev = target;
  }
  return ad::add_n(terms);
}

std::vector<double> RecurrentLm::token_log_probs(const TokenIds& seq) const {
  Graph g(params_);
  LstmState state = zero_state(g, config_.hidden_dim);
  std::vector<double> out;
  out.reserve(seq.size());
  int prev = kEosId;
  for (int target : seq) {
    if (target < 0 || static_cast<std::size_t>(target) >= config_.vocab_size)
      throw Error("token id " + std::to_string(target) + " is outside the language model vocabulary");
    Tensor lp = step_log_probs(g, prev, state, DropoutSpec::off());
    out.push_back(lp[static_cast<std::size_t>(target)]);
    prev = target;
  }
  return out;
}

double lm_score(const TokenLogProbModel& lm, const TokenIds& tokens) {
  if (tokens.empty()) throw Error("lm_score: empty sequence");
  TokenIds seq = tokens;
  seq.push_back(kEosId);
  const auto lp = lm.token_log_probs(seq);
  double nll = 0.0;
  for (double v : lp) nll -= v;
  return std::exp(nll / static_cast<double>(lp.size()));
}

double LmPerplexity::ppl() const {
  if (tokens == 0) throw Error("perplexity over zero tokens");
  return std::exp(nll / static_cast<double>(tokens));
}

LmPerplexity lm_perplexity(const TokenLogProbModel& lm, const std::vector<TokenIds>& corpus) {
  LmPerplexity out;
  for (const auto& seq : corpus) {
    TokenIds s = seq;
    s.push_back(kEosId);
    for (double v : lm.token_log_probs(s)) out.nll -= v;
    out.tokens += s.size();
  }
  return out;
}

LmTrainResult train_lm(const std::vector<TokenIds>& train, const std::vector<TokenIds>& validation,
                       const LmConfig& config, const LmTrainConfig& tc,
                       const std::function<void(const LmEpoch&)>& on_epoch) {
  if (train.empty()) throw Error("train_lm: empty corpus");
  if (tc.batch_size == 0) throw Error("train_lm: batch size must be positive");
  if (train.size() < tc.batch_size)
    throw Error("train_lm: corpus has " + std::to_string(train.size()) + " sequences, fewer than one batch of " +
                std::to_string(tc.batch_size));
  const std::vector<TokenIds>& held_out = validation.empty() ? train : validation;

  LmTrainResult result;
  RecurrentLm lm(config, tc.seed);
  AdamConfig adam;
  adam.learning_rate = tc.learning_rate;
  OptimizerState opt(lm.params(), adam);
  GradBuffer grads(lm.params());
  std::mt19937_64 rng(tc.seed);
  std::mt19937_64 drop_rng(tc.seed ^ 0x5eedULL);
  DropoutSpec dropout;
  dropout.p = tc.dropout;
  dropout.training = tc.dropout > 0.0;
  dropout.rng = &drop_rng;

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  ParamSet best = lm.params();
  double best_ppl = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0, steps = 0;
  bool stop = false;

  for (std::size_t epoch = 1; epoch <= tc.max_epochs && !stop; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_nll = 0.0;
    std::size_t epoch_tokens = 0;
    for (std::size_t start = 0; start + tc.batch_size <= order.size(); start += tc.batch_size) {
      grads.zero();
      for (std::size_t k = start; k < start + tc.batch_size; ++k) {
        const TokenIds& seq = train[order[k]];
        Graph g(lm.params(), &grads);
        Tensor nll = lm.sequence_nll(g, seq, dropout);
        if (!std::isfinite(nll.item()))
          throw NumericError("language model training diverged at step " + std::to_string(steps));
        g.backward(nll);
        epoch_nll += nll.item();
        epoch_tokens += seq.size() + 1;
      }
      grads.scale(1.0 / static_cast<double>(tc.batch_size));
      clip_global_norm(grads, tc.clip_norm);
      adam_step(lm.params(), grads, opt);
      ++steps;
      if (tc.max_steps && steps >= tc.max_steps) {
        stop = true;
        break;
      }
    }
    LmEpoch rec;
    rec.epoch = epoch;
    rec.train_ppl = epoch_tokens ? std::exp(epoch_nll / static_cast<double>(epoch_tokens)) : 0.0;
    rec.val_ppl = lm_perplexity(lm, held_out).ppl();
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (rec.val_ppl < best_ppl) {
      best_ppl = rec.val_ppl;
      best = lm.params();
      since_best = 0;
    } else if (++since_best >= tc.patience) {
      stop = true;
    }
  }
  result.lm = RecurrentLm(config, std::move(best));
  result.best_val_ppl = best_ppl;
  return result;
}

std::size_t rank(std::span<const ScoredCandidate> candidates) {
  if (candidates.empty()) throw Error("rank: no candidates");
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const auto& a = candidates[i];
    const auto& b = candidates[best];
    if (a.score != b.score) {
      if (a.score < b.score) best = i;
    } else if (a.beam != b.beam) {
      if (a.beam < b.beam) best = i;
    } else if (a.tokens < b.tokens) {
      best = i;
    }
  }
  return best;
}

}  // namespace sfar
