// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfar/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "sfar/error.hpp"

namespace sfar {

using nlohmann::json;

ModelConfig TrainConfig::model_config(std::size_t vocab_size) const {
  ModelConfig c;
  c.vocab_size = vocab_size;
  c.emb_dim = emb_dim;
  c.hidden_dim = hidden_dim;
  c.attention = uses_attention(variant) ? AttentionMode::full : AttentionMode::none;
  c.dropout = dropout;
  c.pointer_per_step = pointer_per_step;
  c.max_history_turns = max_history_turns;
  c.lambda_global = lambda_global;
  c.lambda_local = lambda_local;
  return c;
}

json TrainConfig::to_json() const {
  return {{"variant", to_string(variant)},   {"hidden_dim", hidden_dim},
          {"emb_dim", emb_dim},              {"learning_rate", learning_rate},
          {"batch_size", batch_size},        {"dropout", dropout},
          {"max_epochs", max_epochs},        {"patience", patience},
          {"max_steps", max_steps},          {"seed", seed},
          {"lambda_global", lambda_global},  {"lambda_local", lambda_local},
          {"clip_norm", clip_norm},          {"pointer_per_step", pointer_per_step},
          {"max_history_turns", max_history_turns}};
}

LossBreakdown compute_loss(const SketchModel& model, std::span<const EncodedExample> batch,
                           const DropoutSpec& dropout, GradBuffer* grads, Precision precision) {
  if (batch.empty()) throw Error("compute_loss: empty batch");
  LossBreakdown out;
  for (const auto& ex : batch) {
    Graph g(model.params(), grads, precision);
    SketchLoss loss = model.teacher_forced_loss(g, ex, dropout, true);
    out.nll += loss.nll.item();
    if (loss.global.defined()) out.global += loss.global.item();
    if (loss.local.defined()) out.local += loss.local.item();
    out.total += loss.total.item();
    out.tokens += loss.tokens;
    ++out.examples;
    if (grads) {
      if (!std::isfinite(loss.total.item())) throw NumericError("non-finite loss");
      g.backward(loss.total);
    }
  }
  return out;
}

double SketchPerplexity::ppl() const {
  if (tokens == 0) throw Error("perplexity over zero tokens");
  return std::exp(nll / static_cast<double>(tokens));
}

SketchPerplexity sketch_perplexity(const SketchModel& model, std::span<const EncodedExample> examples) {
  SketchPerplexity out;
  for (const auto& ex : examples) {
    Graph g(model.params());
    SketchLoss loss = model.teacher_forced_loss(g, ex, DropoutSpec::off(), false);
    out.nll += loss.nll.item();
    out.tokens += loss.tokens;
  }
  return out;
}

json EpochMetrics::to_json() const {
  return {{"epoch", epoch}, {"steps", steps}, {"train_ppl", train_ppl}, {"val_ppl", val_ppl}, {"wall_time", seconds}};
}

TrainResult train(const std::vector<EncodedExample>& train_set, const std::vector<EncodedExample>& validation,
                  std::size_t vocab_size, const TrainConfig& config, const TrainHooks& hooks) {
  if (train_set.empty()) throw Error("train: empty training set");
  if (validation.empty()) throw Error("train: empty validation set");
  if (config.batch_size == 0) throw Error("train: batch size must be positive");

  SketchModel model = hooks.initial ? *hooks.initial : SketchModel(config.model_config(vocab_size), config.seed);
  AdamConfig adam;
  adam.learning_rate = config.learning_rate;
  OptimizerState opt = hooks.initial_optimizer ? *hooks.initial_optimizer : OptimizerState(model.params(), adam);
  opt.config.learning_rate = config.learning_rate;
  GradBuffer grads(model.params());

  std::mt19937_64 shuffle_rng(config.seed);
  std::mt19937_64 dropout_rng(config.seed + 0x9e3779b97f4a7c15ULL);
  const DropoutSpec dropout = model.dropout_spec(config.dropout > 0.0, &dropout_rng);

  std::ofstream metrics;
  if (hooks.metrics_path) {
    metrics.open(*hooks.metrics_path, std::ios::trunc);
    if (!metrics) throw Error("cannot write metrics to " + hooks.metrics_path->string());
  }

  TrainResult result;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  ParamSet best = model.params();
  double best_ppl = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0, steps = 0;
  bool stop = false;

  for (std::size_t epoch = 1; epoch <= config.max_epochs && !stop; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_nll = 0.0;
    std::size_t epoch_tokens = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<EncodedExample> batch;
      batch.reserve(end - start);
      for (std::size_t k = start; k < end; ++k) batch.push_back(train_set[order[k]]);

      grads.zero();
      LossBreakdown lb;
      try {
        lb = compute_loss(model, batch, dropout, &grads, config.precision);
      } catch (const NumericError& e) {
        throw NumericError("training diverged at step " + std::to_string(steps) + ": " + e.what());
      }
      if (!std::isfinite(lb.total))
        throw NumericError("training diverged at step " + std::to_string(steps) + ": non-finite loss");
      grads.scale(1.0 / static_cast<double>(batch.size()));
      if (config.clip_norm > 0.0) clip_global_norm(grads, config.clip_norm);
      try {
        adam_step(model.params(), grads, opt, config.precision);
      } catch (const NumericError& e) {
        throw NumericError("training diverged at step " + std::to_string(steps) + ": " + e.what());
      }
      ++steps;
      result.step_losses.push_back(lb.total / static_cast<double>(batch.size()));
      epoch_nll += lb.nll;
      epoch_tokens += lb.tokens;
      if (config.max_steps && steps >= config.max_steps) {
        stop = true;
        break;
      }
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.steps = steps;
    m.train_ppl = std::exp(epoch_nll / static_cast<double>(std::max<std::size_t>(epoch_tokens, 1)));
    m.val_ppl = sketch_perplexity(model, validation).ppl();
    m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.history.push_back(m);
    if (metrics) metrics << m.to_json().dump() << '\n' << std::flush;
    if (hooks.on_epoch) hooks.on_epoch(m);

    if (m.val_ppl < best_ppl) {
      best_ppl = m.val_ppl;
      best = model.params();
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      stop = true;
    }
  }

  result.model = SketchModel(model.config(), std::move(best));
  result.optimizer = std::move(opt);
  result.best_val_ppl = best_ppl;
  result.steps = steps;
  return result;
}

}  // namespace sfar
