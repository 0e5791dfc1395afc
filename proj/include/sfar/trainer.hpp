// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0
//
// Mini-batch training of the sketch model.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "sfar/model.hpp"
#include "sfar/optimizer.hpp"

namespace sfar {

struct TrainConfig {
  Variant variant = Variant::sf_a_r;
  std::size_t hidden_dim = 300;
  std::size_t emb_dim = 300;
  double learning_rate = 1e-4;
  std::size_t batch_size = 32;
  double dropout = 0.4;
  std::size_t max_epochs = 30;
  std::size_t patience = 3;
  std::size_t max_steps = 0;  // 0: no cap
  std::uint64_t seed = 0;
  double lambda_global = 1.0;
  double lambda_local = 1.0;
  double clip_norm = 5.0;
  bool pointer_per_step = false;
  std::size_t max_history_turns = 10;
  Precision precision = Precision::f32;

  ModelConfig model_config(std::size_t vocab_size) const;
  nlohmann::json to_json() const;
};

struct LossBreakdown {
  double nll = 0.0;
  double global = 0.0;
  double local = 0.0;
  double total = 0.0;
  std::size_t tokens = 0;
  std::size_t examples = 0;
};

/// Summed loss of a batch. With `grads` set, the gradient of the total is
/// accumulated into it.
LossBreakdown compute_loss(const SketchModel& model, std::span<const EncodedExample> batch,
                           const DropoutSpec& dropout, GradBuffer* grads = nullptr,
                           Precision precision = Precision::f32);

struct SketchPerplexity {
  double nll = 0.0;
  std::size_t tokens = 0;
  double ppl() const;
};

/// exp(total sketch NLL / total sketch tokens), closing EOS included, no
/// dropout and no pointer terms.
SketchPerplexity sketch_perplexity(const SketchModel& model, std::span<const EncodedExample> examples);

struct EpochMetrics {
  std::size_t epoch = 0;
  std::size_t steps = 0;  // cumulative optimizer steps
  double train_ppl = 0.0;
  double val_ppl = 0.0;
  double seconds = 0.0;

  nlohmann::json to_json() const;
};

struct TrainResult {
  SketchModel model;          // best validation epoch
  OptimizerState optimizer;   // state after the last step
  std::vector<EpochMetrics> history;
  std::vector<double> step_losses;  // mean per-example total loss of each step
  double best_val_ppl = 0.0;
  std::size_t best_epoch = 0;
  std::size_t steps = 0;
};

struct TrainHooks {
  std::function<void(const EpochMetrics&)> on_epoch;
  std::optional<std::filesystem::path> metrics_path;  // JSON lines, one per epoch
  const SketchModel* initial = nullptr;                // resume from these weights
  const OptimizerState* initial_optimizer = nullptr;
};

/// Shuffled mini-batches, Adam on the batch-mean loss, global-norm clipping,
/// validation perplexity after every epoch, best-epoch keeping and early
/// stopping. A non-finite loss or gradient aborts with the step index.
TrainResult train(const std::vector<EncodedExample>& train_set, const std::vector<EncodedExample>& validation,
                  std::size_t vocab_size, const TrainConfig& config, const TrainHooks& hooks = {});

}  // namespace sfar
