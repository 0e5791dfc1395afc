// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sfar/autograd.hpp"

namespace sfar {

/// Softmax of a plain vector with max subtraction. Throws NumericError on NaN.
std::vector<double> softmax(std::span<const double> x);

struct CrossEntropy {
  double value = 0.0;
  bool clamped = false;  // the target probability was below eps
};

/// -log dist[target], with dist[target] clamped at eps.
CrossEntropy cross_entropy(std::span<const double> dist, std::size_t target, double eps = 1e-12);

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment estimates for every parameter of a ParamSet.
struct OptimizerState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;

  OptimizerState() = default;
  OptimizerState(const ParamSet& params, AdamConfig cfg);
};

/// One bias-corrected Adam update. Throws NumericError naming the parameter
/// if any gradient is not finite; parameters are untouched in that case.
void adam_step(ParamSet& params, const GradBuffer& grads, OptimizerState& state,
               Precision precision = Precision::f32);

/// Rescales grads so their global L2 norm is at most max_norm. Returns the
/// norm before clipping.
double clip_global_norm(GradBuffer& grads, double max_norm);

}  // namespace sfar
