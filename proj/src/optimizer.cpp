// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfar/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfar/error.hpp"

namespace sfar {

std::vector<double> softmax(std::span<const double> x) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : x) {
    if (std::isnan(v)) throw NumericError("softmax: NaN input");
    mx = std::max(mx, v);
  }
  std::vector<double> out(x.size());
  double z = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - mx);
    z += out[i];
  }
  for (double& v : out) v /= z;
  return out;
}

CrossEntropy cross_entropy(std::span<const double> dist, std::size_t target, double eps) {
  if (target >= dist.size()) throw Error("cross_entropy: target outside the distribution");
  const double p = dist[target];
  if (p < eps) return {-std::log(eps), true};
  return {-std::log(p), false};
}

OptimizerState::OptimizerState(const ParamSet& params, AdamConfig cfg) : config(cfg) {
  for (const auto& p : params) {
    m.emplace_back(p.value.size(), 0.0);
    v.emplace_back(p.value.size(), 0.0);
  }
}

void adam_step(ParamSet& params, const GradBuffer& grads, OptimizerState& state, Precision precision) {
  if (grads.size() != params.size() || state.m.size() != params.size())
    throw Error("adam_step: parameter, gradient and state sizes disagree");
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto g = grads[ParamId{i}];
    for (double x : g)
      if (!std::isfinite(x)) throw NumericError("non-finite gradient for parameter " + params[ParamId{i}].name);
  }

  ++state.step;
  const auto& c = state.config;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[ParamId{i}].value;
    auto g = grads[ParamId{i}];
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = c.beta1 * m[j] + (1.0 - c.beta1) * g[j];
      v[j] = c.beta2 * v[j] + (1.0 - c.beta2) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      p[j] -= c.learning_rate * mhat / (std::sqrt(vhat) + c.epsilon);
      if (precision == Precision::f32) p[j] = static_cast<double>(static_cast<float>(p[j]));
    }
  }
}

double clip_global_norm(GradBuffer& grads, double max_norm) {
  const double norm = grads.global_norm();
  if (norm > max_norm && norm > 0.0) grads.scale(max_norm / norm);
  return norm;
}

}  // namespace sfar
