// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared helpers for the test binaries.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sfar/autograd.hpp"
#include "sfar/checkpoint.hpp"
#include "sfar/model.hpp"
#include "sfar/text.hpp"

namespace sfar::testing {

inline double rel_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-4});
}

/// Central difference of `loss` with respect to one scalar of `params`.
inline double numeric_grad(ParamSet& params, ParamId id, std::size_t k, const std::function<double()>& loss,
                           double h = 1e-5) {
  double& v = params[id].value[k];
  const double saved = v;
  v = saved + h;
  const double up = loss();
  v = saved - h;
  const double down = loss();
  v = saved;
  return (up - down) / (2 * h);
}

struct GradCheck {
  double worst = 0.0;
  std::string where;
  std::size_t checked = 0;
};

/// Compares backprop against central differences for every scalar of every
/// parameter (or `per_param` evenly spaced ones when it is non-zero).
/// `build` must produce the scalar loss in the given graph.
inline GradCheck check_gradients(ParamSet& params, const std::function<Tensor(Graph&)>& build,
                                 std::size_t per_param = 0, double h = 1e-5) {
  GradBuffer grads(params);
  {
    Graph g(params, &grads, Precision::f64);
    g.backward(build(g));
  }
  auto loss = [&] {
    Graph g(params, nullptr, Precision::f64);
    return build(g).item();
  };
  GradCheck out;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const ParamId id{p};
    const std::size_t n = params[id].value.size();
    const std::size_t stride = per_param == 0 || per_param >= n ? 1 : n / per_param;
    for (std::size_t k = 0; k < n; k += stride) {
      const double a = grads[id][k];
      const double num = numeric_grad(params, id, k, loss, h);
      const double e = rel_error(a, num);
      ++out.checked;
      if (e > out.worst) {
        out.worst = e;
        out.where = params[id].name + "[" + std::to_string(k) + "] analytic " + std::to_string(a) + " numeric " +
                    std::to_string(num);
      }
    }
  }
  return out;
}

inline std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "sfar_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

/// A handful of persona dialogues small enough for exact checks.
inline std::vector<DialogueExample> toy_examples() {
  return {
      make_example({"i am a bee farmer .", "my favorite food is papaya ."}, {"hi , what do you do ?"},
                   "i am a bee farmer ."),
      make_example({"i have a dog named max .", "i live in paris ."}, {"hello !", "hi there", "where do you live ?"},
                   "i live in paris with my dog ."),
      make_example({"i like to ski .", "my favorite color is blue ."}, {}, "blue is nice , do you ski ?"),
      make_example({"i play the guitar .", "i work as a nurse ."}, {"what is your job ?"}, "i am a nurse ."),
  };
}

/// An untrained small model over the toy vocabulary, ready for a service.
inline LoadedModel tiny_loaded(Variant variant, std::uint64_t seed = 1) {
  LoadedModel out;
  out.vocab = build_vocabulary(toy_examples());
  ModelConfig c;
  c.vocab_size = out.vocab.size();
  c.emb_dim = 8;
  c.hidden_dim = 8;
  c.attention = uses_attention(variant) ? AttentionMode::full : AttentionMode::none;
  out.model = SketchModel(c, seed);
  out.variant = variant;
  return out;
}

}  // namespace sfar::testing
