// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0
//
// Global-to-local memory pointer used to fill @persona slots without a
// language-model reranker.
//
//   g_i    = sigmoid(<W_g [e(y) ; h_d], e_i>)        e_i = C1 row of entry i
//   e'_i   = g_i * e_i
//   L_t    = softmax([<h_t, e'_1>, ..., <h_t, e'_R>, s])   s: sentinel logit
//
// The last index of L_t (== bank size) is the sentinel meaning "no memory
// word at this step".

#pragma once

#include <vector>

#include "sfar/autograd.hpp"
#include "sfar/memory.hpp"

namespace sfar {

struct PointerParams {
  ParamId w_gate;    // d_hid x (d_emb + d_hid)
  ParamId sentinel;  // 1

  static PointerParams create(ParamSet& params, std::size_t emb_dim, std::size_t hidden_dim);
  static PointerParams bind(const ParamSet& params);
  void init(ParamSet& params, std::mt19937_64& rng) const;
};

/// Gate per bank entry, in (0, 1). `keys` are the C1 rows of the entries.
Tensor global_pointer(Graph& g, Tensor prev_embedding, Tensor h_d, const std::vector<Tensor>& keys,
                      const PointerParams& params);

/// 1 for every entry whose word occurs in the response.
std::vector<double> global_pointer_labels(const MemoryBank& bank, const TokenIds& response);

/// Summed binary cross-entropy with probabilities clamped at 1e-12.
Tensor global_pointer_loss(Tensor gates, const std::vector<double>& labels);

/// keys[i] * gates[i].
std::vector<Tensor> mask_memory(const std::vector<Tensor>& keys, Tensor gates);

/// Unnormalised scores over bank entries plus the sentinel (last index).
Tensor local_pointer_logits(Graph& g, Tensor h_d, const std::vector<Tensor>& masked_keys, const PointerParams& params);
/// Distribution over bank entries plus the sentinel (last index).
Tensor local_pointer(Graph& g, Tensor h_d, const std::vector<Tensor>& masked_keys, const PointerParams& params);

/// Per target position: the bank index of the slot source, or the sentinel
/// (bank size) where the sketch token is not a slot. `targets` is the
/// sketch length plus the closing EOS.
std::vector<std::size_t> local_pointer_labels(const MemoryBank& bank, const Sketch& sketch, std::size_t targets);

struct PointerFill {
  Tokens tokens;
  std::size_t unfilled = 0;  // slots that met an empty bank and became UNK
};

/// Replaces each @persona token with the word of the best non-sentinel
/// entry of its step distribution (ties: lowest index). `step_dists[u]`
/// belongs to sketch position u.
PointerFill fill_with_pointer(const Tokens& sketch, const std::vector<std::vector<double>>& step_dists,
                              const MemoryBank& bank, const Vocabulary& vocab);

}  // namespace sfar
