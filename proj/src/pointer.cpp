// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfar/pointer.hpp"

#include <algorithm>

#include "sfar/error.hpp"

namespace sfar {

PointerParams PointerParams::create(ParamSet& params, std::size_t emb_dim, std::size_t hidden_dim) {
  return {params.add("pointer.w_gate", {hidden_dim, emb_dim + hidden_dim}), params.add("pointer.sentinel", {1, 1})};
}

PointerParams PointerParams::bind(const ParamSet& params) {
  return {params.require("pointer.w_gate"), params.require("pointer.sentinel")};
}

void PointerParams::init(ParamSet& params, std::mt19937_64& rng) const {
  init_glorot_uniform(params[w_gate], rng);
  params[sentinel].value[0] = 0.0;
}

Tensor global_pointer(Graph& g, Tensor prev_embedding, Tensor h_d, const std::vector<Tensor>& keys,
                      const PointerParams& params) {
  if (keys.empty()) throw Error("global_pointer: empty memory bank");
  Tensor parts[] = {prev_embedding, h_d};
  Tensor query = ad::matvec(g.param(params.w_gate), ad::concat(parts));
  std::vector<Tensor> scores;
  scores.reserve(keys.size());
  for (const Tensor& k : keys) scores.push_back(ad::dot(query, k));
  return ad::sigmoid(ad::concat(scores));
}

std::vector<double> global_pointer_labels(const MemoryBank& bank, const TokenIds& response) {
  std::vector<double> labels(bank.size(), 0.0);
  for (std::size_t i = 0; i < bank.size(); ++i)
    if (std::find(response.begin(), response.end(), bank.entries[i].word_id) != response.end()) labels[i] = 1.0;
  return labels;
}

Tensor global_pointer_loss(Tensor gates, const std::vector<double>& labels) {
  return ad::binary_cross_entropy(gates, labels, 1e-12);
}

std::vector<Tensor> mask_memory(const std::vector<Tensor>& keys, Tensor gates) {
  if (gates.size() != keys.size()) throw Error("mask_memory: gate count does not match the bank");
  std::vector<Tensor> out;
  out.reserve(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    Tensor gi = ad::pick(gates, i);
    // scalar * vector as a one-term weighted sum
    Tensor one[] = {keys[i]};
    out.push_back(ad::weighted_sum(gi, one));
  }
  return out;
}

Tensor local_pointer_logits(Graph& g, Tensor h_d, const std::vector<Tensor>& masked_keys,
                            const PointerParams& params) {
  if (masked_keys.empty()) throw Error("local_pointer: empty memory bank");
  std::vector<Tensor> logits;
  logits.reserve(masked_keys.size() + 1);
  for (const Tensor& k : masked_keys) logits.push_back(ad::dot(h_d, k));
  logits.push_back(g.param(params.sentinel));
  return ad::concat(logits);
}

Tensor local_pointer(Graph& g, Tensor h_d, const std::vector<Tensor>& masked_keys, const PointerParams& params) {
  return ad::softmax(local_pointer_logits(g, h_d, masked_keys, params));
}

std::vector<std::size_t> local_pointer_labels(const MemoryBank& bank, const Sketch& sketch, std::size_t targets) {
  std::vector<std::size_t> labels(targets, bank.size());
  for (std::size_t k = 0; k < sketch.slot_positions.size(); ++k) {
    const std::size_t pos = sketch.slot_positions[k];
    if (pos >= targets) continue;
    labels[pos] = bank.index_of(sketch.slot_sources[k].persona, sketch.slot_sources[k].rare_word);
  }
  return labels;
}

PointerFill fill_with_pointer(const Tokens& sketch, const std::vector<std::vector<double>>& step_dists,
                              const MemoryBank& bank, const Vocabulary& vocab) {
  PointerFill out;
  out.tokens = sketch;
  for (std::size_t u = 0; u < sketch.size(); ++u) {
    if (sketch[u] != kPersonaSlotToken) continue;
    if (bank.empty()) {
      out.tokens[u] = std::string(kUnkToken);
      ++out.unfilled;
      continue;
    }
    if (u >= step_dists.size() || step_dists[u].size() < bank.size())
      throw Error("fill_with_pointer: no pointer distribution for slot at position " + std::to_string(u));
    const auto& d = step_dists[u];
    std::size_t best = 0;
    for (std::size_t i = 1; i < bank.size(); ++i)
      if (d[i] > d[best]) best = i;
    out.tokens[u] = vocab.word(bank.entries[best].word_id);
  }
  return out;
}

}  // namespace sfar
