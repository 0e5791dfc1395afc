// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfar/memory.hpp"

#include "sfar/error.hpp"

namespace sfar {

MemoryBank MemoryBank::from_personas(const std::vector<PersonaTrait>& personas, const Vocabulary& vocab) {
  MemoryBank bank;
  for (std::size_t p = 0; p < personas.size(); ++p)
    for (std::size_t r = 0; r < personas[p].rare_words.size(); ++r)
      bank.entries.push_back({p, r, vocab.id(personas[p].rare_words[r])});
  return bank;
}

std::size_t MemoryBank::index_of(std::size_t persona, std::size_t rare_word) const {
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].persona == persona && entries[i].rare_word == rare_word) return i;
  return entries.size();
}

MemoryParams MemoryParams::create(ParamSet& params, std::size_t vocab_size, std::size_t hidden_dim) {
  return {params.add("memory.c1", {vocab_size, hidden_dim}), params.add("memory.c2", {vocab_size, hidden_dim})};
}

MemoryParams MemoryParams::bind(const ParamSet& params) {
  return {params.require("memory.c1"), params.require("memory.c2")};
}

std::vector<Tensor> memory_keys(Graph& g, const MemoryBank& bank, ParamId table) {
  Tensor t = g.param(table);
  std::vector<Tensor> rows;
  rows.reserve(bank.size());
  for (const auto& e : bank.entries) rows.push_back(ad::row(t, static_cast<std::size_t>(e.word_id)));
  return rows;
}

MemoryReadout memory_readout(Graph& g, Tensor query, const MemoryBank& bank, const MemoryParams& params) {
  if (bank.empty()) return {query, Tensor{}, {}};
  std::vector<Tensor> keys = memory_keys(g, bank, params.c1);
  if (keys[0].size() != query.size()) throw Error("memory_readout: query dimension does not match C1");
  std::vector<Tensor> scores;
  scores.reserve(keys.size());
  for (const Tensor& k : keys) scores.push_back(ad::dot(query, k));
  Tensor p = ad::softmax(ad::concat(scores));
  Tensor o = ad::weighted_sum(p, memory_keys(g, bank, params.c2));
  return {ad::add(query, o), p, std::move(keys)};
}

}  // namespace sfar
