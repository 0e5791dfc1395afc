// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0
//
// Persona memory: one entry per persona rare word, read with the final
// conversation state as query:
//
//   p_r   = softmax_r( <query, C1[w_r]> )
//   o     = sum_r p_r C2[w_r]
//   h_mem = query + o

#pragma once

#include <string>
#include <vector>

#include "sfar/autograd.hpp"
#include "sfar/text.hpp"

namespace sfar {

struct MemoryEntry {
  std::size_t persona = 0;    // trait index
  std::size_t rare_word = 0;  // index into that trait's rare words
  int word_id = kUnkId;
};

/// Entries ordered by trait, then by rare-word index. Duplicate words in
/// different traits keep separate entries.
struct MemoryBank {
  std::vector<MemoryEntry> entries;

  static MemoryBank from_personas(const std::vector<PersonaTrait>& personas, const Vocabulary& vocab);
  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
  /// Entry index of a slot source, or size() if absent.
  std::size_t index_of(std::size_t persona, std::size_t rare_word) const;
};

struct MemoryParams {
  ParamId c1;  // V x d_hid, addressing
  ParamId c2;  // V x d_hid, output

  static MemoryParams create(ParamSet& params, std::size_t vocab_size, std::size_t hidden_dim);
  static MemoryParams bind(const ParamSet& params);
};

struct MemoryReadout {
  Tensor h_mem;
  Tensor p;                   // undefined when the bank is empty
  std::vector<Tensor> keys;   // C1 rows of the entries
};

/// An empty bank yields h_mem = query and an undefined p.
MemoryReadout memory_readout(Graph& g, Tensor query, const MemoryBank& bank, const MemoryParams& params);

/// C1 rows of the bank entries, in bank order.
std::vector<Tensor> memory_keys(Graph& g, const MemoryBank& bank, ParamId table);

}  // namespace sfar
