// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0
//
// Response generation: beam search over sketches, persona selection,
// slot filling (reranked or pointer-based) and attention export.

#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "sfar/language_model.hpp"
#include "sfar/model.hpp"

namespace sfar {

enum class FillMode { rerank, pointer };

std::string to_string(FillMode m);
FillMode parse_fill_mode(const std::string& name);

/// Attention follows the model; whether a checkpoint was trained as SF or
/// SF-A is fixed by its configuration.
struct GenerationConfig {
  std::size_t beam_size = 7;
  std::size_t max_length = 32;
  std::size_t candidate_cap = 50;  // per beam
  FillMode fill = FillMode::rerank;
  bool block_unk = false;
  bool block_repeats = false;  // forbid a token right after itself

  void validate() const;
};

struct Hypothesis {
  TokenIds tokens;  // generated tokens, closing EOS included when finished
  double log_prob = 0.0;
  LstmState state;
  std::vector<std::vector<double>> conv_attn;    // per step, empty without attention
  std::vector<std::vector<double>> pers_attn;    // per step, empty without attention
  std::vector<std::vector<double>> pointer;      // local pointer per step, empty for an empty bank
  bool finished = false;
  bool truncated = false;  // reached max_length without EOS

  /// Tokens without the closing EOS.
  TokenIds sketch() const;
};

/// Length-capped beam search. Expansions are ranked by score, then parent
/// position, then token id; finished hypotheses keep their beam slot. PAD
/// (and UNK when blocked) are never proposed. Returns up to B finished
/// hypotheses, best first.
std::vector<Hypothesis> beam_search(Graph& g, const SketchModel& model, const ModelContext& ctx,
                                    const GenerationConfig& config);

/// Persona index for a hypothesis: argmax of the persona attention at the
/// first slot step, or, without attention traces, the trait with the most
/// memory mass. None when the hypothesis has no slot.
std::optional<std::size_t> select_persona(const Hypothesis& hyp, std::size_t persona_count,
                                          const std::vector<double>& memory_p, const MemoryBank& bank);

struct FillCandidates {
  std::vector<Tokens> candidates;
  std::vector<std::vector<std::size_t>> assignments;  // rare-word index per slot
  bool flagged = false;  // persona had no rare words; slots became UNK
};

/// Ordered arrangements of `rare_words` over the slots of `sketch`, in
/// lexicographic index order, without repetition when there are enough
/// words and with repetition otherwise. At most `cap` candidates.
FillCandidates fill_candidates(const Tokens& sketch, const Tokens& rare_words, std::size_t cap);

struct AttentionTrace {
  std::vector<std::vector<double>> conv_attn;
  std::vector<std::vector<double>> pers_attn;
  std::vector<double> memory_p;
  Tokens decoder_tokens;
  Tokens encoder_tokens;
  std::vector<std::string> traits;

  nlohmann::json to_json() const;
  static AttentionTrace from_json(const nlohmann::json& j);
  friend bool operator==(const AttentionTrace&, const AttentionTrace&) = default;
};

struct BeamRecord {
  Tokens sketch;
  double log_prob = 0.0;
  bool truncated = false;
  std::optional<std::size_t> persona;
  bool flagged = false;
};

struct GenerationDebug {
  std::vector<BeamRecord> beams;
  std::vector<ScoredCandidate> candidates;  // rerank mode only
  std::size_t chosen = 0;                   // index into candidates
  std::size_t chosen_beam = 0;
  std::optional<std::size_t> persona;       // i* of the chosen beam
  std::size_t unfilled = 0;                 // pointer mode: slots left as UNK
  FillMode fill = FillMode::rerank;
  AttentionTrace attention;                 // of the chosen beam

  nlohmann::json to_json() const;
};

struct GenerationResult {
  Tokens tokens;
  std::string text;
  GenerationDebug debug;
};

/// Full pipeline for one turn. `lm` may be null in pointer mode.
GenerationResult generate_response(const SketchModel& model, const Vocabulary& vocab, const TokenLogProbModel* lm,
                                   const std::vector<PersonaTrait>& personas, const std::vector<Tokens>& history,
                                   const GenerationConfig& config);

void export_attention(const AttentionTrace& trace, const std::filesystem::path& path);
AttentionTrace read_attention(const std::filesystem::path& path);

}  // namespace sfar
