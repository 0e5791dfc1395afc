// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0
//
// Tokenisation, persona rare words, sketch construction and vocabularies.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace sfar {

using Tokens = std::vector<std::string>;
using TokenIds = std::vector<int>;

inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;
inline constexpr int kEosId = 2;
inline constexpr int kPersonaSlotId = 3;
inline constexpr int kReservedCount = 4;

inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kUnkToken = "<unk>";
inline constexpr std::string_view kEosToken = "<eos>";
inline constexpr std::string_view kPersonaSlotToken = "@persona";

bool is_reserved_token(std::string_view token);
/// True for tokens without a single letter or digit ("." "," "--" ...).
bool is_punctuation(std::string_view token);

/// Lowercases ASCII letters, splits on whitespace and turns each of
/// . , ! ? ; : into its own token. Apostrophes stay inside words.
Tokens tokenize(std::string_view text);
std::string detokenize(const Tokens& tokens);

class StopWordSet {
 public:
  StopWordSet() = default;
  explicit StopWordSet(const std::vector<std::string>& words);

  /// The persona preprocessing list compiled into the library.
  static const StopWordSet& builtin();
  static StopWordSet load(const std::filesystem::path& path);

  bool contains(std::string_view word) const { return words_.count(std::string(word)) > 0; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

struct PersonaTrait {
  std::string text;
  Tokens tokens;
  Tokens rare_words;
};

/// Tokens that are neither stop words, punctuation nor reserved symbols, in
/// order of first appearance, without duplicates.
Tokens extract_rare_words(const Tokens& trait, const StopWordSet& stop = StopWordSet::builtin());
PersonaTrait make_trait(std::string_view text, const StopWordSet& stop = StopWordSet::builtin());

struct SlotSource {
  std::size_t persona = 0;
  std::size_t rare_word = 0;
  friend bool operator==(const SlotSource&, const SlotSource&) = default;
};

struct Sketch {
  Tokens tokens;
  std::vector<std::size_t> slot_positions;
  std::vector<SlotSource> slot_sources;
};

/// Replaces every response token equal to some persona rare word by
/// @persona. The source is the lowest persona index, then the lowest
/// rare-word index.
Sketch sketchify(const Tokens& response, const std::vector<PersonaTrait>& personas);

struct DialogueExample {
  std::vector<PersonaTrait> personas;
  std::vector<Tokens> history;  // one entry per turn, oldest first
  Tokens response;
  Sketch sketch;

  /// Encoder input: the last `max_turns` turns (0 = all) joined with EOS
  /// separators. An empty history yields a single EOS.
  Tokens history_tokens(std::size_t max_turns = 0) const;
};

DialogueExample make_example(const std::vector<std::string>& personas, const std::vector<std::string>& history,
                             const std::string& response, const StopWordSet& stop = StopWordSet::builtin());

class Vocabulary {
 public:
  /// Only the reserved symbols.
  Vocabulary();
  /// Reserved symbols followed by `words` (which must not repeat them).
  explicit Vocabulary(const std::vector<std::string>& words);

  std::size_t size() const { return id_to_word_.size(); }
  int id(std::string_view word) const;  // kUnkId when unknown
  bool contains(std::string_view word) const;
  const std::string& word(int id) const;
  TokenIds encode(const Tokens& tokens) const;
  Tokens decode(const TokenIds& ids) const;
  const std::vector<std::string>& words() const { return id_to_word_; }

  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

 private:
  std::vector<std::string> id_to_word_;
  std::unordered_map<std::string, int> word_to_id_;
};

/// Counts every persona, history and response token. Keeps words seen at
/// least min_count times: reserved ids first, then descending frequency,
/// ties broken lexicographically. Throws DatasetError on an empty corpus.
Vocabulary build_vocabulary(const std::vector<DialogueExample>& examples, std::size_t min_count = 1);
Vocabulary build_vocabulary_from_tokens(const std::vector<Tokens>& corpus, std::size_t min_count = 1);

struct SketchStats {
  std::size_t slot_tokens = 0;
  std::size_t response_tokens = 0;
  double fraction() const {
    return response_tokens ? static_cast<double>(slot_tokens) / static_cast<double>(response_tokens) : 0.0;
  }
};

SketchStats sketch_stats(const std::vector<DialogueExample>& examples);

}  // namespace sfar
