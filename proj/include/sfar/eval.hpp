// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0
//
// Corpus perplexity, n-gram novelty and question-rate statistics.

#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sfar/model.hpp"
#include "sfar/text.hpp"

namespace sfar {

/// Same quantity the trainer reports as validation perplexity.
double corpus_perplexity(const SketchModel& model, std::span<const EncodedExample> examples);

struct NoveltyReport {
  double unigram = 0.0;  // percentages
  double bigram = 0.0;
  double trigram = 0.0;
  double full = 0.0;
  std::size_t ngram_counts[3] = {0, 0, 0};  // generated n-gram occurrences
  std::size_t generated = 0;
  std::size_t training = 0;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// Share of generated n-gram occurrences (n = 1, 2, 3) never seen in the
/// training responses, and share of generated responses that do not match
/// any training response exactly. Throws on an empty generated set.
NoveltyReport novelty_stats(const std::vector<Tokens>& generated, const std::vector<Tokens>& training);

struct CompositionReport {
  std::size_t questions = 0;
  std::size_t statement_questions = 0;
  std::size_t total = 0;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

bool is_question(const Tokens& response);
/// A question that also holds a sentence not ending in "?".
bool is_statement_question(const Tokens& response);
CompositionReport question_rate(const std::vector<Tokens>& responses);

}  // namespace sfar
