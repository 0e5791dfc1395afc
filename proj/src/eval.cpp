// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfar/eval.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include "sfar/error.hpp"
#include "sfar/trainer.hpp"

namespace sfar {

using nlohmann::json;

double corpus_perplexity(const SketchModel& model, std::span<const EncodedExample> examples) {
  if (examples.empty()) throw Error("corpus_perplexity: empty dataset");
  return sketch_perplexity(model, examples).ppl();
}

namespace {

double percent(std::size_t part, std::size_t whole) {
  return whole ? 100.0 * static_cast<double>(part) / static_cast<double>(whole) : 0.0;
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

NoveltyReport novelty_stats(const std::vector<Tokens>& generated, const std::vector<Tokens>& training) {
  if (generated.empty()) throw Error("novelty_stats: no generated responses");
  NoveltyReport r;
  r.generated = generated.size();
  r.training = training.size();
  std::set<Tokens> seen[3];
  for (const auto& t : training)
    for (std::size_t n = 1; n <= 3; ++n)
      for (std::size_t i = 0; i + n <= t.size(); ++i) seen[n - 1].emplace(t.begin() + i, t.begin() + i + n);
  const std::set<Tokens> responses(training.begin(), training.end());

  std::size_t novel[3] = {0, 0, 0};
  std::size_t novel_full = 0;
  for (const auto& t : generated) {
    for (std::size_t n = 1; n <= 3; ++n)
      for (std::size_t i = 0; i + n <= t.size(); ++i) {
        ++r.ngram_counts[n - 1];
        if (!seen[n - 1].count(Tokens(t.begin() + i, t.begin() + i + n))) ++novel[n - 1];
      }
    if (!responses.count(t)) ++novel_full;
  }
  r.unigram = percent(novel[0], r.ngram_counts[0]);
  r.bigram = percent(novel[1], r.ngram_counts[1]);
  r.trigram = percent(novel[2], r.ngram_counts[2]);
  r.full = percent(novel_full, r.generated);
  return r;
}

json NoveltyReport::to_json() const {
  return {{"novel_unigram_pct", unigram},
          {"novel_bigram_pct", bigram},
          {"novel_trigram_pct", trigram},
          {"novel_full_response_pct", full},
          {"ngram_counts", {ngram_counts[0], ngram_counts[1], ngram_counts[2]}},
          {"generated_responses", generated},
          {"training_responses", training}};
}

std::string NoveltyReport::to_text() const {
  std::ostringstream out;
  out << "novelty            %      n\n";
  const char* names[] = {"unigram ", "bigram  ", "trigram "};
  const double pct[] = {unigram, bigram, trigram};
  for (int i = 0; i < 3; ++i) {
    std::string p = fixed(pct[i]);
    out << "  " << names[i] << std::string(10 - std::min<std::size_t>(p.size(), 10), ' ') << p << "  "
        << ngram_counts[i] << '\n';
  }
  std::string p = fixed(full);
  out << "  response" << std::string(10 - std::min<std::size_t>(p.size(), 10), ' ') << p << "  " << generated
      << '\n';
  return out.str();
}

bool is_question(const Tokens& response) {
  for (const auto& t : response)
    if (t == "?") return true;
  return false;
}

bool is_statement_question(const Tokens& response) {
  if (!is_question(response)) return false;
  std::size_t segment = 0;  // tokens in the current sentence
  for (const auto& t : response) {
    if (t == "." || t == "!") {
      if (segment > 0) return true;
      segment = 0;
    } else if (t == "?") {
      segment = 0;
    } else {
      ++segment;
    }
  }
  return segment > 0;  // unterminated trailing sentence
}

CompositionReport question_rate(const std::vector<Tokens>& responses) {
  CompositionReport r;
  r.total = responses.size();
  for (const auto& t : responses) {
    if (is_question(t)) ++r.questions;
    if (is_statement_question(t)) ++r.statement_questions;
  }
  return r;
}

json CompositionReport::to_json() const {
  return {{"questions", questions}, {"statement_questions", statement_questions}, {"total", total}};
}

std::string CompositionReport::to_text() const {
  std::ostringstream out;
  out << "responses              " << total << '\n'
      << "  with a question      " << questions << '\n'
      << "  statement + question " << statement_questions << '\n';
  return out.str();
}

}  // namespace sfar
