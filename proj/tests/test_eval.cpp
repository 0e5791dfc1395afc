// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "sfar/error.hpp"
#include "sfar/eval.hpp"
#include "sfar/trainer.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace sfar;

TEST_CASE("novelty on a hand-made corpus") {
  const std::vector<Tokens> train{{"i", "like", "dogs"}, {"i", "am", "tall"}};
  const std::vector<Tokens> gen{{"i", "like", "cats"}, {"i", "am", "tall"}};
  auto r = novelty_stats(gen, train);
  // unigrams: cats is the only new one of 6
  CHECK(r.unigram == doctest::Approx(100.0 / 6.0));
  // bigrams: (like cats) is new, 1 of 4
  CHECK(r.bigram == doctest::Approx(25.0));
  // trigrams: (i like cats) is new, 1 of 2
  CHECK(r.trigram == doctest::Approx(50.0));
  CHECK(r.full == doctest::Approx(50.0));
  CHECK(r.ngram_counts[0] == 6);
  CHECK(r.to_json()["novel_trigram_pct"] == 50.0);
  CHECK(r.to_text().find("trigram") != std::string::npos);
  CHECK_THROWS_AS(novelty_stats({}, train), Error);
}

TEST_CASE("repeated n-grams count once per occurrence") {
  auto r = novelty_stats({{"x", "x", "x"}}, {{"y"}});
  CHECK(r.ngram_counts[0] == 3);
  CHECK(r.unigram == 100.0);
  auto seen = novelty_stats({{"y", "y"}}, {{"y"}});
  CHECK(seen.unigram == 0.0);
  CHECK(seen.bigram == 100.0);
}

TEST_CASE("novelty matches the brute-force reference") {
  std::mt19937_64 rng(31);
  const Tokens words{"a", "b", "c", "d", "."};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1), len(0, 6), count(1, 6);
  auto corpus = [&](std::size_t n) {
    std::vector<Tokens> out(n);
    for (auto& t : out)
      for (std::size_t i = len(rng); i > 0; --i) t.push_back(words[pick(rng)]);
    return out;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const auto train = corpus(count(rng));
    const auto gen = corpus(count(rng));
    const auto r = novelty_stats(gen, train);
    const auto ref = sfar::testing::reference_novelty(gen, train, {1, 2, 3});
    CHECK(r.unigram == doctest::Approx(ref.ngram.at(1)).epsilon(1e-12));
    CHECK(r.bigram == doctest::Approx(ref.ngram.at(2)).epsilon(1e-12));
    CHECK(r.trigram == doctest::Approx(ref.ngram.at(3)).epsilon(1e-12));
    CHECK(r.full == doctest::Approx(ref.full).epsilon(1e-12));
  }
}

TEST_CASE("question and statement detection") {
  CHECK(is_question(tokenize("how are you ?")));
  CHECK_FALSE(is_question(tokenize("i am fine .")));
  CHECK_FALSE(is_statement_question(tokenize("how are you ?")));
  CHECK(is_statement_question(tokenize("i am fine . how are you ?")));
  CHECK(is_statement_question(tokenize("hi ! do you ski ?")));
  CHECK(is_statement_question(tokenize("do you ski ? i do")));
  CHECK_FALSE(is_statement_question(tokenize("what ? why ?")));
  CHECK_FALSE(is_statement_question(tokenize("? . !")));
  CHECK_FALSE(is_statement_question(tokenize("i am fine . good !")));

  auto c = question_rate({tokenize("ok ."), tokenize("you ?"), tokenize("yes . you ?")});
  CHECK(c.total == 3);
  CHECK(c.questions == 2);
  CHECK(c.statement_questions == 1);
  CHECK(c.to_json()["questions"] == 2);
}

TEST_CASE("statement questions are a subset of questions") {
  std::mt19937_64 rng(4);
  const Tokens pool{"a", "b", ".", "!", "?"};
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1), len(0, 8);
  for (int trial = 0; trial < 500; ++trial) {
    Tokens t;
    for (std::size_t i = len(rng); i > 0; --i) t.push_back(pool[pick(rng)]);
    if (is_statement_question(t)) CHECK(is_question(t));
  }
}

TEST_CASE("corpus perplexity equals validation perplexity") {
  const auto exs = sfar::testing::toy_examples();
  auto vocab = build_vocabulary(exs);
  ModelConfig c;
  c.vocab_size = vocab.size();
  c.emb_dim = 6;
  c.hidden_dim = 6;
  SketchModel m(c, 3);
  std::vector<EncodedExample> enc;
  for (const auto& ex : exs) enc.push_back(m.encode(ex, vocab));
  CHECK(corpus_perplexity(m, enc) == sketch_perplexity(m, enc).ppl());
  CHECK(corpus_perplexity(m, enc) > 1.0);
  CHECK_THROWS_AS(corpus_perplexity(m, std::vector<EncodedExample>{}), Error);
}
