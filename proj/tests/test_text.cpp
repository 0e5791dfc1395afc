// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "sfar/error.hpp"
#include "sfar/text.hpp"
#include "support.hpp"

using namespace sfar;

TEST_CASE("tokenize") {
  CHECK(tokenize("").empty());
  CHECK(tokenize("My name is George") == Tokens{"my", "name", "is", "george"});
  CHECK(tokenize("hi what's up?") == Tokens{"hi", "what's", "up", "?"});
  CHECK(tokenize("  wait;really:yes!  no.,  ") == Tokens{"wait", ";", "really", ":", "yes", "!", "no", ".", ","});
  CHECK(tokenize("I'M\tHERE\n") == Tokens{"i'm", "here"});
}

TEST_CASE("tokenize never yields whitespace or upper case") {
  std::mt19937_64 rng(5);
  const std::string alphabet = "aBc .,!?;:' \t\nXyZ'9";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1), len(0, 40);
  for (int trial = 0; trial < 300; ++trial) {
    std::string s;
    for (std::size_t i = len(rng); i > 0; --i) s += alphabet[pick(rng)];
    for (const auto& t : tokenize(s)) {
      CHECK_FALSE(t.empty());
      CHECK(t.find_first_of(" \t\n") == std::string::npos);
      CHECK(std::none_of(t.begin(), t.end(), [](char c) { return c >= 'A' && c <= 'Z'; }));
    }
    // Re-tokenising the detokenised text is a fixed point.
    CHECK(tokenize(detokenize(tokenize(s))) == tokenize(s));
  }
}

TEST_CASE("builtin stop words") {
  const auto& stop = StopWordSet::builtin();
  for (const char* w : {"i", "am", "a", "my", "is", "favorite", "to", "like", "go", "i'm", "don't", "."})
    CHECK(stop.contains(w));
  for (const char* w : {"bee", "farmer", "papaya", "food", "george"}) CHECK_FALSE(stop.contains(w));
  CHECK(stop.size() == 148);
}

TEST_CASE("stop word resource lists each word once") {
  std::ifstream in(std::string(SFAR_TEST_DATA) + "/../../resources/stopwords.txt");
  REQUIRE(in);
  std::set<std::string> seen;
  std::string w;
  std::size_t lines = 0;
  while (std::getline(in, w)) {
    if (w.empty()) continue;
    ++lines;
    CHECK(seen.insert(w).second);
  }
  CHECK(lines == StopWordSet::builtin().size());
}

TEST_CASE("extract_rare_words") {
  CHECK(extract_rare_words({"i", "am", "a", "bee", "farmer"}) == Tokens{"bee", "farmer"});
  CHECK(extract_rare_words({"i", "like", "to", "go"}).empty());
  CHECK(extract_rare_words({"my", "favorite", "food", "is", "papaya"}) == Tokens{"food", "papaya"});
  CHECK(extract_rare_words({"papaya", "and", "papaya", ".", "@persona", "<unk>"}) == Tokens{"papaya"});
}

TEST_CASE("extract_rare_words is idempotent and avoids stop words") {
  std::mt19937_64 rng(9);
  const Tokens pool{"i", "am", "bee", "farmer", ".", "papaya", "food", "to", "go", "!", "dog", "the", "@persona"};
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1), len(0, 12);
  for (int trial = 0; trial < 300; ++trial) {
    Tokens t;
    for (std::size_t i = len(rng); i > 0; --i) t.push_back(pool[pick(rng)]);
    const Tokens r = extract_rare_words(t);
    CHECK(extract_rare_words(r) == r);
    for (const auto& w : r) {
      CHECK_FALSE(StopWordSet::builtin().contains(w));
      CHECK_FALSE(is_punctuation(w));
      CHECK_FALSE(is_reserved_token(w));
      CHECK(std::find(t.begin(), t.end(), w) != t.end());
    }
  }
}

TEST_CASE("sketchify") {
  const std::vector<PersonaTrait> personas{make_trait("i am a bee farmer .")};
  const Sketch s = sketchify({"i", "am", "a", "bee", "farmer", "."}, personas);
  CHECK(s.tokens == Tokens{"i", "am", "a", "@persona", "@persona", "."});
  CHECK(s.slot_positions == std::vector<std::size_t>{3, 4});
  CHECK(s.slot_sources == std::vector<SlotSource>{{0, 0}, {0, 1}});

  const Sketch none = sketchify({"hello", "there"}, personas);
  CHECK(none.tokens == Tokens{"hello", "there"});
  CHECK(none.slot_positions.empty());

  const Sketch twice = sketchify({"papaya", "is", "papaya"}, {make_trait("papaya")});
  CHECK(twice.tokens == Tokens{"@persona", "is", "@persona"});
}

TEST_CASE("sketchify takes the lowest persona index on duplicates") {
  const std::vector<PersonaTrait> personas{make_trait("i love dogs ."), make_trait("my dog is brown ."),
                                           make_trait("a brown dog barks .")};
  const Sketch s = sketchify({"my", "dog", "is", "brown"}, personas);
  REQUIRE(s.slot_sources.size() == 2);
  CHECK(s.slot_sources[0] == SlotSource{1, 0});
  CHECK(s.slot_sources[1] == SlotSource{1, 1});
}

TEST_CASE("sketch round trip restores the response") {
  std::mt19937_64 rng(21);
  const Tokens words{"bee", "farmer", "papaya", "i", "am", "dog", "blue", "paris", ".", "?", "love"};
  const std::vector<std::string> traits{"i am a bee farmer .", "my dog loves paris .", "blue is my color ."};
  std::vector<PersonaTrait> personas;
  for (const auto& t : traits) personas.push_back(make_trait(t));
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1), len(0, 15);
  for (int trial = 0; trial < 500; ++trial) {
    Tokens response;
    for (std::size_t i = len(rng); i > 0; --i) response.push_back(words[pick(rng)]);
    const Sketch s = sketchify(response, personas);
    REQUIRE(s.tokens.size() == response.size());
    Tokens restored = s.tokens;
    for (std::size_t k = 0; k < s.slot_positions.size(); ++k) {
      const auto& src = s.slot_sources[k];
      CHECK(personas[src.persona].rare_words[src.rare_word] == response[s.slot_positions[k]]);
      restored[s.slot_positions[k]] = personas[src.persona].rare_words[src.rare_word];
    }
    CHECK(restored == response);
    for (std::size_t i = 0; i < response.size(); ++i)
      if (std::find(s.slot_positions.begin(), s.slot_positions.end(), i) == s.slot_positions.end())
        CHECK(s.tokens[i] == response[i]);
  }
}

TEST_CASE("history tokens join turns with EOS") {
  DialogueExample ex = make_example({"x"}, {"hi there", "yo", "what ?"}, "ok");
  CHECK(ex.history_tokens() == Tokens{"hi", "there", "<eos>", "yo", "<eos>", "what", "?"});
  CHECK(ex.history_tokens(2) == Tokens{"yo", "<eos>", "what", "?"});
  DialogueExample empty = make_example({"x"}, {}, "ok");
  CHECK(empty.history_tokens() == Tokens{"<eos>"});
}

TEST_CASE("build_vocabulary") {
  auto v = build_vocabulary_from_tokens({{"hi", "hi", "yo"}}, 2);
  CHECK(v.size() == 5);
  CHECK(v.contains("hi"));
  CHECK_FALSE(v.contains("yo"));
  CHECK(v.id("yo") == kUnkId);

  auto ab = build_vocabulary_from_tokens({{"a", "b"}}, 1);
  CHECK(ab.word(0) == "<pad>");
  CHECK(ab.word(1) == "<unk>");
  CHECK(ab.word(2) == "<eos>");
  CHECK(ab.word(3) == "@persona");
  CHECK(ab.id("a") == 4);
  CHECK(ab.id("b") == 5);

  CHECK_THROWS_AS(build_vocabulary_from_tokens({}, 1), DatasetError);
  CHECK_THROWS_AS(build_vocabulary_from_tokens({{}}, 1), DatasetError);
}

TEST_CASE("vocabulary order matches a frequency-then-lexicographic oracle") {
  std::mt19937_64 rng(2);
  const Tokens pool{"z", "y", "apple", "b", "a", "mm", "q", "@persona", "<eos>"};
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Tokens> corpus(4);
    for (auto& line : corpus)
      for (int i = 0; i < 12; ++i) line.push_back(pool[pick(rng)]);
    const std::size_t min_count = 1 + static_cast<std::size_t>(trial % 3);
    std::map<std::string, std::size_t> counts;
    for (const auto& line : corpus)
      for (const auto& t : line)
        if (!is_reserved_token(t)) ++counts[t];
    std::vector<std::pair<std::string, std::size_t>> kept;
    for (const auto& [w, c] : counts)
      if (c >= min_count) kept.emplace_back(w, c);
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    Vocabulary v;
    try {
      v = build_vocabulary_from_tokens(corpus, min_count);
    } catch (const DatasetError&) {
      continue;
    }
    REQUIRE(v.size() == kReservedCount + kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) CHECK(v.word(static_cast<int>(kReservedCount + i)) == kept[i].first);
  }
}

TEST_CASE("vocabulary encode and decode are inverse") {
  auto v = build_vocabulary(sfar::testing::toy_examples());
  for (int id = 0; id < static_cast<int>(v.size()); ++id) CHECK(v.encode(v.decode({id})) == TokenIds{id});
  const Tokens words{"bee", "farmer", "paris", "<eos>", "@persona"};
  CHECK(v.decode(v.encode(words)) == words);
  CHECK(v.encode({"never-seen"}) == TokenIds{kUnkId});
  CHECK_THROWS_AS(v.word(static_cast<int>(v.size())), Error);
}

TEST_CASE("min_count 1 leaves no UNK on the training corpus") {
  const auto examples = sfar::testing::toy_examples();
  auto v = build_vocabulary(examples, 1);
  for (const auto& ex : examples) {
    for (const auto& id : v.encode(ex.response)) CHECK(id != kUnkId);
    for (const auto& id : v.encode(ex.history_tokens())) CHECK(id != kUnkId);
  }
}

TEST_CASE("vocabulary save and load") {
  auto v = build_vocabulary(sfar::testing::toy_examples());
  const auto path = sfar::testing::temp_path("vocab.txt");
  v.save(path);
  auto loaded = Vocabulary::load(path);
  CHECK(loaded.words() == v.words());

  std::ofstream(sfar::testing::temp_path("bad_vocab.txt")) << "hello\nworld\n";
  CHECK_THROWS_AS(Vocabulary::load(sfar::testing::temp_path("bad_vocab.txt")), DatasetError);
}

TEST_CASE("sketch statistics") {
  std::vector<DialogueExample> exs{make_example({"i am a bee farmer ."}, {}, "i am a bee farmer ."),
                                   make_example({"i like dogs ."}, {}, "hello there .")};
  const auto st = sketch_stats(exs);
  CHECK(st.slot_tokens == 2);
  CHECK(st.response_tokens == 9);
  CHECK(st.fraction() == doctest::Approx(2.0 / 9.0));
}
