// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sstream>

#include "sfar/dataset.hpp"
#include "sfar/error.hpp"
#include "support.hpp"

using namespace sfar;

static const std::string kData = SFAR_TEST_DATA;

TEST_CASE("parlai text yields one example per agent turn") {
  const auto recs = load_records(kData + "/sample.parlai", DatasetFormat::parlai);
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].personas == std::vector<std::string>{"i am a bee farmer .", "my favorite food is papaya ."});
  CHECK(recs[0].history == std::vector<std::string>{"hi , how are you today ?"});
  CHECK(recs[0].response == "i am great , just got back from my bees .");
  CHECK(recs[1].history.size() == 3);
  CHECK(recs[1].response == "i love papaya food .");
  // A new dialogue restarts persona and history; partner personas are ignored.
  CHECK(recs[2].personas == std::vector<std::string>{"i have a dog ."});
  CHECK(recs[2].history == std::vector<std::string>{"hello !"});
}

TEST_CASE("a two-turn dialogue gives a single example") {
  std::istringstream in("1 your persona: i like tea .\n2 hi there\thello !\n");
  CHECK(read_parlai_records(in).size() == 1);
}

TEST_CASE("jsonl records") {
  const auto exs = load_dataset(kData + "/sample.jsonl", DatasetFormat::jsonl);
  REQUIRE(exs.size() == 2);
  CHECK(exs[0].sketch.tokens == Tokens{"i", "am", "a", "@persona", "@persona", "."});
  CHECK(exs[1].history.empty());
  CHECK(exs[1].sketch.tokens == Tokens{"hello", "from", "@persona", "!"});
}

TEST_CASE("jsonl round trip") {
  const auto recs = load_records(kData + "/sample.jsonl", DatasetFormat::jsonl);
  std::stringstream buf;
  write_jsonl_records(buf, recs);
  const auto again = read_jsonl_records(buf);
  REQUIRE(again.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(again[i].personas == recs[i].personas);
    CHECK(again[i].history == recs[i].history);
    CHECK(again[i].response == recs[i].response);
  }
}

TEST_CASE("malformed lines report their line number") {
  auto line_of = [](const std::string& text, DatasetFormat f) -> std::size_t {
    std::istringstream in(text);
    try {
      if (f == DatasetFormat::jsonl)
        read_jsonl_records(in);
      else
        read_parlai_records(in);
    } catch (const DatasetError& e) {
      return e.line();
    }
    return 0;
  };
  const std::string ok = R"({"personas": [], "history": [], "response": "x"})";
  CHECK(line_of(ok + "\n\n{not json\n", DatasetFormat::jsonl) == 3);
  CHECK(line_of(ok + "\n" + R"({"personas": [], "history": "x", "response": "x"})", DatasetFormat::jsonl) == 2);
  CHECK(line_of(R"({"personas": [1], "history": [], "response": "x"})", DatasetFormat::jsonl) == 1);
  CHECK(line_of(R"({"personas": [], "history": []})", DatasetFormat::jsonl) == 1);
  CHECK(line_of("1 your persona: a\n2 no tab here\n", DatasetFormat::parlai) == 2);
  CHECK(line_of("x your persona: a\n", DatasetFormat::parlai) == 1);
}

TEST_CASE("unknown format and missing file") {
  CHECK_THROWS_AS(parse_dataset_format("csv"), DatasetError);
  CHECK(parse_dataset_format("parlai-text") == DatasetFormat::parlai);
  CHECK_THROWS_AS(load_dataset(kData + "/does-not-exist.jsonl", DatasetFormat::jsonl), DatasetError);
}
