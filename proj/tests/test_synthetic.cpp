// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <set>

#include "sfar/dataset.hpp"
#include "sfar/synthetic.hpp"

using namespace sfar;

TEST_CASE("synthetic personas") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto p = synthetic_persona(s);
    CHECK(p.size() >= 4);
    CHECK(p.size() <= 5);
    CHECK(std::set<std::string>(p.begin(), p.end()).size() == p.size());
  }
  CHECK(synthetic_persona(3) == synthetic_persona(3));
}

TEST_CASE("synthetic dialogues are reproducible and well formed") {
  const auto a = synthetic_dialogues(120, 7);
  const auto b = synthetic_dialogues(120, 7);
  REQUIRE(a.size() == 120);
  CHECK(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].response == b[i].response);
    CHECK(a[i].history == b[i].history);
    CHECK_FALSE(a[i].personas.empty());
    CHECK_FALSE(a[i].response.empty());
    CHECK(a[i].history.size() % 2 == 1);  // partner turns bracket each agent turn
  }
  CHECK(synthetic_dialogues(120, 8)[0].personas != a[0].personas);
}

TEST_CASE("synthetic replies use persona words") {
  const auto exs = to_examples(synthetic_dialogues(300, 2));
  const auto st = sketch_stats(exs);
  CHECK(st.fraction() > 0.05);
  CHECK(st.fraction() < 0.5);
}
