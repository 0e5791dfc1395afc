// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "sfar/memory.hpp"
#include "support.hpp"

using namespace sfar;

namespace {

struct Setup {
  Vocabulary vocab{{"bee", "farmer", "papaya", "paris", "dog"}};
  std::vector<PersonaTrait> personas{make_trait("i am a bee farmer ."), make_trait("i like dogs ."),
                                     make_trait("i love paris and bee ."), make_trait("i am .")};
  ParamSet ps;
  MemoryParams mp;
  explicit Setup(std::size_t d = 4) {
    mp = MemoryParams::create(ps, vocab.size(), d);
    std::mt19937_64 rng(4);
    init_normal(ps[mp.c1], 0.7, rng);
    init_normal(ps[mp.c2], 0.7, rng);
  }
};

}  // namespace

TEST_CASE("memory bank layout") {
  Setup s;
  const auto bank = MemoryBank::from_personas(s.personas, s.vocab);
  // "dogs" is not in the vocabulary; it still gets a slot, as UNK.
  REQUIRE(bank.size() == 5);
  CHECK(bank.entries[0].word_id == s.vocab.id("bee"));
  CHECK(bank.entries[1].word_id == s.vocab.id("farmer"));
  CHECK(bank.entries[2].word_id == kUnkId);
  CHECK(bank.entries[3].persona == 2);
  CHECK(bank.entries[4].word_id == s.vocab.id("bee"));
  CHECK(bank.index_of(2, 1) == 4);
  CHECK(bank.index_of(3, 0) == bank.size());
}

TEST_CASE("readout matches a hand computation") {
  Setup s;
  const auto bank = MemoryBank::from_personas(s.personas, s.vocab);
  Graph g(s.ps, nullptr, Precision::f64);
  const std::vector<double> q{0.3, -0.2, 0.5, 0.1};
  auto r = memory_readout(g, g.constant(q), bank, s.mp);
  REQUIRE(r.p.size() == bank.size());

  const auto& c1 = s.ps[s.mp.c1].value;
  const auto& c2 = s.ps[s.mp.c2].value;
  std::vector<double> scores;
  for (const auto& e : bank.entries) {
    double d = 0.0;
    for (std::size_t j = 0; j < 4; ++j) d += q[j] * c1[static_cast<std::size_t>(e.word_id) * 4 + j];
    scores.push_back(d);
  }
  double z = 0.0;
  for (double x : scores) z += std::exp(x);
  std::vector<double> expect = q;
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const double p = std::exp(scores[i]) / z;
    CHECK(r.p[i] == doctest::Approx(p).epsilon(1e-12));
    for (std::size_t j = 0; j < 4; ++j) expect[j] += p * c2[static_cast<std::size_t>(bank.entries[i].word_id) * 4 + j];
  }
  for (std::size_t j = 0; j < 4; ++j) CHECK(r.h_mem[j] == doctest::Approx(expect[j]).epsilon(1e-12));
}

TEST_CASE("empty bank passes the query through") {
  Setup s;
  Graph g(s.ps, nullptr, Precision::f64);
  Tensor q = g.constant({1, 2, 3, 4});
  auto r = memory_readout(g, q, MemoryBank{}, s.mp);
  CHECK(r.h_mem.id() == q.id());
  CHECK_FALSE(r.p.defined());
  CHECK(r.keys.empty());
}

TEST_CASE("duplicate words share key rows and attention") {
  Setup s;
  const auto bank = MemoryBank::from_personas(s.personas, s.vocab);
  Graph g(s.ps, nullptr, Precision::f64);
  auto r = memory_readout(g, g.constant({0.9, 0.1, -0.4, 0.2}), bank, s.mp);
  CHECK(r.p[0] == r.p[4]);
}

TEST_CASE("readout gradients") {
  Setup s(3);
  const auto bank = MemoryBank::from_personas(s.personas, s.vocab);
  ParamId q = s.ps.add("query", {3, 1});
  s.ps[q].value = {0.4, -0.6, 0.2};
  auto r = sfar::testing::check_gradients(s.ps, [&](Graph& g) {
    auto out = memory_readout(g, g.param(q), bank, s.mp);
    return ad::sum(ad::tanh(out.h_mem));
  });
  INFO(r.where);
  CHECK(r.worst < 1e-6);
}
