// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <fstream>

#include "sfar/encoder.hpp"
#include "sfar/error.hpp"
#include "support.hpp"

using namespace sfar;

namespace {

struct Net {
  ParamSet ps;
  ParamId emb;
  LstmParams lstm;
  Net(std::size_t vocab, std::size_t e, std::size_t h, std::uint64_t seed = 1) {
    emb = ps.add("emb", {vocab, e});
    lstm = LstmParams::create(ps, "enc", e, h);
    std::mt19937_64 rng(seed);
    init_normal(ps[emb], 0.5, rng);
    lstm.init(ps, rng);
    // Non-trivial biases so every gate path is exercised.
    std::normal_distribution<double> n(0.0, 0.3);
    for (double& v : ps[lstm.bias].value) v += n(rng);
  }
};

double sigm(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Straight-line LSTM written without the autograd library.
std::vector<double> reference_final_h(const Net& net, const TokenIds& ids) {
  const std::size_t e = net.lstm.input_dim, h = net.lstm.hidden_dim;
  const auto& E = net.ps[net.emb].value;
  const auto& Wx = net.ps[net.lstm.w_input].value;
  const auto& Wh = net.ps[net.lstm.w_hidden].value;
  const auto& b = net.ps[net.lstm.bias].value;
  std::vector<double> hs(h, 0.0), cs(h, 0.0);
  for (int id : ids) {
    std::vector<double> x(e, 0.0);
    if (id != kPadId)
      for (std::size_t j = 0; j < e; ++j) x[j] = E[static_cast<std::size_t>(id) * e + j];
    std::vector<double> pre(4 * h);
    for (std::size_t r = 0; r < 4 * h; ++r) {
      double s = b[r];
      for (std::size_t j = 0; j < e; ++j) s += Wx[r * e + j] * x[j];
      for (std::size_t j = 0; j < h; ++j) s += Wh[r * h + j] * hs[j];
      pre[r] = s;
    }
    for (std::size_t j = 0; j < h; ++j) {
      const double i = sigm(pre[j]), f = sigm(pre[h + j]), g = std::tanh(pre[2 * h + j]), o = sigm(pre[3 * h + j]);
      cs[j] = f * cs[j] + i * g;
      hs[j] = o * std::tanh(cs[j]);
    }
  }
  return hs;
}

}  // namespace

TEST_CASE("embedding lookup") {
  Net net(10, 3, 4);
  Graph g(net.ps, nullptr, Precision::f64);
  auto pad = embed(g, net.emb, kPadId).values();
  for (double v : pad) CHECK(v == 0.0);
  CHECK(embed(g, net.emb, 5)[1] == net.ps[net.emb].value[5 * 3 + 1]);
  CHECK_THROWS_AS(embed(g, net.emb, 10), Error);
  CHECK_THROWS_AS(embed(g, net.emb, -1), Error);
}

TEST_CASE("lstm init puts 1 on the forget bias") {
  Net net(10, 3, 4, 0);
  ParamSet fresh;
  auto l = LstmParams::create(fresh, "x", 3, 4);
  std::mt19937_64 rng(0);
  l.init(fresh, rng);
  const auto& b = fresh[l.bias].value;
  for (std::size_t j = 0; j < 16; ++j) CHECK(b[j] == (j >= 4 && j < 8 ? 1.0 : 0.0));
}

TEST_CASE("encoder matches a straight-line reference") {
  Net net(12, 5, 6);
  Graph g(net.ps, nullptr, Precision::f64);
  const TokenIds ids{4, 7, 2, 11, 5};
  auto enc = encode_sequence(g, ids, net.lstm, net.emb);
  CHECK(enc.states.size() == ids.size());
  const auto ref = reference_final_h(net, ids);
  for (std::size_t j = 0; j < ref.size(); ++j) CHECK(enc.final.h[j] == doctest::Approx(ref[j]).epsilon(1e-12));
  CHECK_THROWS_AS(encode_sequence(g, {}, net.lstm, net.emb), Error);
}

TEST_CASE("padded batch encoding equals unpadded encoding") {
  Net net(15, 4, 5);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> tok(kReservedCount, 14);
  std::uniform_int_distribution<std::size_t> len(1, 7);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<TokenIds> rows(4);
    std::size_t longest = 0;
    for (auto& r : rows) {
      for (std::size_t i = len(rng); i > 0; --i) r.push_back(tok(rng));
      longest = std::max(longest, r.size());
    }
    std::vector<TokenIds> padded = rows;
    for (auto& r : padded) r.resize(longest, kPadId);
    Graph g(net.ps, nullptr, Precision::f64);
    auto batch = encode_batch(g, padded, net.lstm, net.emb);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      auto single = encode_sequence(g, rows[k], net.lstm, net.emb);
      REQUIRE(batch[k].states.size() == rows[k].size());
      for (std::size_t j = 0; j < 5; ++j) {
        CHECK(batch[k].final.h[j] == doctest::Approx(single.final.h[j]).epsilon(1e-12));
        CHECK(batch[k].final.c[j] == doctest::Approx(single.final.c[j]).epsilon(1e-12));
        CHECK(batch[k].states.back()[j] == doctest::Approx(single.states.back()[j]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("persona encoding is independent per trait") {
  Net net(15, 4, 5);
  Graph g(net.ps, nullptr, Precision::f64);
  auto finals = encode_personas(g, {{4, 5}, {6}, {7, 8, 9}}, net.lstm, net.emb);
  REQUIRE(finals.size() == 3);
  auto alone = encode_sequence(g, {6}, net.lstm, net.emb);
  for (std::size_t j = 0; j < 5; ++j) CHECK(finals[1][j] == alone.final.h[j]);
  CHECK_THROWS_AS(encode_personas(g, {}, net.lstm, net.emb), Error);
}

TEST_CASE("encoder gradients") {
  Net net(9, 3, 4);
  auto r = sfar::testing::check_gradients(net.ps, [&](Graph& g) {
    auto enc = encode_sequence(g, {4, 8, 5, 0, 6}, net.lstm, net.emb);
    Tensor terms[] = {ad::sum(enc.final.h), ad::sum(ad::mul(enc.final.c, enc.states[1]))};
    return ad::add_n(terms);
  });
  INFO(r.where);
  CHECK(r.worst < 1e-6);
}

TEST_CASE("word vectors and pretrained initialisation") {
  const auto wv = read_word_vectors(std::string(SFAR_TEST_DATA) + "/vectors.txt");
  CHECK(wv.dim == 4);
  CHECK(wv.vectors.size() == 3);
  CHECK(wv.vectors.at("farmer")[3] == 1.0);
  CHECK_THROWS_AS(read_word_vectors(std::string(SFAR_TEST_DATA) + "/vectors.txt", 5), DatasetError);

  Vocabulary vocab({"bee", "farmer", "tractor"});
  ParamSet ps;
  ParamId table = ps.add("emb", {vocab.size(), 4});
  std::mt19937_64 rng(0);
  std::vector<bool> rows;
  auto cov = init_embeddings(ps[table], vocab, &wv, rng, &rows);
  CHECK(cov.matched == 2);
  CHECK(cov.missing == 1);
  CHECK(rows[static_cast<std::size_t>(vocab.id("bee"))]);
  CHECK_FALSE(rows[static_cast<std::size_t>(vocab.id("tractor"))]);
  CHECK_FALSE(rows[kEosId]);
  const std::size_t bee = static_cast<std::size_t>(vocab.id("bee"));
  CHECK(ps[table].value[bee * 4 + 2] == doctest::Approx(0.3));

  const std::string bad = sfar::testing::temp_path("bad_vectors.txt").string();
  std::ofstream(bad) << "a 1 2\nb 1 x\n";
  CHECK_THROWS_AS(read_word_vectors(bad), DatasetError);
}

TEST_CASE("cosine similarity") {
  const std::vector<double> a{1, 0}, b{0, 2}, c{3, 0};
  CHECK(cosine_similarity(a, b) == doctest::Approx(0.0));
  CHECK(cosine_similarity(a, c) == doctest::Approx(1.0));
}
