// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfar/encoder.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sfar/error.hpp"

namespace sfar {

Tensor DropoutSpec::apply(Tensor x) const {
  if (!training || p == 0.0) return x;
  if (!rng) throw Error("dropout in training mode needs a random generator");
  return ad::dropout(x, p, training, *rng);
}

// ---------------------------------------------------------------- embeddings

Tensor embed(Graph& g, ParamId table, int id) {
  Tensor t = g.param(table);
  if (id < 0 || static_cast<std::size_t>(id) >= t.shape().rows)
    throw Error("token id " + std::to_string(id) + " outside embedding table of " + std::to_string(t.shape().rows) +
                " rows");
  if (id == kPadId) return g.zeros(t.shape().cols);
  return ad::row(t, static_cast<std::size_t>(id));
}

std::vector<Tensor> embed(Graph& g, ParamId table, const TokenIds& ids) {
  std::vector<Tensor> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(embed(g, table, id));
  return out;
}

WordVectors read_word_vectors(const std::filesystem::path& path, std::size_t expected_dim) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open word vector file " + path.string());
  WordVectors wv;
  wv.dim = expected_dim;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string word;
    fields >> word;
    std::vector<double> v;
    double x;
    while (fields >> x) v.push_back(x);
    if (!fields.eof()) throw DatasetError("non-numeric vector component", n);
    if (n == 1 && v.size() == 1) continue;  // "<count> <dim>" header
    if (wv.dim == 0) wv.dim = v.size();
    if (v.size() != wv.dim)
      throw DatasetError("expected " + std::to_string(wv.dim) + " components, got " + std::to_string(v.size()), n);
    wv.vectors.emplace(word, std::move(v));
  }
  return wv;
}

PretrainedCoverage init_embeddings(Parameter& table, const Vocabulary& vocab, const WordVectors* vectors,
                                   std::mt19937_64& rng, std::vector<bool>* pretrained_rows) {
  const std::size_t rows = table.shape.rows, dim = table.shape.cols;
  if (rows != vocab.size()) throw Error("embedding table rows do not match the vocabulary size");
  if (vectors && vectors->dim != 0 && vectors->dim != dim)
    throw Error("word vectors have dimension " + std::to_string(vectors->dim) + ", table expects " +
                std::to_string(dim));
  std::normal_distribution<double> noise(0.0, 0.1);
  PretrainedCoverage cov;
  if (pretrained_rows) pretrained_rows->assign(rows, false);
  for (std::size_t r = 0; r < rows; ++r) {
    double* dst = table.value.data() + r * dim;
    const std::vector<double>* src = nullptr;
    if (vectors && r >= static_cast<std::size_t>(kReservedCount)) {
      auto it = vectors->vectors.find(vocab.word(static_cast<int>(r)));
      if (it != vectors->vectors.end()) src = &it->second;
    }
    if (src) {
      for (std::size_t c = 0; c < dim; ++c) dst[c] = (*src)[c];
      ++cov.matched;
      if (pretrained_rows) (*pretrained_rows)[r] = true;
    } else {
      for (std::size_t c = 0; c < dim; ++c) dst[c] = noise(rng);
      if (r >= static_cast<std::size_t>(kReservedCount)) ++cov.missing;
    }
  }
  return cov;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("cosine_similarity: length mismatch");
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0 || bb == 0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

// ------------------------------------------------------------------- LSTM

LstmParams LstmParams::create(ParamSet& params, const std::string& prefix, std::size_t input_dim,
                              std::size_t hidden_dim) {
  LstmParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.w_input = params.add(prefix + ".w_input", {4 * hidden_dim, input_dim});
  p.w_hidden = params.add(prefix + ".w_hidden", {4 * hidden_dim, hidden_dim});
  p.bias = params.add(prefix + ".bias", {4 * hidden_dim, 1});
  return p;
}

LstmParams LstmParams::bind(const ParamSet& params, const std::string& prefix) {
  LstmParams p;
  p.w_input = params.require(prefix + ".w_input");
  p.w_hidden = params.require(prefix + ".w_hidden");
  p.bias = params.require(prefix + ".bias");
  p.hidden_dim = params[p.w_hidden].shape.cols;
  p.input_dim = params[p.w_input].shape.cols;
  return p;
}

void LstmParams::init(ParamSet& params, std::mt19937_64& rng) const {
  init_glorot_uniform(params[w_input], rng);
  init_glorot_uniform(params[w_hidden], rng);
  auto& b = params[bias].value;
  std::fill(b.begin(), b.end(), 0.0);
  for (std::size_t i = hidden_dim; i < 2 * hidden_dim; ++i) b[i] = 1.0;
}

LstmState zero_state(Graph& g, std::size_t hidden_dim) { return {g.zeros(hidden_dim), g.zeros(hidden_dim)}; }

LstmState recurrent_step(Graph& g, Tensor x, const LstmState& state, const LstmParams& params) {
  const std::size_t h = params.hidden_dim;
  Tensor pre_x = ad::matvec(g.param(params.w_input), x);
  Tensor pre_h = ad::matvec(g.param(params.w_hidden), state.h);
  Tensor terms[] = {pre_x, pre_h, g.param(params.bias)};
  Tensor pre = ad::add_n(terms);
  Tensor in_gate = ad::sigmoid(ad::slice(pre, 0, h));
  Tensor forget_gate = ad::sigmoid(ad::slice(pre, h, h));
  Tensor candidate = ad::tanh(ad::slice(pre, 2 * h, h));
  Tensor out_gate = ad::sigmoid(ad::slice(pre, 3 * h, h));
  Tensor c = ad::add(ad::mul(forget_gate, state.c), ad::mul(in_gate, candidate));
  Tensor hid = ad::mul(out_gate, ad::tanh(c));
  return {hid, c};
}

SequenceEncoding encode_sequence(Graph& g, const TokenIds& ids, const LstmParams& params, ParamId embedding,
                                 const DropoutSpec& dropout) {
  if (ids.empty()) throw Error("encode_sequence: empty input sequence");
  SequenceEncoding enc;
  enc.final = zero_state(g, params.hidden_dim);
  enc.states.reserve(ids.size());
  for (int id : ids) {
    enc.final = recurrent_step(g, dropout.embedding(embed(g, embedding, id)), enc.final, params);
    enc.states.push_back(enc.final.h);
  }
  return enc;
}

std::vector<SequenceEncoding> encode_batch(Graph& g, const std::vector<TokenIds>& padded, const LstmParams& params,
                                           ParamId embedding, const DropoutSpec& dropout) {
  if (padded.empty()) return {};
  const std::size_t len = padded[0].size();
  for (const auto& row : padded)
    if (row.size() != len) throw Error("encode_batch: rows must be padded to the same length");
  std::vector<SequenceEncoding> out(padded.size());
  for (auto& enc : out) enc.final = zero_state(g, params.hidden_dim);
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t b = 0; b < padded.size(); ++b) {
      const int id = padded[b][t];
      const double keep = id == kPadId ? 0.0 : 1.0;
      LstmState& s = out[b].final;
      LstmState next = recurrent_step(g, dropout.embedding(embed(g, embedding, id)), s, params);
      Tensor m = g.constant(std::vector<double>(params.hidden_dim, keep));
      Tensor inv = g.constant(std::vector<double>(params.hidden_dim, 1.0 - keep));
      s.h = ad::add(ad::mul(m, next.h), ad::mul(inv, s.h));
      s.c = ad::add(ad::mul(m, next.c), ad::mul(inv, s.c));
      if (id != kPadId) out[b].states.push_back(s.h);
    }
  }
  for (const auto& enc : out)
    if (enc.states.empty()) throw Error("encode_batch: a row contains only padding");
  return out;
}

std::vector<Tensor> encode_personas(Graph& g, const std::vector<TokenIds>& traits, const LstmParams& params,
                                    ParamId embedding, const DropoutSpec& dropout) {
  if (traits.empty()) throw Error("encode_personas: no persona traits");
  std::vector<Tensor> finals;
  finals.reserve(traits.size());
  for (const auto& t : traits) finals.push_back(encode_sequence(g, t, params, embedding, dropout).final.h);
  return finals;
}

}  // namespace sfar
