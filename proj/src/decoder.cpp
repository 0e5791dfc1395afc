// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfar/decoder.hpp"

#include <cmath>

#include "sfar/error.hpp"

namespace sfar {

DecoderParams DecoderParams::create(ParamSet& params, ParamId embedding, std::size_t emb_dim,
                                    std::size_t hidden_dim) {
  DecoderParams d;
  d.embedding = embedding;
  d.cell = LstmParams::create(params, "decoder.cell", emb_dim, hidden_dim);
  d.w_init = params.add("decoder.w_init", {hidden_dim, 2 * hidden_dim});
  d.b_init = params.add("decoder.b_init", {hidden_dim, 1});
  d.w_context = params.add("decoder.w_context", {hidden_dim, 3 * hidden_dim});
  d.b_context = params.add("decoder.b_context", {hidden_dim, 1});
  d.w_attn = params.add("decoder.w_attn", {hidden_dim, hidden_dim});
  d.b_attn = params.add("decoder.b_attn", {hidden_dim, 1});
  if (emb_dim != hidden_dim) d.adapter = params.add("decoder.adapter", {emb_dim, hidden_dim});
  return d;
}

DecoderParams DecoderParams::bind(const ParamSet& params, ParamId embedding) {
  DecoderParams d;
  d.embedding = embedding;
  d.cell = LstmParams::bind(params, "decoder.cell");
  d.w_init = params.require("decoder.w_init");
  d.b_init = params.require("decoder.b_init");
  d.w_context = params.require("decoder.w_context");
  d.b_context = params.require("decoder.b_context");
  d.w_attn = params.require("decoder.w_attn");
  d.b_attn = params.require("decoder.b_attn");
  d.adapter = params.find("decoder.adapter");
  return d;
}

void DecoderParams::init(ParamSet& params, std::mt19937_64& rng) const {
  cell.init(params, rng);
  init_glorot_uniform(params[w_init], rng);
  init_glorot_uniform(params[w_context], rng);
  init_glorot_uniform(params[w_attn], rng);
  if (adapter.valid()) init_glorot_uniform(params[adapter], rng);
}

LstmState init_decoder_state(Graph& g, Tensor enc_final, Tensor h_mem, const DecoderParams& params) {
  Tensor parts[] = {enc_final, h_mem};
  Tensor h0 = ad::tanh(ad::add(ad::matvec(g.param(params.w_init), ad::concat(parts)), g.param(params.b_init)));
  return {h0, g.zeros(h0.size())};
}

Attention attend(Graph& g, Tensor h, std::span<const Tensor> keys, const DecoderParams& params,
                 const std::vector<bool>* mask) {
  if (keys.empty()) throw Error("attend: no keys");
  Tensor query = ad::add(ad::matvec(g.param(params.w_attn), h), g.param(params.b_attn));
  std::vector<Tensor> scores;
  scores.reserve(keys.size());
  for (const Tensor& k : keys) scores.push_back(ad::dot(query, k));
  Tensor s = ad::concat(scores);
  Tensor w = mask ? ad::masked_softmax(s, *mask) : ad::softmax(s);
  return {ad::weighted_sum(w, keys), w};
}

std::vector<double> DecoderStep::distribution() const {
  auto lp = log_probs.values();
  std::vector<double> out(lp.size());
  for (std::size_t i = 0; i < lp.size(); ++i) out[i] = std::exp(lp[i]);
  return out;
}

DecoderStep decode_step(Graph& g, int y_prev, const LstmState& state, const EncoderOutput& enc,
                        const DecoderParams& params, AttentionMode mode, const DropoutSpec& dropout) {
  DecoderStep step;
  Tensor x = dropout.embedding(embed(g, params.embedding, y_prev));
  step.state = recurrent_step(g, x, state, params.cell);
  const Tensor h = step.state.h;
  Tensor conv_ctx, pers_ctx;
  if (mode == AttentionMode::full) {
    Attention conv = attend(g, h, enc.conv_states, params);
    Attention pers = attend(g, h, enc.persona_finals, params);
    conv_ctx = conv.context;
    pers_ctx = pers.context;
    step.conv_attn = conv.weights;
    step.pers_attn = pers.weights;
  } else {
    conv_ctx = g.zeros(h.size());
    pers_ctx = g.zeros(h.size());
  }
  Tensor parts[] = {h, conv_ctx, pers_ctx};
  step.context =
      ad::tanh(ad::add(ad::matvec(g.param(params.w_context), ad::concat(parts)), g.param(params.b_context)));
  Tensor out = dropout.context(step.context);
  if (params.adapter.valid()) out = ad::matvec(g.param(params.adapter), out);
  step.log_probs = ad::log_softmax(ad::matvec(g.param(params.embedding), out));
  return step;
}

}  // namespace sfar
