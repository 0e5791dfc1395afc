// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0
//
// Sketch decoder.
//
//   h0      = tanh(W_d [h_conv_T ; h_mem] + b_d),  c0 = 0
//   h_u     = LSTM(e(y_{u-1}), h_{u-1})
//   q_u     = W_a h_u + b_a
//   c_conv  = sum_t softmax_t(<q_u, h_conv_t>) h_conv_t
//   c_pers  = sum_n softmax_n(<q_u, h_pers_n>) h_pers_n
//   c_u     = tanh(W_ac [h_u ; c_conv ; c_pers] + b_ac)
//   P(y_u)  = softmax(E c_u)            (E: the input embedding table)
//
// Without attention both contexts are zero vectors, so W_ac keeps its shape.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "sfar/autograd.hpp"
#include "sfar/encoder.hpp"

namespace sfar {

enum class AttentionMode { none, full };

struct DecoderParams {
  LstmParams cell;
  ParamId w_init, b_init;        // d_hid x 2 d_hid, d_hid
  ParamId w_context, b_context;  // d_hid x 3 d_hid, d_hid
  ParamId w_attn, b_attn;        // d_hid x d_hid, d_hid
  ParamId adapter;               // d_emb x d_hid; only when d_emb != d_hid
  ParamId embedding;             // shared with the encoder, V x d_emb

  static DecoderParams create(ParamSet& params, ParamId embedding, std::size_t emb_dim, std::size_t hidden_dim);
  static DecoderParams bind(const ParamSet& params, ParamId embedding);
  void init(ParamSet& params, std::mt19937_64& rng) const;
};

LstmState init_decoder_state(Graph& g, Tensor enc_final, Tensor h_mem, const DecoderParams& params);

struct Attention {
  Tensor context;
  Tensor weights;
};

/// Dot-product attention of W_a h + b_a over `keys`. Positions where
/// `mask` is false get weight 0; throws if all are masked.
Attention attend(Graph& g, Tensor h, std::span<const Tensor> keys, const DecoderParams& params,
                 const std::vector<bool>* mask = nullptr);

struct DecoderStep {
  LstmState state;
  Tensor context;    // c_u
  Tensor log_probs;  // log P(y_u | ...), length V
  Tensor conv_attn;  // undefined without attention
  Tensor pers_attn;  // undefined without attention

  std::vector<double> distribution() const;
};

DecoderStep decode_step(Graph& g, int y_prev, const LstmState& state, const EncoderOutput& enc,
                        const DecoderParams& params, AttentionMode mode, const DropoutSpec& dropout = DropoutSpec::off());

}  // namespace sfar
