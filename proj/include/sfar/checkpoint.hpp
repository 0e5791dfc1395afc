// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0
//
// Checkpoint files:
//
//   "SFAR1"                 5-byte magic, the digit is the format version
//   uint64 little endian    length of the metadata block
//   metadata                UTF-8 JSON: kind, config, vocab, tensor directory,
//                           optimizer step, metrics, persona pool
//   tensors                 float32 little endian, row-major, in directory order
//
// Optimizer moments are stored as tensors named "adam.m/<param>" and
// "adam.v/<param>".

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sfar/autograd.hpp"
#include "sfar/language_model.hpp"
#include "sfar/model.hpp"
#include "sfar/optimizer.hpp"
#include "sfar/text.hpp"

namespace sfar {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  std::string kind;     // "sketch" or "lm"
  nlohmann::json config = nlohmann::json::object();
  Vocabulary vocab;
  ParamSet params;
  std::optional<OptimizerState> optimizer;
  nlohmann::json metrics = nlohmann::json::array();
  std::vector<std::vector<std::string>> persona_pool;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// A sketch model plus the variant it was trained as.
struct LoadedModel {
  SketchModel model;
  Variant variant = Variant::sf_a_r;
  Vocabulary vocab;
};

Checkpoint make_checkpoint(const SketchModel& model, Variant variant, const Vocabulary& vocab);
LoadedModel model_from_checkpoint(const Checkpoint& ckpt);

Checkpoint make_checkpoint(const RecurrentLm& lm, const Vocabulary& vocab);
RecurrentLm lm_from_checkpoint(const Checkpoint& ckpt);

}  // namespace sfar
