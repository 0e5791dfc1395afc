// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0
//
// A small generator of persona-grounded dialogues. Agent replies state a
// persona fact matching the partner's question and often echo a word the
// partner mentioned earlier, so both the persona memory and attention over
// the history carry signal. Used for demos and tests when no real corpus is
// at hand.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfar/dataset.hpp"

namespace sfar {

/// A persona of 4 or 5 traits from distinct categories.
std::vector<std::string> synthetic_persona(std::uint64_t seed);

/// Dialogues are generated until `examples` agent turns exist; the result
/// holds exactly that many records.
std::vector<DialogueRecord> synthetic_dialogues(std::size_t examples, std::uint64_t seed);

}  // namespace sfar
