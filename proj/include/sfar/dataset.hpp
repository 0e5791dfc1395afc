// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dataset files.
//
// JSONL: one example per line,
//   {"personas": [string...], "history": [string...], "response": string}
// where history holds the turns preceding the agent's response, oldest first.
//
// ParlAI text: "1 your persona: ..." lines followed by numbered
// "k <partner utterance>\t<agent utterance>[\t...]" turns. Numbering restarts
// at 1 for each dialogue. Every turn line yields one example.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sfar/text.hpp"

namespace sfar {

enum class DatasetFormat { jsonl, parlai };

DatasetFormat parse_dataset_format(const std::string& name);

/// Raw, untokenised record in the JSONL schema.
struct DialogueRecord {
  std::vector<std::string> personas;
  std::vector<std::string> history;
  std::string response;
};

std::vector<DialogueRecord> read_jsonl_records(std::istream& in);
std::vector<DialogueRecord> read_parlai_records(std::istream& in);
void write_jsonl_records(std::ostream& out, const std::vector<DialogueRecord>& records);

std::vector<DialogueExample> to_examples(const std::vector<DialogueRecord>& records,
                                         const StopWordSet& stop = StopWordSet::builtin());

/// Reads and sketchifies a dataset. Throws DatasetError carrying the line
/// number of the first malformed line.
std::vector<DialogueExample> load_dataset(const std::filesystem::path& path, DatasetFormat format);
std::vector<DialogueRecord> load_records(const std::filesystem::path& path, DatasetFormat format);

}  // namespace sfar
