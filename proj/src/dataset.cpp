// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfar/dataset.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "sfar/error.hpp"

namespace sfar {

using nlohmann::json;

DatasetFormat parse_dataset_format(const std::string& name) {
  if (name == "jsonl") return DatasetFormat::jsonl;
  if (name == "parlai" || name == "parlai-text") return DatasetFormat::parlai;
  throw DatasetError("unknown dataset format '" + name + "' (expected jsonl or parlai-text)");
}

namespace {

std::vector<std::string> string_array(const json& j, const char* key, std::size_t line) {
  if (!j.contains(key) || !j[key].is_array()) throw DatasetError(std::string("missing array field \"") + key + "\"", line);
  std::vector<std::string> out;
  for (const auto& v : j[key]) {
    if (!v.is_string()) throw DatasetError(std::string("non-string entry in \"") + key + "\"", line);
    out.push_back(v.get<std::string>());
  }
  return out;
}

bool blank(const std::string& s) {
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

std::vector<DialogueRecord> read_jsonl_records(std::istream& in) {
  std::vector<DialogueRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (blank(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DatasetError(std::string("invalid JSON: ") + e.what(), n);
    }
    if (!j.is_object()) throw DatasetError("record is not a JSON object", n);
    DialogueRecord r;
    r.personas = string_array(j, "personas", n);
    r.history = string_array(j, "history", n);
    if (!j.contains("response") || !j["response"].is_string()) throw DatasetError("missing string field \"response\"", n);
    r.response = j["response"].get<std::string>();
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<DialogueRecord> read_parlai_records(std::istream& in) {
  static const std::string kSelf = "your persona:";
  static const std::string kPartner = "partner's persona:";
  std::vector<DialogueRecord> out;
  std::vector<std::string> personas;
  std::vector<std::string> history;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    std::size_t sp = line.find(' ');
    if (sp == std::string::npos || sp == 0) throw DatasetError("expected '<number> <text>'", n);
    int index = 0;
    try {
      std::size_t used = 0;
      index = std::stoi(line.substr(0, sp), &used);
      if (used != sp) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw DatasetError("line does not start with a turn number", n);
    }
    if (index == 1) {
      personas.clear();
      history.clear();
    }
    std::string text = line.substr(sp + 1);
    if (text.rfind(kSelf, 0) == 0) {
      std::string trait = text.substr(kSelf.size());
      while (!trait.empty() && trait.front() == ' ') trait.erase(trait.begin());
      personas.push_back(trait);
      continue;
    }
    if (text.rfind(kPartner, 0) == 0) continue;
    std::size_t tab = text.find('\t');
    if (tab == std::string::npos) throw DatasetError("turn line has no tab-separated agent utterance", n);
    std::string partner = text.substr(0, tab);
    std::string rest = text.substr(tab + 1);
    std::string agent = rest.substr(0, rest.find('\t'));
    history.push_back(partner);
    out.push_back(DialogueRecord{personas, history, agent});
    history.push_back(agent);
  }
  return out;
}

void write_jsonl_records(std::ostream& out, const std::vector<DialogueRecord>& records) {
  for (const auto& r : records) {
    json j = {{"personas", r.personas}, {"history", r.history}, {"response", r.response}};
    out << j.dump() << '\n';
  }
}

std::vector<DialogueExample> to_examples(const std::vector<DialogueRecord>& records, const StopWordSet& stop) {
  std::vector<DialogueExample> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(make_example(r.personas, r.history, r.response, stop));
  return out;
}

std::vector<DialogueRecord> load_records(const std::filesystem::path& path, DatasetFormat format) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset " + path.string());
  return format == DatasetFormat::jsonl ? read_jsonl_records(in) : read_parlai_records(in);
}

std::vector<DialogueExample> load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  return to_examples(load_records(path, format));
}

}  // namespace sfar
