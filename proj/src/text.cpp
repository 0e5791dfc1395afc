// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfar/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "sfar/error.hpp"
#include "stopwords_data.hpp"

namespace sfar {
namespace {

bool is_split_punct(char c) {
  return c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace

bool is_reserved_token(std::string_view token) {
  return token == kPadToken || token == kUnkToken || token == kEosToken || token == kPersonaSlotToken;
}

bool is_punctuation(std::string_view token) {
  if (token.empty()) return false;
  return std::none_of(token.begin(), token.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u >= 0x80;
  });
}

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  for (char c : text) {
    if (is_space(c)) {
      flush();
    } else if (is_split_punct(c)) {
      flush();
      out.emplace_back(1, c);
    } else {
      const auto u = static_cast<unsigned char>(c);
      current.push_back(u < 0x80 ? static_cast<char>(std::tolower(u)) : c);
    }
  }
  flush();
  return out;
}

std::string detokenize(const Tokens& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

// ------------------------------------------------------------- stop words

StopWordSet::StopWordSet(const std::vector<std::string>& words) {
  for (const auto& w : words) words_.insert(w);
}

const StopWordSet& StopWordSet::builtin() {
  static const StopWordSet set(split_lines(detail::kStopWordsText));
  return set;
}

StopWordSet StopWordSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open stop-word file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return StopWordSet(split_lines(buf.str()));
}

Tokens extract_rare_words(const Tokens& trait, const StopWordSet& stop) {
  Tokens out;
  for (const auto& t : trait) {
    if (stop.contains(t) || is_punctuation(t) || is_reserved_token(t)) continue;
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  }
  return out;
}

PersonaTrait make_trait(std::string_view text, const StopWordSet& stop) {
  PersonaTrait trait;
  trait.text = std::string(text);
  trait.tokens = tokenize(text);
  trait.rare_words = extract_rare_words(trait.tokens, stop);
  return trait;
}

Sketch sketchify(const Tokens& response, const std::vector<PersonaTrait>& personas) {
  Sketch sketch;
  sketch.tokens = response;
  for (std::size_t pos = 0; pos < response.size(); ++pos) {
    bool found = false;
    for (std::size_t p = 0; p < personas.size() && !found; ++p) {
      const auto& rare = personas[p].rare_words;
      auto it = std::find(rare.begin(), rare.end(), response[pos]);
      if (it == rare.end()) continue;
      sketch.tokens[pos] = std::string(kPersonaSlotToken);
      sketch.slot_positions.push_back(pos);
      sketch.slot_sources.push_back({p, static_cast<std::size_t>(it - rare.begin())});
      found = true;
    }
  }
  return sketch;
}

Tokens DialogueExample::history_tokens(std::size_t max_turns) const {
  std::size_t first = 0;
  if (max_turns > 0 && history.size() > max_turns) first = history.size() - max_turns;
  Tokens out;
  for (std::size_t i = first; i < history.size(); ++i) {
    if (i > first) out.emplace_back(kEosToken);
    out.insert(out.end(), history[i].begin(), history[i].end());
  }
  if (out.empty()) out.emplace_back(kEosToken);
  return out;
}

DialogueExample make_example(const std::vector<std::string>& personas, const std::vector<std::string>& history,
                             const std::string& response, const StopWordSet& stop) {
  DialogueExample ex;
  for (const auto& p : personas) ex.personas.push_back(make_trait(p, stop));
  for (const auto& h : history) ex.history.push_back(tokenize(h));
  ex.response = tokenize(response);
  ex.sketch = sketchify(ex.response, ex.personas);
  return ex;
}

SketchStats sketch_stats(const std::vector<DialogueExample>& examples) {
  SketchStats s;
  for (const auto& ex : examples) {
    s.slot_tokens += ex.sketch.slot_positions.size();
    s.response_tokens += ex.response.size();
  }
  return s;
}

// ------------------------------------------------------------- vocabulary

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(const std::vector<std::string>& words) {
  id_to_word_ = {std::string(kPadToken), std::string(kUnkToken), std::string(kEosToken),
                 std::string(kPersonaSlotToken)};
  id_to_word_.insert(id_to_word_.end(), words.begin(), words.end());
  for (std::size_t i = 0; i < id_to_word_.size(); ++i) {
    auto [it, inserted] = word_to_id_.emplace(id_to_word_[i], static_cast<int>(i));
    if (!inserted) throw Error("vocabulary word repeated: " + id_to_word_[i]);
  }
}

int Vocabulary::id(std::string_view word) const {
  auto it = word_to_id_.find(std::string(word));
  return it == word_to_id_.end() ? kUnkId : it->second;
}

bool Vocabulary::contains(std::string_view word) const { return word_to_id_.count(std::string(word)) > 0; }

const std::string& Vocabulary::word(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_word_.size())
    throw Error("token id " + std::to_string(id) + " outside vocabulary of size " + std::to_string(size()));
  return id_to_word_[static_cast<std::size_t>(id)];
}

TokenIds Vocabulary::encode(const Tokens& tokens) const {
  TokenIds out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

Tokens Vocabulary::decode(const TokenIds& ids) const {
  Tokens out;
  out.reserve(ids.size());
  for (int i : ids) out.push_back(word(i));
  return out;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write vocabulary to " + path.string());
  for (const auto& w : id_to_word_) out << w << '\n';
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vocabulary " + path.string());
  std::vector<std::string> words;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (n <= kReservedCount) {
      if (!is_reserved_token(line)) throw DatasetError("vocabulary must start with the reserved symbols", n);
      continue;
    }
    words.push_back(line);
  }
  if (n < kReservedCount) throw DatasetError("vocabulary file is truncated");
  return Vocabulary(words);
}

Vocabulary build_vocabulary_from_tokens(const std::vector<Tokens>& corpus, std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& seq : corpus)
    for (const auto& t : seq) {
      ++total;
      if (!is_reserved_token(t)) ++counts[t];
    }
  if (total == 0) throw DatasetError("cannot build a vocabulary from an empty corpus");
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [w, c] : counts)
    if (c >= std::max<std::size_t>(min_count, 1)) kept.emplace_back(w, c);
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> words;
  words.reserve(kept.size());
  for (auto& [w, c] : kept) words.push_back(w);
  return Vocabulary(words);
}

Vocabulary build_vocabulary(const std::vector<DialogueExample>& examples, std::size_t min_count) {
  std::vector<Tokens> corpus;
  for (const auto& ex : examples) {
    for (const auto& p : ex.personas) corpus.push_back(p.tokens);
    for (const auto& h : ex.history) corpus.push_back(h);
    corpus.push_back(ex.response);
  }
  return build_vocabulary_from_tokens(corpus, min_count);
}

}  // namespace sfar
