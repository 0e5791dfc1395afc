// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfar/inference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>

#include "sfar/error.hpp"

namespace sfar {

using nlohmann::json;

std::string to_string(FillMode m) { return m == FillMode::rerank ? "rerank" : "pointer"; }

FillMode parse_fill_mode(const std::string& name) {
  if (name == "rerank") return FillMode::rerank;
  if (name == "pointer") return FillMode::pointer;
  throw Error("unknown fill mode '" + name + "' (expected rerank or pointer)");
}

void GenerationConfig::validate() const {
  if (beam_size == 0) throw Error("beam size must be at least 1");
  if (max_length == 0) throw Error("max length must be at least 1");
  if (candidate_cap < beam_size) throw Error("candidate cap must be at least the beam size");
}

TokenIds Hypothesis::sketch() const {
  TokenIds out = tokens;
  if (!out.empty() && out.back() == kEosId && finished && !truncated) out.pop_back();
  return out;
}

namespace {

std::vector<double> copy_values(Tensor t) {
  if (!t.defined()) return {};
  auto v = t.values();
  return {v.begin(), v.end()};
}

struct Expansion {
  double score;
  std::size_t parent;
  int token;
};

}  // namespace

std::vector<Hypothesis> beam_search(Graph& g, const SketchModel& model, const ModelContext& ctx,
                                    const GenerationConfig& config) {
  config.validate();
  const std::size_t beam = config.beam_size;
  const bool pointer = !ctx.bank.empty();
  const bool per_step = model.config().pointer_per_step;
  std::vector<Tensor> masked;
  if (pointer && !per_step)
    masked = mask_memory(ctx.memory.keys, model.pointer_gates(g, ctx, kEosId, ctx.initial.h));

  Hypothesis root;
  root.state = ctx.initial;
  std::vector<Hypothesis> alive{root};
  std::vector<Hypothesis> finished;
  const DropoutSpec off = DropoutSpec::off();

  for (std::size_t length = 1; length <= config.max_length && !alive.empty(); ++length) {
    std::vector<DecoderStep> steps;
    std::vector<std::vector<double>> pointer_dists;
    std::vector<Expansion> expansions;
    steps.reserve(alive.size());
    for (std::size_t p = 0; p < alive.size(); ++p) {
      const Hypothesis& h = alive[p];
      const int prev = h.tokens.empty() ? kEosId : h.tokens.back();
      DecoderStep s = model.step(g, prev, h.state, ctx, off);
      if (pointer) {
        std::vector<Tensor> keys = masked;
        if (per_step) keys = mask_memory(ctx.memory.keys, model.pointer_gates(g, ctx, prev, s.state.h));
        pointer_dists.push_back(copy_values(local_pointer(g, s.state.h, keys, model.pointer())));
      }
      const auto lp = s.log_probs.values();
      for (std::size_t t = 0; t < lp.size(); ++t) {
        const int tok = static_cast<int>(t);
        if (tok == kPadId || (config.block_unk && tok == kUnkId)) continue;
        if (config.block_repeats && !h.tokens.empty() && h.tokens.back() == tok) continue;
        expansions.push_back({h.log_prob + lp[t], p, tok});
      }
      steps.push_back(std::move(s));
    }

    const std::size_t keep = std::min(beam, expansions.size());
    auto order = [](const Expansion& a, const Expansion& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.parent != b.parent) return a.parent < b.parent;
      return a.token < b.token;
    };
    std::partial_sort(expansions.begin(), expansions.begin() + static_cast<std::ptrdiff_t>(keep), expansions.end(),
                      order);

    std::vector<Hypothesis> next;
    for (std::size_t k = 0; k < keep; ++k) {
      const Expansion& e = expansions[k];
      const Hypothesis& parent = alive[e.parent];
      const DecoderStep& s = steps[e.parent];
      Hypothesis h;
      h.tokens = parent.tokens;
      h.tokens.push_back(e.token);
      h.log_prob = e.score;
      h.state = s.state;
      h.conv_attn = parent.conv_attn;
      h.pers_attn = parent.pers_attn;
      h.pointer = parent.pointer;
      if (s.conv_attn.defined()) h.conv_attn.push_back(copy_values(s.conv_attn));
      if (s.pers_attn.defined()) h.pers_attn.push_back(copy_values(s.pers_attn));
      if (pointer) h.pointer.push_back(pointer_dists[e.parent]);
      if (e.token == kEosId) {
        h.finished = true;
        finished.push_back(std::move(h));
      } else if (length == config.max_length) {
        h.finished = true;
        h.truncated = true;
        finished.push_back(std::move(h));
      } else {
        next.push_back(std::move(h));
      }
    }
    alive = std::move(next);

    if (finished.size() >= beam && !alive.empty()) {
      std::vector<double> scores;
      for (const auto& f : finished) scores.push_back(f.log_prob);
      std::nth_element(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(beam - 1), scores.end(),
                       std::greater<>());
      const double kth = scores[beam - 1];
      double best_alive = -std::numeric_limits<double>::infinity();
      for (const auto& a : alive) best_alive = std::max(best_alive, a.log_prob);
      if (best_alive <= kth) break;
    }
  }

  std::stable_sort(finished.begin(), finished.end(), [](const Hypothesis& a, const Hypothesis& b) {
    if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
    return a.tokens < b.tokens;
  });
  if (finished.size() > beam) finished.resize(beam);
  return finished;
}

std::optional<std::size_t> select_persona(const Hypothesis& hyp, std::size_t persona_count,
                                          const std::vector<double>& memory_p, const MemoryBank& bank) {
  const TokenIds sketch = hyp.sketch();
  auto it = std::find(sketch.begin(), sketch.end(), kPersonaSlotId);
  if (it == sketch.end()) return std::nullopt;
  if (persona_count == 0) throw Error("select_persona: no persona traits");
  const auto u = static_cast<std::size_t>(it - sketch.begin());
  if (u < hyp.pers_attn.size() && hyp.pers_attn[u].size() == persona_count) {
    const auto& w = hyp.pers_attn[u];
    return static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
  }
  std::vector<double> mass(persona_count, 0.0);
  for (std::size_t i = 0; i < bank.size() && i < memory_p.size(); ++i) mass[bank.entries[i].persona] += memory_p[i];
  return static_cast<std::size_t>(std::max_element(mass.begin(), mass.end()) - mass.begin());
}

FillCandidates fill_candidates(const Tokens& sketch, const Tokens& rare_words, std::size_t cap) {
  FillCandidates out;
  std::vector<std::size_t> slots;
  for (std::size_t i = 0; i < sketch.size(); ++i)
    if (sketch[i] == kPersonaSlotToken) slots.push_back(i);
  if (slots.empty() || cap == 0) {
    if (cap > 0) {
      out.candidates.push_back(sketch);
      out.assignments.emplace_back();
    }
    return out;
  }
  if (rare_words.empty()) {
    Tokens t = sketch;
    for (std::size_t s : slots) t[s] = std::string(kUnkToken);
    out.candidates.push_back(std::move(t));
    out.assignments.emplace_back();
    out.flagged = true;
    return out;
  }
  const std::size_t k = slots.size(), m = rare_words.size();
  const bool distinct = m >= k;
  std::vector<std::size_t> idx(k, 0);
  std::vector<bool> used(m, false);

  // Depth-first enumeration visits index tuples in lexicographic order.
  auto emit = [&]() {
    Tokens t = sketch;
    for (std::size_t j = 0; j < k; ++j) t[slots[j]] = rare_words[idx[j]];
    out.candidates.push_back(std::move(t));
    out.assignments.push_back(idx);
  };
  std::function<void(std::size_t)> rec = [&](std::size_t depth) {
    if (out.candidates.size() >= cap) return;
    if (depth == k) {
      emit();
      return;
    }
    for (std::size_t w = 0; w < m && out.candidates.size() < cap; ++w) {
      if (distinct && used[w]) continue;
      idx[depth] = w;
      if (distinct) used[w] = true;
      rec(depth + 1);
      if (distinct) used[w] = false;
    }
  };
  rec(0);
  return out;
}

json AttentionTrace::to_json() const {
  return {{"conv_attn", conv_attn},           {"pers_attn", pers_attn},
          {"memory_p", memory_p},             {"decoder_tokens", decoder_tokens},
          {"encoder_tokens", encoder_tokens}, {"traits", traits}};
}

AttentionTrace AttentionTrace::from_json(const json& j) {
  AttentionTrace t;
  j.at("conv_attn").get_to(t.conv_attn);
  j.at("pers_attn").get_to(t.pers_attn);
  j.at("memory_p").get_to(t.memory_p);
  j.at("decoder_tokens").get_to(t.decoder_tokens);
  j.at("encoder_tokens").get_to(t.encoder_tokens);
  j.at("traits").get_to(t.traits);
  return t;
}

json GenerationDebug::to_json() const {
  json beams_json = json::array();
  for (const auto& b : beams) {
    beams_json.push_back({{"sketch", detokenize(b.sketch)},
                          {"log_prob", b.log_prob},
                          {"truncated", b.truncated},
                          {"persona", b.persona ? json(*b.persona) : json(nullptr)},
                          {"flagged", b.flagged}});
  }
  json cands = json::array();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    cands.push_back({{"text", detokenize(c.tokens)},
                     {"score", std::isfinite(c.score) ? json(c.score) : json(nullptr)},
                     {"beam", c.beam},
                     {"fill", c.fill},
                     {"chosen", i == chosen}});
  }
  return {{"fill", to_string(fill)},
          {"sketch", beams.empty() ? std::string() : detokenize(beams[chosen_beam].sketch)},
          {"beams", beams_json},
          {"candidates", cands},
          {"chosen_beam", chosen_beam},
          {"persona", persona ? json(*persona) : json(nullptr)},
          {"unfilled", unfilled},
          {"attention", attention.to_json()}};
}

GenerationResult generate_response(const SketchModel& model, const Vocabulary& vocab, const TokenLogProbModel* lm,
                                   const std::vector<PersonaTrait>& personas, const std::vector<Tokens>& history,
                                   const GenerationConfig& config) {
  config.validate();
  if (config.fill == FillMode::rerank && lm == nullptr) throw Error("rerank fill needs a language model");
  if (lm && lm->vocab_size() != vocab.size()) throw Error("language model vocabulary does not match the model");

  DialogueExample ex;
  ex.personas = personas;
  ex.history = history;
  const EncodedExample enc = model.encode(ex, vocab);
  Graph g(model.params());
  const ModelContext ctx = model.encode_context(g, enc, DropoutSpec::off());
  const std::vector<Hypothesis> beams = beam_search(g, model, ctx, config);
  const std::vector<double> memory_p = copy_values(ctx.memory.p);

  GenerationResult result;
  GenerationDebug& dbg = result.debug;
  dbg.fill = config.fill;
  for (const auto& h : beams) {
    BeamRecord r;
    r.sketch = vocab.decode(h.sketch());
    r.log_prob = h.log_prob;
    r.truncated = h.truncated;
    r.persona = select_persona(h, personas.size(), memory_p, ctx.bank);
    dbg.beams.push_back(std::move(r));
  }

  if (config.fill == FillMode::rerank) {
    for (std::size_t b = 0; b < beams.size(); ++b) {
      BeamRecord& r = dbg.beams[b];
      const Tokens words = r.persona ? personas[*r.persona].rare_words : Tokens{};
      FillCandidates fc = fill_candidates(r.sketch, words, config.candidate_cap);
      r.flagged = fc.flagged;
      for (std::size_t c = 0; c < fc.candidates.size(); ++c) {
        ScoredCandidate sc;
        sc.tokens = std::move(fc.candidates[c]);
        sc.fill = std::move(fc.assignments[c]);
        sc.beam = b;
        // An empty reply only wins when nothing else was produced.
        sc.score = sc.tokens.empty() ? std::numeric_limits<double>::infinity() : lm_score(*lm, vocab.encode(sc.tokens));
        dbg.candidates.push_back(std::move(sc));
      }
    }
    dbg.chosen = rank(dbg.candidates);
    dbg.chosen_beam = dbg.candidates[dbg.chosen].beam;
    result.tokens = dbg.candidates[dbg.chosen].tokens;
  } else {
    dbg.chosen_beam = 0;
    const PointerFill pf = fill_with_pointer(dbg.beams[0].sketch, beams[0].pointer, ctx.bank, vocab);
    dbg.unfilled = pf.unfilled;
    result.tokens = pf.tokens;
  }
  dbg.persona = dbg.beams[dbg.chosen_beam].persona;

  const Hypothesis& chosen = beams[dbg.chosen_beam];
  AttentionTrace& at = dbg.attention;
  at.conv_attn = chosen.conv_attn;
  at.pers_attn = chosen.pers_attn;
  at.memory_p = memory_p;
  at.decoder_tokens = vocab.decode(chosen.tokens);
  at.encoder_tokens = ex.history_tokens(model.config().max_history_turns);
  for (const auto& p : personas) at.traits.push_back(p.text.empty() ? detokenize(p.tokens) : p.text);

  result.text = detokenize(result.tokens);
  return result;
}

void export_attention(const AttentionTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write attention trace to " + path.string());
  out << trace.to_json().dump(2) << '\n';
  if (!out) throw Error("failed writing attention trace to " + path.string());
}

AttentionTrace read_attention(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read attention trace from " + path.string());
  return AttentionTrace::from_json(json::parse(in));
}

}  // namespace sfar
