// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0
//
// sfar: command-line entry point.

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <set>

#include "sfar/chat_service.hpp"
#include "sfar/checkpoint.hpp"
#include "sfar/dataset.hpp"
#include "sfar/error.hpp"
#include "sfar/eval.hpp"
#include "sfar/http_server.hpp"
#include "sfar/inference.hpp"
#include "sfar/synthetic.hpp"
#include "sfar/trainer.hpp"

using namespace sfar;
using nlohmann::json;

namespace {

std::vector<std::vector<std::string>> persona_pool(const std::vector<DialogueRecord>& records) {
  std::set<std::vector<std::string>> seen;
  std::vector<std::vector<std::string>> pool;
  for (const auto& r : records)
    if (!r.personas.empty() && seen.insert(r.personas).second) pool.push_back(r.personas);
  return pool;
}

std::vector<EncodedExample> encode_all(const SketchModel& model, const std::vector<DialogueExample>& examples,
                                       const Vocabulary& vocab) {
  std::vector<EncodedExample> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back(model.encode(ex, vocab));
  return out;
}

std::unique_ptr<RecurrentLm> maybe_lm(const std::string& path) {
  if (path.empty()) return nullptr;
  return std::make_unique<RecurrentLm>(lm_from_checkpoint(load_checkpoint(path)));
}

GenerationConfig generation_config(std::size_t beam, std::size_t max_length, std::size_t cap,
                                   const std::string& fill, Variant variant, bool block_repeats) {
  GenerationConfig g;
  g.beam_size = beam;
  g.max_length = max_length;
  g.candidate_cap = std::max(cap, beam);
  g.fill = fill.empty() ? (uses_rerank(variant) ? FillMode::rerank : FillMode::pointer) : parse_fill_mode(fill);
  g.block_repeats = block_repeats;
  return g;
}

// ----------------------------------------------------------------- preprocess

struct PreprocessArgs {
  std::string data, format = "jsonl", out, vocab;
  std::size_t min_count = 1;
};

int run_preprocess(const PreprocessArgs& a) {
  const auto records = load_records(a.data, parse_dataset_format(a.format));
  const auto examples = to_examples(records);
  if (!a.out.empty()) {
    std::ofstream out(a.out);
    if (!out) throw Error("cannot write " + a.out);
    write_jsonl_records(out, records);
  }
  if (!a.vocab.empty()) build_vocabulary(examples, a.min_count).save(a.vocab);
  const SketchStats st = sketch_stats(examples);
  std::cout << json{{"examples", examples.size()},
                    {"response_tokens", st.response_tokens},
                    {"slot_tokens", st.slot_tokens},
                    {"slot_fraction", st.fraction()}}
                   .dump()
            << '\n';
  return 0;
}

// ---------------------------------------------------------------------- train

struct TrainArgs {
  std::string train, val, format = "jsonl", out, vocab, embeddings, metrics, resume, variant = "SF-A-R";
  std::size_t min_count = 1;
  TrainConfig config;
};

int run_train(TrainArgs a) {
  const auto fmt = parse_dataset_format(a.format);
  const auto train_records = load_records(a.train, fmt);
  const auto train_examples = to_examples(train_records);
  const auto val_examples = load_dataset(a.val, fmt);
  a.config.variant = parse_variant(a.variant);

  std::optional<Checkpoint> resume;
  Vocabulary vocab;
  if (!a.resume.empty()) {
    resume = load_checkpoint(a.resume);
    vocab = resume->vocab;
  } else {
    vocab = a.vocab.empty() ? build_vocabulary(train_examples, a.min_count) : Vocabulary::load(a.vocab);
  }

  std::optional<LoadedModel> initial;
  TrainHooks hooks;
  if (resume) {
    initial = model_from_checkpoint(*resume);
    hooks.initial = &initial->model;
    if (resume->optimizer) hooks.initial_optimizer = &*resume->optimizer;
  } else if (!a.embeddings.empty()) {
    initial = LoadedModel{SketchModel(a.config.model_config(vocab.size()), a.config.seed), a.config.variant, vocab};
    std::mt19937_64 rng(a.config.seed + 1);
    const auto cov = initial->model.load_pretrained(vocab, read_word_vectors(a.embeddings, a.config.emb_dim), rng);
    std::cerr << "pretrained vectors: " << cov.matched << " matched, " << cov.missing << " missing\n";
    hooks.initial = &initial->model;
  }
  if (!a.metrics.empty()) hooks.metrics_path = a.metrics;
  hooks.on_epoch = [](const EpochMetrics& m) { std::cerr << m.to_json().dump() << '\n'; };

  const SketchModel& shape_model = initial ? initial->model : SketchModel(a.config.model_config(vocab.size()), 0);
  const auto train_set = encode_all(shape_model, train_examples, vocab);
  const auto val_set = encode_all(shape_model, val_examples, vocab);
  std::cerr << "training " << to_string(a.config.variant) << " on " << train_set.size() << " examples, vocab "
            << vocab.size() << '\n';
  TrainResult r = train(train_set, val_set, vocab.size(), a.config, hooks);

  Checkpoint ck = make_checkpoint(r.model, a.config.variant, vocab);
  ck.config["train"] = a.config.to_json();
  ck.config["train_data"] = std::filesystem::absolute(a.train).string();
  ck.config["data_format"] = a.format;
  ck.optimizer = r.optimizer;
  for (const auto& m : r.history) ck.metrics.push_back(m.to_json());
  ck.persona_pool = persona_pool(train_records);
  save_checkpoint(ck, a.out);
  std::cout << json{{"best_val_ppl", r.best_val_ppl}, {"best_epoch", r.best_epoch}, {"steps", r.steps}}.dump()
            << '\n';
  return 0;
}

// ------------------------------------------------------------------- lm-train

struct LmArgs {
  std::string train, val, format = "jsonl", out, vocab_from;
  LmConfig config;
  LmTrainConfig train_config;
};

int run_lm_train(LmArgs a) {
  const auto fmt = parse_dataset_format(a.format);
  const auto train_examples = load_dataset(a.train, fmt);
  Vocabulary vocab;
  if (a.vocab_from.empty()) {
    vocab = build_vocabulary(train_examples);
  } else if (a.vocab_from.size() > 5 && a.vocab_from.substr(a.vocab_from.size() - 4) == ".txt") {
    vocab = Vocabulary::load(a.vocab_from);
  } else {
    vocab = load_checkpoint(a.vocab_from).vocab;
  }
  auto responses = [&](const std::vector<DialogueExample>& exs) {
    std::vector<TokenIds> out;
    for (const auto& e : exs)
      if (!e.response.empty()) out.push_back(vocab.encode(e.response));
    return out;
  };
  const auto train_seqs = responses(train_examples);
  const auto val_seqs = a.val.empty() ? std::vector<TokenIds>{} : responses(load_dataset(a.val, fmt));
  a.config.vocab_size = vocab.size();
  auto r = train_lm(train_seqs, val_seqs, a.config, a.train_config, [](const LmEpoch& e) {
    std::cerr << json{{"epoch", e.epoch}, {"train_ppl", e.train_ppl}, {"val_ppl", e.val_ppl}, {"wall_time", e.seconds}}
                     .dump()
              << '\n';
  });
  Checkpoint ck = make_checkpoint(r.lm, vocab);
  for (const auto& e : r.history)
    ck.metrics.push_back({{"epoch", e.epoch}, {"train_ppl", e.train_ppl}, {"val_ppl", e.val_ppl}});
  save_checkpoint(ck, a.out);
  std::cout << json{{"best_val_ppl", r.best_val_ppl}}.dump() << '\n';
  return 0;
}

// ------------------------------------------------------------------- evaluate

struct EvalArgs {
  std::string checkpoint, data, format = "jsonl", train, lm, fill, json_out;
  std::size_t generate = 0, beam = 7, max_length = 32, cap = 50;
};

int run_evaluate(const EvalArgs& a) {
  const Checkpoint ck = load_checkpoint(a.checkpoint);
  const LoadedModel lm_model = model_from_checkpoint(ck);
  const auto fmt = parse_dataset_format(a.format);
  const auto examples = load_dataset(a.data, fmt);
  const auto encoded = encode_all(lm_model.model, examples, lm_model.vocab);
  json report;
  report["perplexity"] = corpus_perplexity(lm_model.model, encoded);
  report["examples"] = examples.size();

  std::string train_path = a.train;
  std::string train_format = a.format;
  if (train_path.empty() && ck.config.contains("train_data")) {
    train_path = ck.config["train_data"].get<std::string>();
    train_format = ck.config.value("data_format", std::string("jsonl"));
    if (!std::filesystem::exists(train_path)) train_path.clear();
  }
  const std::size_t n = a.generate ? std::min(a.generate, examples.size()) : examples.size();
  if (!train_path.empty() && n > 0) {
    const auto lm = maybe_lm(a.lm);
    const GenerationConfig g = generation_config(a.beam, a.max_length, a.cap, a.fill, lm_model.variant, false);
    if (g.fill == FillMode::rerank && !lm)
      throw Error("rerank generation needs --lm (or pass --fill pointer)");
    std::vector<Tokens> generated;
    for (std::size_t i = 0; i < n; ++i)
      generated.push_back(
          generate_response(lm_model.model, lm_model.vocab, lm.get(), examples[i].personas, examples[i].history, g)
              .tokens);
    std::vector<Tokens> training;
    for (const auto& e : load_dataset(train_path, parse_dataset_format(train_format))) training.push_back(e.response);
    const NoveltyReport nov = novelty_stats(generated, training);
    const CompositionReport comp = question_rate(generated);
    report["novelty"] = nov.to_json();
    report["composition"] = comp.to_json();
    std::cerr << nov.to_text() << comp.to_text();
  } else {
    report["novelty"] = nullptr;
    std::cerr << "novelty skipped: no training responses available (--train)\n";
  }
  std::cout << report.dump(2) << '\n';
  if (!a.json_out.empty()) {
    std::ofstream out(a.json_out);
    out << report.dump(2) << '\n';
  }
  return 0;
}

// ------------------------------------------------------------------- generate

struct GenerateArgs {
  std::string checkpoint, lm, fill, attention_out;
  std::size_t beam = 7, max_length = 32, cap = 50;
  bool debug = false, block_repeats = false;
};

int run_generate(const GenerateArgs& a) {
  const LoadedModel m = model_from_checkpoint(load_checkpoint(a.checkpoint));
  const auto lm = maybe_lm(a.lm);
  const GenerationConfig g = generation_config(a.beam, a.max_length, a.cap, a.fill, m.variant, a.block_repeats);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(std::cin, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json in;
    try {
      in = json::parse(line);
    } catch (const json::exception& e) {
      throw DatasetError(std::string("stdin is not a JSON context: ") + e.what(), line_no);
    }
    std::vector<PersonaTrait> personas;
    for (const auto& p : in.at("personas")) personas.push_back(make_trait(p.get<std::string>()));
    std::vector<Tokens> history;
    for (const auto& h : in.value("history", json::array())) history.push_back(tokenize(h.get<std::string>()));
    const GenerationResult r = generate_response(m.model, m.vocab, lm.get(), personas, history, g);
    if (a.debug)
      std::cout << json{{"reply", r.text}, {"debug", r.debug.to_json()}}.dump() << '\n';
    else
      std::cout << r.text << '\n';
    if (!a.attention_out.empty()) export_attention(r.debug.attention, a.attention_out);
  }
  return 0;
}

// ---------------------------------------------------------------------- serve

struct ServeArgs {
  std::string checkpoint, lm, fill, host = "127.0.0.1", static_dir, personas, personas_format = "jsonl",
                                    cors = "*";
  int port = 8080;
  std::size_t beam = 10, max_length = 32, cap = 50;
  std::uint64_t seed = 0;
};

HttpServer* g_server = nullptr;

int run_serve(const ServeArgs& a) {
  Checkpoint ck = load_checkpoint(a.checkpoint);
  LoadedModel m = model_from_checkpoint(ck);
  ServiceOptions opt;
  opt.generation = generation_config(a.beam, a.max_length, a.cap, a.fill, m.variant, false);
  if (!a.fill.empty()) opt.fill = parse_fill_mode(a.fill);
  opt.seed = a.seed;
  opt.checkpoint_name = std::filesystem::path(a.checkpoint).filename().string();
  auto pool = ck.persona_pool;
  if (!a.personas.empty()) pool = persona_pool(load_records(a.personas, parse_dataset_format(a.personas_format)));
  std::shared_ptr<const TokenLogProbModel> lm = maybe_lm(a.lm);
  ChatService service(opt);
  service.load(std::move(m), lm, std::move(pool));

  HttpOptions http;
  http.cors_origin = a.cors;
  if (!a.static_dir.empty()) http.static_dir = a.static_dir;
  HttpServer server(service, http);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::cerr << "serving on http://" << a.host << ':' << a.port << " (fill " << to_string(service.fill_mode())
            << ")\n";
  if (!server.listen(a.host, a.port)) throw Error("cannot listen on " + a.host + ":" + std::to_string(a.port));
  return 0;
}

// ---------------------------------------------------------------------- synth

int run_synth(std::size_t examples, std::uint64_t seed, const std::string& out_path) {
  const auto records = synthetic_dialogues(examples, seed);
  if (out_path.empty()) {
    write_jsonl_records(std::cout, records);
  } else {
    std::ofstream out(out_path);
    if (!out) throw Error("cannot write " + out_path);
    write_jsonl_records(out, records);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketch-and-fill persona chit-chat: training, evaluation, generation and serving"};
  app.require_subcommand(1);
  int status = 0;

  PreprocessArgs pre;
  auto* c_pre = app.add_subcommand("preprocess", "Convert a dataset to JSONL and build a vocabulary");
  c_pre->add_option("--data", pre.data, "Input dataset")->required()->check(CLI::ExistingFile);
  c_pre->add_option("--format", pre.format, "jsonl or parlai")->capture_default_str();
  c_pre->add_option("--out", pre.out, "Output JSONL path");
  c_pre->add_option("--vocab", pre.vocab, "Output vocabulary path");
  c_pre->add_option("--min-count", pre.min_count, "Minimum word count")->capture_default_str();
  c_pre->callback([&] { status = run_preprocess(pre); });

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "Train a sketch model");
  c_train->add_option("--train", tr.train, "Training dataset")->required()->check(CLI::ExistingFile);
  c_train->add_option("--val", tr.val, "Validation dataset")->required()->check(CLI::ExistingFile);
  c_train->add_option("--format", tr.format, "jsonl or parlai")->capture_default_str();
  c_train->add_option("--out", tr.out, "Output checkpoint")->required();
  c_train->add_option("--variant", tr.variant, "SF, SF-A, SF-R or SF-A-R")->capture_default_str();
  c_train->add_option("--vocab", tr.vocab, "Vocabulary file (default: built from --train)");
  c_train->add_option("--min-count", tr.min_count)->capture_default_str();
  c_train->add_option("--embeddings", tr.embeddings, "Pretrained word vectors (text format)");
  c_train->add_option("--metrics", tr.metrics, "Per-epoch metrics, JSON lines");
  c_train->add_option("--resume", tr.resume, "Continue from a checkpoint");
  c_train->add_option("--emb", tr.config.emb_dim)->capture_default_str();
  c_train->add_option("--hidden", tr.config.hidden_dim)->capture_default_str();
  c_train->add_option("--lr", tr.config.learning_rate)->capture_default_str();
  c_train->add_option("--batch", tr.config.batch_size)->capture_default_str();
  c_train->add_option("--dropout", tr.config.dropout)->capture_default_str();
  c_train->add_option("--epochs", tr.config.max_epochs)->capture_default_str();
  c_train->add_option("--patience", tr.config.patience)->capture_default_str();
  c_train->add_option("--max-steps", tr.config.max_steps)->capture_default_str();
  c_train->add_option("--seed", tr.config.seed)->capture_default_str();
  c_train->add_option("--lambda-global", tr.config.lambda_global)->capture_default_str();
  c_train->add_option("--lambda-local", tr.config.lambda_local)->capture_default_str();
  c_train->add_option("--clip", tr.config.clip_norm)->capture_default_str();
  c_train->add_option("--max-turns", tr.config.max_history_turns)->capture_default_str();
  c_train->add_flag("--pointer-per-step", tr.config.pointer_per_step, "Recompute pointer gates at every step");
  c_train->callback([&] { status = run_train(tr); });

  LmArgs lm;
  auto* c_lm = app.add_subcommand("lm-train", "Train the reranking language model on responses");
  c_lm->add_option("--train", lm.train, "Training dataset")->required()->check(CLI::ExistingFile);
  c_lm->add_option("--val", lm.val, "Validation dataset");
  c_lm->add_option("--format", lm.format)->capture_default_str();
  c_lm->add_option("--out", lm.out, "Output checkpoint")->required();
  c_lm->add_option("--vocab-from", lm.vocab_from, "Sketch checkpoint or vocabulary .txt to share");
  c_lm->add_option("--emb", lm.config.emb_dim)->capture_default_str();
  c_lm->add_option("--hidden", lm.config.hidden_dim)->capture_default_str();
  c_lm->add_option("--lr", lm.train_config.learning_rate)->capture_default_str();
  c_lm->add_option("--batch", lm.train_config.batch_size)->capture_default_str();
  c_lm->add_option("--epochs", lm.train_config.max_epochs)->capture_default_str();
  c_lm->add_option("--patience", lm.train_config.patience)->capture_default_str();
  c_lm->add_option("--max-steps", lm.train_config.max_steps)->capture_default_str();
  c_lm->add_option("--dropout", lm.train_config.dropout)->capture_default_str();
  c_lm->add_option("--seed", lm.train_config.seed)->capture_default_str();
  c_lm->callback([&] { status = run_lm_train(lm); });

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("evaluate", "Perplexity, novelty and question-rate reports");
  c_eval->add_option("--checkpoint", ev.checkpoint)->required()->check(CLI::ExistingFile);
  c_eval->add_option("--data", ev.data)->required()->check(CLI::ExistingFile);
  c_eval->add_option("--format", ev.format)->capture_default_str();
  c_eval->add_option("--train", ev.train, "Training responses for novelty (default: recorded in the checkpoint)");
  c_eval->add_option("--lm", ev.lm, "Language model checkpoint for rerank fill");
  c_eval->add_option("--fill", ev.fill, "rerank or pointer (default: from the variant)");
  c_eval->add_option("--generate", ev.generate, "Generate for the first N examples (0: all)");
  c_eval->add_option("--beam", ev.beam)->capture_default_str();
  c_eval->add_option("--max-length", ev.max_length)->capture_default_str();
  c_eval->add_option("--json", ev.json_out, "Also write the report here");
  c_eval->callback([&] { status = run_evaluate(ev); });

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand(
      "generate", "Reply to JSON contexts read from stdin, one per line: {\"personas\": [...], \"history\": [...]}");
  c_gen->add_option("--checkpoint", gen.checkpoint)->required()->check(CLI::ExistingFile);
  c_gen->add_option("--lm", gen.lm, "Language model checkpoint for rerank fill");
  c_gen->add_option("--fill", gen.fill, "rerank or pointer (default: from the variant)");
  c_gen->add_option("--beam", gen.beam)->capture_default_str();
  c_gen->add_option("--max-length", gen.max_length)->capture_default_str();
  c_gen->add_option("--candidates", gen.cap, "Candidate cap per beam")->capture_default_str();
  c_gen->add_option("--attention-out", gen.attention_out, "Write the attention trace of the last reply");
  c_gen->add_flag("--debug", gen.debug, "Print the generation record as JSON");
  c_gen->add_flag("--block-repeats", gen.block_repeats, "Forbid immediate token repeats");
  c_gen->callback([&] { status = run_generate(gen); });

  ServeArgs sv;
  auto* c_serve = app.add_subcommand("serve", "Start the HTTP chat service");
  c_serve->add_option("--checkpoint", sv.checkpoint)->required()->check(CLI::ExistingFile);
  c_serve->add_option("--lm", sv.lm, "Language model checkpoint for rerank fill");
  c_serve->add_option("--fill", sv.fill, "rerank or pointer (default: from the variant)");
  c_serve->add_option("--host", sv.host)->capture_default_str();
  c_serve->add_option("--port", sv.port)->capture_default_str();
  c_serve->add_option("--beam", sv.beam)->capture_default_str();
  c_serve->add_option("--max-length", sv.max_length)->capture_default_str();
  c_serve->add_option("--static", sv.static_dir, "Directory served at /");
  c_serve->add_option("--personas", sv.personas, "Dataset whose personas are sampled for new sessions");
  c_serve->add_option("--personas-format", sv.personas_format)->capture_default_str();
  c_serve->add_option("--cors-origin", sv.cors)->capture_default_str();
  c_serve->add_option("--seed", sv.seed)->capture_default_str();
  c_serve->callback([&] { status = run_serve(sv); });

  std::size_t synth_n = 1000;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  auto* c_synth = app.add_subcommand("synth", "Write synthetic persona dialogues as JSONL");
  c_synth->add_option("--examples", synth_n)->capture_default_str();
  c_synth->add_option("--seed", synth_seed)->capture_default_str();
  c_synth->add_option("--out", synth_out, "Output path (default: stdout)");
  c_synth->callback([&] { status = run_synth(synth_n, synth_seed, synth_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const DatasetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return status;
}
