// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>

#include "sfar/error.hpp"
#include "sfar/trainer.hpp"
#include "support.hpp"

using namespace sfar;

namespace {

struct Data {
  Vocabulary vocab;
  std::vector<EncodedExample> encoded;
  TrainConfig config;
  Data() {
    const auto exs = sfar::testing::toy_examples();
    vocab = build_vocabulary(exs);
    config.hidden_dim = 8;
    config.emb_dim = 8;
    config.batch_size = 2;
    config.learning_rate = 0.01;
    config.dropout = 0.1;
    config.max_epochs = 3;
    config.seed = 4;
    SketchModel probe(config.model_config(vocab.size()), 0);
    for (const auto& ex : exs) encoded.push_back(probe.encode(ex, vocab));
  }
};

}  // namespace

TEST_CASE("model config follows the variant") {
  TrainConfig c;
  c.variant = Variant::sf_r;
  CHECK(c.model_config(50).attention == AttentionMode::none);
  c.variant = Variant::sf_a;
  CHECK(c.model_config(50).attention == AttentionMode::full);
  CHECK(c.model_config(50).vocab_size == 50);
  CHECK(c.to_json()["variant"] == "SF-A");
}

TEST_CASE("batch loss and gradients are sums over examples") {
  Data d;
  SketchModel m(d.config.model_config(d.vocab.size()), 1);
  GradBuffer batch_grads(m.params());
  auto lb = compute_loss(m, d.encoded, DropoutSpec::off(), &batch_grads, Precision::f64);
  CHECK(lb.examples == 4);

  GradBuffer sum_grads(m.params());
  double total = 0.0;
  std::size_t tokens = 0;
  for (const auto& ex : d.encoded) {
    Graph g(m.params(), &sum_grads, Precision::f64);
    auto l = m.teacher_forced_loss(g, ex, DropoutSpec::off());
    total += l.total.item();
    tokens += l.tokens;
    g.backward(l.total);
  }
  CHECK(lb.total == doctest::Approx(total).epsilon(1e-12));
  CHECK(lb.tokens == tokens);
  for (std::size_t p = 0; p < m.params().size(); ++p)
    for (std::size_t k = 0; k < m.params()[ParamId{p}].value.size(); ++k)
      CHECK(batch_grads[ParamId{p}][k] == doctest::Approx(sum_grads[ParamId{p}][k]).epsilon(1e-10));
  CHECK_THROWS_AS(compute_loss(m, {}, DropoutSpec::off()), Error);
}

TEST_CASE("sketch perplexity ignores pointer terms") {
  Data d;
  SketchModel m(d.config.model_config(d.vocab.size()), 2);
  double nll = 0.0;
  std::size_t tokens = 0;
  for (const auto& ex : d.encoded) {
    Graph g(m.params());
    auto l = m.teacher_forced_loss(g, ex, DropoutSpec::off(), false);
    nll += l.nll.item();
    tokens += ex.sketch.size() + 1;
  }
  auto sp = sketch_perplexity(m, d.encoded);
  CHECK(sp.tokens == tokens);
  CHECK(sp.ppl() == doctest::Approx(std::exp(nll / static_cast<double>(tokens))).epsilon(1e-9));
}

TEST_CASE("training is deterministic and keeps the best epoch") {
  Data d;
  const auto metrics = sfar::testing::temp_path("metrics.jsonl");
  TrainHooks hooks;
  std::size_t calls = 0;
  hooks.on_epoch = [&](const EpochMetrics&) { ++calls; };
  hooks.metrics_path = metrics;
  auto a = train(d.encoded, d.encoded, d.vocab.size(), d.config, hooks);
  auto b = train(d.encoded, d.encoded, d.vocab.size(), d.config);
  CHECK(a.step_losses == b.step_losses);
  CHECK(a.steps == 6);
  CHECK(a.optimizer.step == 6);
  CHECK(calls == 3);
  REQUIRE(a.history.size() == 3);

  double best = std::numeric_limits<double>::infinity();
  for (const auto& h : a.history) best = std::min(best, h.val_ppl);
  CHECK(a.best_val_ppl == best);
  CHECK(a.history[a.best_epoch - 1].val_ppl == best);
  CHECK(sketch_perplexity(a.model, d.encoded).ppl() == doctest::Approx(best).epsilon(1e-12));

  std::ifstream in(metrics);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK(j.contains("train_ppl"));
    CHECK(j.contains("wall_time"));
    CHECK(j["epoch"] == ++lines);
  }
  CHECK(lines == 3);
}

TEST_CASE("training lowers validation perplexity") {
  Data d;
  d.config.max_epochs = 20;
  d.config.dropout = 0.0;
  d.config.learning_rate = 0.02;
  SketchModel fresh(d.config.model_config(d.vocab.size()), d.config.seed);
  const double before = sketch_perplexity(fresh, d.encoded).ppl();
  auto r = train(d.encoded, d.encoded, d.vocab.size(), d.config);
  CHECK(r.best_val_ppl < before / 3);
}

TEST_CASE("max_steps and patience stop early") {
  Data d;
  d.config.max_epochs = 50;
  d.config.max_steps = 3;
  auto r = train(d.encoded, d.encoded, d.vocab.size(), d.config);
  CHECK(r.steps == 3);
  CHECK(r.history.size() == 2);

  d.config.max_steps = 0;
  d.config.learning_rate = 0.0;
  d.config.dropout = 0.0;
  d.config.patience = 2;
  auto flat = train(d.encoded, d.encoded, d.vocab.size(), d.config);
  CHECK(flat.history.size() == 3);
  CHECK(flat.best_epoch == 1);
}

TEST_CASE("resume starts from the given weights and optimizer") {
  Data d;
  d.config.max_epochs = 1;
  auto first = train(d.encoded, d.encoded, d.vocab.size(), d.config);
  TrainHooks hooks;
  hooks.initial = &first.model;
  hooks.initial_optimizer = &first.optimizer;
  auto second = train(d.encoded, d.encoded, d.vocab.size(), d.config, hooks);
  CHECK(second.optimizer.step == first.optimizer.step + 2);
}

TEST_CASE("divergence names the step") {
  Data d;
  d.config.learning_rate = std::numeric_limits<double>::quiet_NaN();
  try {
    train(d.encoded, d.encoded, d.vocab.size(), d.config);
    FAIL("expected divergence");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("training diverged at step 1") != std::string::npos);
  }
  d.config.learning_rate = 0.01;
  CHECK_THROWS_AS(train({}, d.encoded, d.vocab.size(), d.config), Error);
  CHECK_THROWS_AS(train(d.encoded, {}, d.vocab.size(), d.config), Error);
}
