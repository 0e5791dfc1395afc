// Copyright 2026 The sfar Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfar/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sfar/error.hpp"

namespace sfar {

using nlohmann::json;

namespace {

constexpr char kMagicPrefix[] = "SFAR";
static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

void append_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t read_u64(const std::string& in, std::size_t pos) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

void append_floats(std::string& out, const std::vector<double>& values) {
  for (double d : values) {
    const float f = static_cast<float>(d);
    char buf[4];
    std::memcpy(buf, &f, 4);
    out.append(buf, 4);
  }
}

struct TensorEntry {
  std::string name;
  Shape shape;
  const std::vector<double>* data;
};

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  std::vector<TensorEntry> tensors;
  for (const auto& p : ckpt.params) tensors.push_back({p.name, p.shape, &p.value});
  json optimizer = nullptr;
  if (ckpt.optimizer) {
    const auto& o = *ckpt.optimizer;
    if (o.m.size() != ckpt.params.size() || o.v.size() != ckpt.params.size())
      throw CheckpointError("optimizer state does not match the parameter set");
    std::size_t i = 0;
    for (const auto& p : ckpt.params) {
      tensors.push_back({"adam.m/" + p.name, p.shape, &o.m[i]});
      tensors.push_back({"adam.v/" + p.name, p.shape, &o.v[i]});
      ++i;
    }
    optimizer = {{"step", o.step},
                 {"learning_rate", o.config.learning_rate},
                 {"beta1", o.config.beta1},
                 {"beta2", o.config.beta2},
                 {"epsilon", o.config.epsilon}};
  }

  json directory = json::array();
  std::uint64_t offset = 0;
  for (const auto& t : tensors) {
    if (t.data->size() != t.shape.size())
      throw CheckpointError("tensor '" + t.name + "' holds " + std::to_string(t.data->size()) +
                            " values but its shape is " + to_string(t.shape));
    directory.push_back({{"name", t.name}, {"shape", {t.shape.rows, t.shape.cols}}, {"offset", offset}});
    offset += 4 * t.shape.size();
  }
  const json meta = {{"format_version", kCheckpointVersion},
                     {"kind", ckpt.kind},
                     {"config", ckpt.config},
                     {"vocab", ckpt.vocab.words()},
                     {"tensors", directory},
                     {"optimizer", optimizer},
                     {"metrics", ckpt.metrics},
                     {"persona_pool", ckpt.persona_pool}};
  const std::string meta_text = meta.dump();

  std::string out = std::string(kMagicPrefix) + std::to_string(kCheckpointVersion);
  append_u64(out, meta_text.size());
  out += meta_text;
  out.reserve(out.size() + offset);
  for (const auto& t : tensors) append_floats(out, *t.data);
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  if (bytes.size() < 5 || bytes.compare(0, 4, kMagicPrefix) != 0)
    throw CheckpointError("not a checkpoint file (wrong magic header)");
  if (bytes[4] != static_cast<char>('0' + kCheckpointVersion))
    throw CheckpointError(std::string("unsupported checkpoint format version '") + bytes[4] + "' (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  if (bytes.size() < 13) throw CheckpointError("truncated checkpoint: missing metadata length");
  const std::uint64_t meta_len = read_u64(bytes, 5);
  if (meta_len > bytes.size() - 13) throw CheckpointError("truncated checkpoint: metadata block is incomplete");
  json meta;
  try {
    meta = json::parse(bytes.substr(13, meta_len));
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint metadata: ") + e.what());
  }
  if (meta.value("format_version", -1) != kCheckpointVersion)
    throw CheckpointError("checkpoint metadata version mismatch");

  const std::size_t data_start = 13 + meta_len;
  Checkpoint ck;
  try {
    ck.kind = meta.at("kind").get<std::string>();
    ck.config = meta.at("config");
    auto words = meta.at("vocab").get<std::vector<std::string>>();
    if (words.size() < static_cast<std::size_t>(kReservedCount)) throw CheckpointError("vocabulary lacks reserved ids");
    for (int i = 0; i < kReservedCount; ++i)
      if (!is_reserved_token(words[static_cast<std::size_t>(i)]))
        throw CheckpointError("vocabulary reserved ids are out of place");
    ck.vocab = Vocabulary(std::vector<std::string>(words.begin() + kReservedCount, words.end()));
    ck.metrics = meta.at("metrics");
    ck.persona_pool = meta.at("persona_pool").get<std::vector<std::vector<std::string>>>();

    std::vector<std::pair<std::string, std::vector<double>>> moments;
    for (const auto& entry : meta.at("tensors")) {
      const auto name = entry.at("name").get<std::string>();
      const Shape shape{entry.at("shape").at(0).get<std::size_t>(), entry.at("shape").at(1).get<std::size_t>()};
      const auto offset = entry.at("offset").get<std::uint64_t>();
      const std::uint64_t len = 4 * shape.size();
      if (offset > bytes.size() - data_start || len > bytes.size() - data_start - offset)
        throw CheckpointError("truncated checkpoint: tensor '" + name + "' extends past the end of the file");
      std::vector<double> values(shape.size());
      const char* src = bytes.data() + data_start + offset;
      for (std::size_t i = 0; i < values.size(); ++i) {
        float f;
        std::memcpy(&f, src + 4 * i, 4);
        values[i] = f;
      }
      if (name.rfind("adam.", 0) == 0) {
        moments.emplace_back(name, std::move(values));
      } else {
        ParamId id = ck.params.add(name, shape);
        ck.params[id].value = std::move(values);
      }
    }
    const json& opt = meta.at("optimizer");
    if (!opt.is_null()) {
      OptimizerState st;
      st.config.learning_rate = opt.at("learning_rate").get<double>();
      st.config.beta1 = opt.at("beta1").get<double>();
      st.config.beta2 = opt.at("beta2").get<double>();
      st.config.epsilon = opt.at("epsilon").get<double>();
      st.step = opt.at("step").get<std::uint64_t>();
      st.m.resize(ck.params.size());
      st.v.resize(ck.params.size());
      for (auto& [name, values] : moments) {
        const bool is_m = name.rfind("adam.m/", 0) == 0;
        ParamId id = ck.params.require(name.substr(7));
        (is_m ? st.m : st.v)[id.index] = std::move(values);
      }
      for (std::size_t i = 0; i < ck.params.size(); ++i)
        if (st.m[i].size() != ck.params[ParamId{i}].value.size() || st.v[i].size() != st.m[i].size())
          throw CheckpointError("optimizer moments missing for '" + ck.params[ParamId{i}].name + "'");
      ck.optimizer = std::move(st);
    }
    if (bytes.size() != data_start + 4 * (ck.params.scalar_count() * (ck.optimizer ? 3 : 1)))
      throw CheckpointError("checkpoint size does not match its tensor directory");
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint metadata: ") + e.what());
  } catch (const CheckpointError&) {
    throw;
  } catch (const Error& e) {
    throw CheckpointError(std::string("corrupt checkpoint: ") + e.what());
  }
  return ck;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_checkpoint(ss.str());
}

Checkpoint make_checkpoint(const SketchModel& model, Variant variant, const Vocabulary& vocab) {
  if (vocab.size() != model.config().vocab_size) throw Error("vocabulary does not match the model");
  Checkpoint ck;
  ck.kind = "sketch";
  ck.config = {{"model", model.config().to_json()}, {"variant", to_string(variant)}};
  ck.vocab = vocab;
  ck.params = model.params();
  return ck;
}

LoadedModel model_from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.kind != "sketch") throw CheckpointError("checkpoint holds a '" + ckpt.kind + "', not a sketch model");
  try {
    LoadedModel out;
    out.variant = parse_variant(ckpt.config.at("variant").get<std::string>());
    out.model = SketchModel(ModelConfig::from_json(ckpt.config.at("model")), ckpt.params);
    out.vocab = ckpt.vocab;
    if (out.vocab.size() != out.model.config().vocab_size)
      throw CheckpointError("checkpoint vocabulary does not match the model configuration");
    return out;
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("invalid model configuration: ") + e.what());
  }
}

Checkpoint make_checkpoint(const RecurrentLm& lm, const Vocabulary& vocab) {
  if (vocab.size() != lm.config().vocab_size) throw Error("vocabulary does not match the language model");
  Checkpoint ck;
  ck.kind = "lm";
  ck.config = {{"lm", lm.config().to_json()}};
  ck.vocab = vocab;
  ck.params = lm.params();
  return ck;
}

RecurrentLm lm_from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.kind != "lm") throw CheckpointError("checkpoint holds a '" + ckpt.kind + "', not a language model");
  try {
    return RecurrentLm(LmConfig::from_json(ckpt.config.at("lm")), ckpt.params);
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("invalid language model configuration: ") + e.what());
  }
}

}  // namespace sfar
