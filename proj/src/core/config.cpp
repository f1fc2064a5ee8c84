#include "core/config.hpp"

#include <json.hpp>

#include "core/error.hpp"
#include "core/version.hpp"

namespace mmt {

using nlohmann::json;

std::string to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::baseline: return "baseline";
    case TrainMode::grapheme_ctc: return "grapheme_ctc";
    case TrainMode::biam_no_cd: return "biam_no_cd";
    case TrainMode::biam_full: return "biam_full";
  }
  throw_usage("unknown train mode value");
}

TrainMode train_mode_from_string(const std::string& s) {
  if (s == "baseline") return TrainMode::baseline;
  if (s == "grapheme_ctc") return TrainMode::grapheme_ctc;
  if (s == "biam_no_cd") return TrainMode::biam_no_cd;
  if (s == "biam_full") return TrainMode::biam_full;
  throw_usage("train.mode must be one of baseline, grapheme_ctc, biam_no_cd, biam_full; got '" +
              s + "'");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw_usage("train: epochs must be >= 1");
  if (!(cd_start_fraction >= 0.0 && cd_start_fraction <= 1.0))
    throw_usage("train: cd_start_fraction must lie in [0, 1]");
  if (!(lr_paired > 0.0) || !(lr_finetune > 0.0))
    throw_usage("train: learning rates must be positive");
  if (pretrain_epochs < 1 || finetune_epochs < 1)
    throw_usage("train: stage epoch counts must be >= 1");
  if (batch_size < 1) throw_usage("train: batch_size must be >= 1");
  weights.validate();
  if (!(mask_rate > 0.0 && mask_rate <= 1.0)) throw_usage("train: mask_rate must lie in (0, 1]");
  if (!(sampler_speech_prob >= 0.0 && sampler_speech_prob <= 1.0))
    throw_usage("train: sampler_speech_prob must lie in [0, 1]");
  if (replication < 1) throw_usage("train: replication must be >= 1");
  if (!(heldout_fraction >= 0.0 && heldout_fraction < 1.0))
    throw_usage("train: heldout_fraction must lie in [0, 1)");
  if (!(monotonicity_band > 0.0 && monotonicity_band < 1.0))
    throw_usage("train: monotonicity_band must lie in (0, 1)");
}

void RunConfig::validate() const {
  data.validate();
  model.validate();
  train.validate();
  if (data.feat_dim != model.feat_dim)
    throw_usage("config: data.feat_dim and model.feat_dim must agree");
  if (data.vocab != model.vocab) throw_usage("config: data.vocab and model.vocab must agree");
}

namespace {

// One uniform accessor per key keeps load, override, and dump in sync.
template <class T>
void get_to(const json& j, T& out, const std::string& key) {
  try {
    j.get_to(out);
  } catch (const json::exception&) {
    throw_usage("config: bad value for '" + key + "'");
  }
}

void apply_section(RunConfig& cfg, const std::string& section, const std::string& key,
                   const json& value) {
  const std::string dotted = section + "." + key;
  if (section == "data") {
    auto& d = cfg.data;
    if (key == "vocab") return get_to(value, d.vocab, dotted);
    if (key == "len_min") return get_to(value, d.len_min, dotted);
    if (key == "len_max") return get_to(value, d.len_max, dotted);
    if (key == "dur_min") return get_to(value, d.dur_min, dotted);
    if (key == "dur_max") return get_to(value, d.dur_max, dotted);
    if (key == "feat_dim") return get_to(value, d.feat_dim, dotted);
    if (key == "noise_sigma") return get_to(value, d.noise_sigma, dotted);
    if (key == "proto_scale") return get_to(value, d.proto_scale, dotted);
    if (key == "corpus_size") return get_to(value, d.corpus_size, dotted);
    if (key == "unpaired_size") return get_to(value, d.unpaired_size, dotted);
    if (key == "seed") return get_to(value, d.seed, dotted);
  } else if (section == "model") {
    auto& m = cfg.model;
    if (key == "feat_dim") return get_to(value, m.feat_dim, dotted);
    if (key == "dim") return get_to(value, m.dim, dotted);
    if (key == "vocab") return get_to(value, m.vocab, dotted);
    if (key == "lower_layers") return get_to(value, m.lower_layers, dotted);
    if (key == "upper_layers") return get_to(value, m.upper_layers, dotted);
    if (key == "text_layers") return get_to(value, m.text_layers, dotted);
    if (key == "dropout") return get_to(value, m.dropout, dotted);
    if (key == "positional_speech") return get_to(value, m.positional_speech, dotted);
    if (key == "positional_text") return get_to(value, m.positional_text, dotted);
    if (key == "init_gain") return get_to(value, m.init_gain, dotted);
  } else if (section == "train") {
    auto& t = cfg.train;
    if (key == "mode") {
      std::string s;
      get_to(value, s, dotted);
      t.mode = train_mode_from_string(s);
      return;
    }
    if (key == "epochs") return get_to(value, t.epochs, dotted);
    if (key == "cd_start_fraction") return get_to(value, t.cd_start_fraction, dotted);
    if (key == "lr_paired") return get_to(value, t.lr_paired, dotted);
    if (key == "lr_finetune") return get_to(value, t.lr_finetune, dotted);
    if (key == "pretrain_epochs") return get_to(value, t.pretrain_epochs, dotted);
    if (key == "finetune_epochs") return get_to(value, t.finetune_epochs, dotted);
    if (key == "batch_size") return get_to(value, t.batch_size, dotted);
    if (key == "alpha") return get_to(value, t.weights.alpha, dotted);
    if (key == "lambda") return get_to(value, t.weights.lambda, dotted);
    if (key == "mask_rate") return get_to(value, t.mask_rate, dotted);
    if (key == "sampler_speech_prob") return get_to(value, t.sampler_speech_prob, dotted);
    if (key == "replication") return get_to(value, t.replication, dotted);
    if (key == "replication_random") return get_to(value, t.replication_random, dotted);
    if (key == "cd_stop_grad_x") return get_to(value, t.cd_stop_grad_x, dotted);
    if (key == "pretrain_unfreeze_upper") return get_to(value, t.pretrain_unfreeze_upper, dotted);
    if (key == "heldout_fraction") return get_to(value, t.heldout_fraction, dotted);
    if (key == "monotonicity_band") return get_to(value, t.monotonicity_band, dotted);
    if (key == "seed") return get_to(value, t.seed, dotted);
  }
  throw_usage("config: unknown key '" + dotted + "'");
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  RunConfig cfg;
  cfg.merge_json_text(text);
  return cfg;
}

void RunConfig::merge_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw_usage(std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw_usage("config: document must be a JSON object");
  for (const auto& [section, body] : doc.items()) {
    if (section == "version") continue;  // echoed configs carry the library version
    if (section != "data" && section != "model" && section != "train")
      throw_usage("config: unknown section '" + section + "'");
    if (!body.is_object()) throw_usage("config: section '" + section + "' must be an object");
    for (const auto& [key, value] : body.items()) apply_section(*this, section, key, value);
  }
}

void RunConfig::apply_override(const std::string& dotted_key, const std::string& value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == dotted_key.size())
    throw_usage("config: override key must look like section.key, got '" + dotted_key + "'");
  json parsed;
  try {
    parsed = json::parse(value);
    if (parsed.is_object() || parsed.is_array())
      throw_usage("config: override values must be scalars");
  } catch (const json::exception&) {
    parsed = value;  // bare words are strings (e.g. mode names)
  }
  apply_section(*this, dotted_key.substr(0, dot), dotted_key.substr(dot + 1), parsed);
}

std::string RunConfig::to_json(bool pretty) const {
  json doc;
  doc["version"] = kVersion;
  json& d = doc["data"];
  d["vocab"] = data.vocab;
  d["len_min"] = data.len_min;
  d["len_max"] = data.len_max;
  d["dur_min"] = data.dur_min;
  d["dur_max"] = data.dur_max;
  d["feat_dim"] = data.feat_dim;
  d["noise_sigma"] = data.noise_sigma;
  d["proto_scale"] = data.proto_scale;
  d["corpus_size"] = data.corpus_size;
  d["unpaired_size"] = data.unpaired_size;
  d["seed"] = data.seed;
  json& m = doc["model"];
  m["feat_dim"] = model.feat_dim;
  m["dim"] = model.dim;
  m["vocab"] = model.vocab;
  m["lower_layers"] = model.lower_layers;
  m["upper_layers"] = model.upper_layers;
  m["text_layers"] = model.text_layers;
  m["dropout"] = model.dropout;
  m["positional_speech"] = model.positional_speech;
  m["positional_text"] = model.positional_text;
  m["init_gain"] = model.init_gain;
  json& t = doc["train"];
  t["mode"] = to_string(train.mode);
  t["epochs"] = train.epochs;
  t["cd_start_fraction"] = train.cd_start_fraction;
  t["lr_paired"] = train.lr_paired;
  t["lr_finetune"] = train.lr_finetune;
  t["pretrain_epochs"] = train.pretrain_epochs;
  t["finetune_epochs"] = train.finetune_epochs;
  t["batch_size"] = train.batch_size;
  t["alpha"] = train.weights.alpha;
  t["lambda"] = train.weights.lambda;
  t["mask_rate"] = train.mask_rate;
  t["sampler_speech_prob"] = train.sampler_speech_prob;
  t["replication"] = train.replication;
  t["replication_random"] = train.replication_random;
  t["cd_stop_grad_x"] = train.cd_stop_grad_x;
  t["pretrain_unfreeze_upper"] = train.pretrain_unfreeze_upper;
  t["heldout_fraction"] = train.heldout_fraction;
  t["monotonicity_band"] = train.monotonicity_band;
  t["seed"] = train.seed;
  return pretty ? doc.dump(2) + "\n" : doc.dump();
}

std::uint64_t RunConfig::hash() const {
  const std::string text = to_json(false);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace mmt
