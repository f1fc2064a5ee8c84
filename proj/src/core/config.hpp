#pragma once

#include <cstdint>
#include <string>

#include "core/data.hpp"
#include "core/losses.hpp"
#include "core/params.hpp"

namespace mmt {

enum class TrainMode { baseline, grapheme_ctc, biam_no_cd, biam_full };

std::string to_string(TrainMode mode);
TrainMode train_mode_from_string(const std::string& s);

struct TrainConfig {
  TrainMode mode = TrainMode::biam_full;
  std::size_t epochs = 80;
  double cd_start_fraction = 0.875;  // cosine loss joins at epoch >= fraction * epochs
  double lr_paired = 0.1;
  double lr_finetune = 0.05;  // half the joint-training rate
  std::size_t pretrain_epochs = 10;
  std::size_t finetune_epochs = 20;
  std::size_t batch_size = 8;
  LossWeights weights;
  double mask_rate = 0.2;
  double sampler_speech_prob = 0.5;
  std::size_t replication = 2;
  bool replication_random = false;  // 1..3 copies per row instead of a fixed count
  bool cd_stop_grad_x = false;      // only pull the text side toward the speech side
  bool pretrain_unfreeze_upper = false;
  double heldout_fraction = 0.1;
  double monotonicity_band = 0.1;
  std::uint64_t seed = 1;
  void validate() const;
};

// Whole-run configuration: data generation + model dimensions + training.
// JSON documents round trip through this struct with strict key checking,
// and every key can be overridden with a dotted "section.key=value" pair.
struct RunConfig {
  SynthConfig data;
  ModelConfig model;
  TrainConfig train;

  static RunConfig defaults() { return {}; }
  static RunConfig from_json_text(const std::string& text);
  void merge_json_text(const std::string& text);
  void apply_override(const std::string& dotted_key, const std::string& value);
  std::string to_json(bool pretty = false) const;
  std::uint64_t hash() const;  // FNV-1a of the compact JSON form
  void validate() const;
};

}  // namespace mmt
