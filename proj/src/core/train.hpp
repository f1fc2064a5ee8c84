#pragma once

#include <functional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/data.hpp"
#include "core/losses.hpp"
#include "core/params.hpp"

namespace mmt {

bool mode_uses_biam(TrainMode m);
bool mode_allows_cd(TrainMode m);

struct Checkpoint {
  ModelParams params;
  std::size_t epoch = 0;           // cumulative epochs across stages
  std::uint64_t rng_state = 0;     // seed stream of the stage that produced it
  std::uint64_t config_hash = 0;
  bool operator==(const Checkpoint&) const = default;
};

// Self-describing JSON; doubles round trip exactly, so save/load resumes
// bit-identically.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

struct EpochMetrics {
  std::size_t epoch = 0;
  LossBreakdown train_loss;   // mean over training utterances
  double monotonicity = 0.0;  // held-out mean, w12 band mass
  double cer = 0.0;           // held-out character error rate
};

void write_metrics_csv(const std::vector<EpochMetrics>& history, const std::string& path);

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<EpochMetrics> history;
  std::size_t skipped = 0;  // CTC-unreachable utterances excluded from training
};

// Test hook: called with the parameters at the end of every epoch.
using EpochObserver = std::function<void(std::size_t epoch, const ModelParams& params)>;

struct CorpusSplit {
  std::vector<const Utterance*> train;
  std::vector<const Utterance*> heldout;  // trailing fraction by index, never trained on
};
CorpusSplit split_corpus(const std::vector<Utterance>& corpus, double heldout_fraction);

// Deterministic context of one paired forward/backward: the mask plan and
// sampler coin are drawn by the caller so the step itself is a pure
// function of (params, utterance, context).
struct StepContext {
  MaskPlan plan;
  bool pick_speech = true;
  bool cd_enabled = false;
  bool training = false;
};

// One utterance of the multi-modal objective, all loss terms and their
// exact gradients. grads == nullptr skips the backward pass; dropout_rng
// is consumed only in training mode.
LossBreakdown paired_step(const ModelParams& p, const Utterance& utt, const RunConfig& cfg,
                          const StepContext& ctx, RngState* dropout_rng, ModelParams* grads);

// Stage 1: joint training on paired data, cosine distance joining at
// epoch >= cd_start_fraction * epochs.
TrainResult train_paired(const std::vector<Utterance>& corpus, const RunConfig& cfg,
                         const EpochObserver& observer = {});

// Stage 2: unpaired text. Text embeddings are replicated per row and fed
// into the upper speech stack; only decoder parameters are updated (plus
// the upper stack behind a config flag), everything else stays bit-exact.
TrainResult pretrain_unpaired(const std::vector<std::vector<int>>& texts, const Checkpoint& start,
                              const RunConfig& cfg);

// Stage 3: the paired loop again at the fine-tune learning rate.
TrainResult finetune_paired(const std::vector<Utterance>& corpus, const Checkpoint& start,
                            const RunConfig& cfg, const EpochObserver& observer = {});

struct EvalResult {
  double cer = 0.0;
  double monotonicity = 0.0;
  LossBreakdown mean_loss;
};

EvalResult evaluate(const std::vector<const Utterance*>& utts, const ModelParams& p,
                    const RunConfig& cfg);
EvalResult evaluate(const std::vector<Utterance>& utts, const ModelParams& p,
                    const RunConfig& cfg);

std::size_t levenshtein(const std::vector<int>& a, const std::vector<int>& b);

Matrix replicate_rows(const Matrix& m, std::size_t copies);
Matrix replicate_rows(const Matrix& m, const std::vector<std::size_t>& counts);

// Writes config.json (effective config echo), metrics.csv, checkpoint.json
// and a small run.json summary into `dir`, creating it first.
void write_run_dir(const std::string& dir, const RunConfig& cfg,
                   const std::vector<EpochMetrics>& history, const Checkpoint* ckpt,
                   std::size_t skipped = 0);

}  // namespace mmt
