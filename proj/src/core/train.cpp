#include "core/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "core/biam.hpp"
#include "core/ctc.hpp"
#include "core/encoders.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/version.hpp"

namespace mmt {

namespace {

// substream tags of the run seed
constexpr std::uint64_t kInitStream = 0x10;
constexpr std::uint64_t kPairedStage = 0x21;
constexpr std::uint64_t kPretrainStage = 0x22;
constexpr std::uint64_t kFinetuneStage = 0x23;
constexpr std::uint64_t kShuffleStream = 0x31;
constexpr std::uint64_t kUttStream = 0x32;
constexpr std::uint64_t kEvalStream = 0x33;

bool cd_enabled_at(const TrainConfig& t, std::size_t epoch, std::size_t epochs) {
  if (!mode_allows_cd(t.mode)) return false;
  return static_cast<double>(epoch) >=
         t.cd_start_fraction * static_cast<double>(epochs) - 1e-12;
}

bool ctc_reachable(const Utterance& utt) {
  return !utt.graphemes.empty() && utt.speech.rows >= ctc_min_frames(utt.graphemes);
}

std::vector<std::size_t> shuffled_order(std::size_t n, RngState rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(n) - 1));
    std::swap(order[i], order[j]);
  }
  return order;
}

void accumulate(LossBreakdown& sum, const LossBreakdown& lb) {
  sum.asr_ctc += lb.asr_ctc;
  sum.asr_attention += lb.asr_attention;
  sum.cd += lb.cd;
  sum.mlm += lb.mlm;
  sum.gctc += lb.gctc;
  sum.total += lb.total;
}

LossBreakdown divide(LossBreakdown sum, std::size_t n) {
  if (n == 0) return {};
  const double inv = 1.0 / static_cast<double>(n);
  sum.asr_ctc *= inv;
  sum.asr_attention *= inv;
  sum.cd *= inv;
  sum.mlm *= inv;
  sum.gctc *= inv;
  sum.total *= inv;
  return sum;
}

}  // namespace

bool mode_uses_biam(TrainMode m) {
  return m == TrainMode::biam_no_cd || m == TrainMode::biam_full;
}

bool mode_allows_cd(TrainMode m) { return m == TrainMode::biam_full; }

CorpusSplit split_corpus(const std::vector<Utterance>& corpus, double heldout_fraction) {
  if (!(heldout_fraction >= 0.0 && heldout_fraction < 1.0))
    throw_usage("split_corpus: heldout_fraction must lie in [0, 1)");
  const auto heldout =
      static_cast<std::size_t>(heldout_fraction * static_cast<double>(corpus.size()));
  CorpusSplit split;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (i + heldout < corpus.size())
      split.train.push_back(&corpus[i]);
    else
      split.heldout.push_back(&corpus[i]);
  }
  return split;
}

LossBreakdown paired_step(const ModelParams& p, const Utterance& utt, const RunConfig& cfg,
                          const StepContext& ctx, RngState* dropout_rng, ModelParams* grads) {
  const TrainConfig& tc = cfg.train;
  const bool use_biam = mode_uses_biam(tc.mode);
  RngState* rng = ctx.training ? dropout_rng : nullptr;

  LowerCache lower_cache;
  const Matrix x =
      encode_speech_lower(utt.speech, p, ctx.training, rng, grads ? &lower_cache : nullptr);

  TextCache text_cache;
  Matrix y;
  BiamOutput bi;
  double cd = 0.0, mlm = 0.0, gctc = 0.0;
  CosineGrads cd_grads;
  MlmResult mlm_res;
  GctcResult gctc_res;
  if (use_biam) {
    y = encode_text(apply_mask(utt.graphemes, ctx.plan), p, ctx.training, rng,
                    grads ? &text_cache : nullptr);
    bi = biam_forward(x, y);
    if (ctx.cd_enabled)
      cd = cosine_distance_loss(bi.y_aligned, x, grads ? &cd_grads : nullptr);
    mlm_res = mlm_loss(bi.x_aligned, utt.graphemes, ctx.plan, p.mlm_head);
    mlm = mlm_res.loss;
    gctc_res = gctc_loss(ctx.pick_speech ? x : bi.y_aligned, utt.graphemes, p.gctc_head);
    gctc = gctc_res.loss;
  } else if (tc.mode == TrainMode::grapheme_ctc) {
    gctc_res = gctc_loss(x, utt.graphemes, p.gctc_head);
    gctc = gctc_res.loss;
  }

  UpperCache upper_cache;
  const Matrix u =
      encode_speech_upper(x, p, ctx.training, rng, grads ? &upper_cache : nullptr);
  Matrix asr_logits = matmul(u, p.asr_head.w);
  add_broadcast_row(asr_logits, p.asr_head.b);
  CtcResult asr_ctc = ctc_loss(asr_logits, utt.graphemes);
  DecoderCache dec_cache;
  const double att = decode_teacher_forced(u, utt.graphemes, p, ctx.training, rng,
                                           grads ? &dec_cache : nullptr);

  const LossBreakdown lb =
      total_loss(asr_ctc.loss, att, cd, mlm, gctc, tc.weights, ctx.cd_enabled);
  if (!grads) return lb;

  const double lambda = tc.weights.lambda;
  const double alpha = tc.weights.alpha;

  // ASR mixture into the upper stack
  Matrix g_logits = std::move(asr_ctc.grad_logits);
  scale_in_place(g_logits, lambda);
  add_in_place(grads->asr_head.w, matmul_trans_a(u, g_logits));
  add_in_place(grads->asr_head.b, col_sums(g_logits));
  Matrix g_u = matmul_trans_b(g_logits, p.asr_head.w);
  add_in_place(g_u, decode_teacher_forced_backward(1.0 - lambda, p, dec_cache, *grads));
  Matrix g_x = encode_speech_upper_backward(g_u, p, upper_cache, *grads);

  if (use_biam) {
    Matrix g_xa(bi.x_aligned.rows, bi.x_aligned.cols);
    add_scaled_in_place(g_xa, mlm_res.grad_x_aligned, alpha);
    Matrix g_ya(bi.y_aligned.rows, bi.y_aligned.cols);
    if (ctx.cd_enabled) {
      add_scaled_in_place(g_ya, cd_grads.y_aligned, alpha);
      if (!tc.cd_stop_grad_x) add_scaled_in_place(g_x, cd_grads.x, alpha);
    }
    if (ctx.pick_speech)
      add_scaled_in_place(g_x, gctc_res.grad_input, alpha);
    else
      add_scaled_in_place(g_ya, gctc_res.grad_input, alpha);
    BiamGrads bg = biam_backward(x, y, bi, g_xa, g_ya);
    add_in_place(g_x, bg.x);
    encode_text_backward(bg.y, p, text_cache, *grads);
    add_scaled_in_place(grads->mlm_head.w, mlm_res.grad_head.w, alpha);
    add_scaled_in_place(grads->mlm_head.b, mlm_res.grad_head.b, alpha);
    add_scaled_in_place(grads->gctc_head.w, gctc_res.grad_head.w, alpha);
    add_scaled_in_place(grads->gctc_head.b, gctc_res.grad_head.b, alpha);
  } else if (tc.mode == TrainMode::grapheme_ctc) {
    add_scaled_in_place(g_x, gctc_res.grad_input, alpha);
    add_scaled_in_place(grads->gctc_head.w, gctc_res.grad_head.w, alpha);
    add_scaled_in_place(grads->gctc_head.b, gctc_res.grad_head.b, alpha);
  }

  encode_speech_lower_backward(g_x, p, lower_cache, *grads);
  return lb;
}

namespace {

struct StageOutcome {
  ModelParams params;
  std::vector<EpochMetrics> history;
  std::size_t skipped = 0;
};

StageOutcome run_paired_stage(const std::vector<Utterance>& corpus, const RunConfig& cfg,
                              ModelParams params, double lr, std::size_t epochs,
                              std::uint64_t stage_seed, std::size_t epoch_offset,
                              const EpochObserver& observer) {
  cfg.validate();
  if (corpus.empty()) throw_data("train: empty corpus");
  const TrainConfig& tc = cfg.train;
  const CorpusSplit split = split_corpus(corpus, tc.heldout_fraction);

  std::vector<const Utterance*> train_set;
  for (const Utterance* utt : split.train)
    if (ctc_reachable(*utt)) train_set.push_back(utt);
  const std::size_t skipped = split.train.size() - train_set.size();
  if (train_set.empty()) throw_data("train: no CTC-reachable utterances to train on");

  const bool use_biam = mode_uses_biam(tc.mode);
  StageOutcome out;
  out.skipped = skipped;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    const bool cd_on = cd_enabled_at(tc, epoch, epochs);
    const auto order =
        shuffled_order(train_set.size(), RngState(stage_seed).fork(kShuffleStream).fork(epoch));
    LossBreakdown sum;
    for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
      const std::size_t end = std::min(order.size(), start + tc.batch_size);
      ModelParams grads = ModelParams::zeros_like(params);
      for (std::size_t i = start; i < end; ++i) {
        const std::size_t idx = order[i];
        const Utterance& utt = *train_set[idx];
        RngState utt_rng = RngState(stage_seed).fork(kUttStream).fork(epoch).fork(idx);
        StepContext ctx;
        ctx.training = true;
        ctx.cd_enabled = cd_on;
        if (use_biam) {
          ctx.plan = make_mask_plan(utt.graphemes.size(), tc.mask_rate, utt_rng);
          ctx.pick_speech = sampler_pick(utt_rng, tc.sampler_speech_prob);
        }
        try {
          accumulate(sum, paired_step(params, utt, cfg, ctx, &utt_rng, &grads));
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::numeric) throw;
          throw Error(ErrorKind::numeric, "train: epoch " + std::to_string(epoch_offset + epoch) +
                                              ", utterance " + utt.id + ": " + e.what());
        }
      }
      params.add_scaled(grads, -lr / static_cast<double>(end - start));
    }
    EpochMetrics m;
    m.epoch = epoch_offset + epoch;
    m.train_loss = divide(sum, train_set.size());
    if (!split.heldout.empty()) {
      const EvalResult ev = evaluate(split.heldout, params, cfg);
      m.monotonicity = ev.monotonicity;
      m.cer = ev.cer;
    }
    out.history.push_back(m);
    if (observer) observer(epoch_offset + epoch, params);
  }
  out.params = std::move(params);
  return out;
}

}  // namespace

TrainResult train_paired(const std::vector<Utterance>& corpus, const RunConfig& cfg,
                         const EpochObserver& observer) {
  RngState init_rng(derive_seed(cfg.train.seed, kInitStream));
  ModelParams params = ModelParams::init(cfg.model, init_rng);
  const std::uint64_t stage_seed = derive_seed(cfg.train.seed, kPairedStage);
  StageOutcome out = run_paired_stage(corpus, cfg, std::move(params), cfg.train.lr_paired,
                                      cfg.train.epochs, stage_seed, 0, observer);
  TrainResult res;
  res.checkpoint = {std::move(out.params), cfg.train.epochs, stage_seed, cfg.hash()};
  res.history = std::move(out.history);
  res.skipped = out.skipped;
  return res;
}

TrainResult finetune_paired(const std::vector<Utterance>& corpus, const Checkpoint& start,
                            const RunConfig& cfg, const EpochObserver& observer) {
  const std::uint64_t stage_seed = derive_seed(cfg.train.seed, kFinetuneStage);
  StageOutcome out =
      run_paired_stage(corpus, cfg, start.params, cfg.train.lr_finetune,
                       cfg.train.finetune_epochs, stage_seed, start.epoch, observer);
  TrainResult res;
  res.checkpoint = {std::move(out.params), start.epoch + cfg.train.finetune_epochs, stage_seed,
                    cfg.hash()};
  res.history = std::move(out.history);
  res.skipped = out.skipped;
  return res;
}

Matrix replicate_rows(const Matrix& m, std::size_t copies) {
  return replicate_rows(m, std::vector<std::size_t>(m.rows, copies));
}

Matrix replicate_rows(const Matrix& m, const std::vector<std::size_t>& counts) {
  if (counts.size() != m.rows) throw_usage("replicate_rows: one count per row required");
  std::size_t total = 0;
  for (std::size_t c : counts) total += c;
  Matrix out(total, m.cols);
  std::size_t r = 0;
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t c = 0; c < counts[i]; ++c, ++r)
      for (std::size_t j = 0; j < m.cols; ++j) out(r, j) = m(i, j);
  return out;
}

TrainResult pretrain_unpaired(const std::vector<std::vector<int>>& texts, const Checkpoint& start,
                              const RunConfig& cfg) {
  cfg.validate();
  if (texts.empty()) throw_data("pretrain: empty text corpus");
  const TrainConfig& tc = cfg.train;
  ModelParams params = start.params;
  const std::uint64_t stage_seed = derive_seed(tc.seed, kPretrainStage);
  const bool unfreeze_upper = tc.pretrain_unfreeze_upper;
  const auto trainable = [unfreeze_upper](const std::string& name) {
    return name.starts_with("dec.") || (unfreeze_upper && name.starts_with("upper."));
  };

  TrainResult res;
  for (std::size_t epoch = 0; epoch < tc.pretrain_epochs; ++epoch) {
    const auto order =
        shuffled_order(texts.size(), RngState(stage_seed).fork(kShuffleStream).fork(epoch));
    double att_sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t batch_start = 0; batch_start < order.size(); batch_start += tc.batch_size) {
      const std::size_t batch_end = std::min(order.size(), batch_start + tc.batch_size);
      ModelParams grads = ModelParams::zeros_like(params);
      std::size_t batch_count = 0;
      for (std::size_t i = batch_start; i < batch_end; ++i) {
        const std::size_t idx = order[i];
        const std::vector<int>& tokens = texts[idx];
        if (tokens.empty()) continue;
        RngState utt_rng = RngState(stage_seed).fork(kUttStream).fork(epoch).fork(idx);
        std::vector<std::size_t> counts(tokens.size(), tc.replication);
        if (tc.replication_random)
          for (std::size_t& c : counts)
            c = static_cast<std::size_t>(utt_rng.uniform_int(1, 3));
        const Matrix y = encode_text(tokens, params, true, &utt_rng, nullptr);
        UpperCache upper_cache;
        const Matrix u = encode_speech_upper(replicate_rows(y, counts), params, true, &utt_rng,
                                             unfreeze_upper ? &upper_cache : nullptr);
        DecoderCache dec_cache;
        att_sum += decode_teacher_forced(u, tokens, params, true, &utt_rng, &dec_cache);
        const Matrix g_u = decode_teacher_forced_backward(1.0, params, dec_cache, grads);
        if (unfreeze_upper) encode_speech_upper_backward(g_u, params, upper_cache, grads);
        ++batch_count;
        ++counted;
      }
      if (batch_count > 0)
        params.add_scaled(grads, -tc.lr_paired / static_cast<double>(batch_count), trainable);
    }
    EpochMetrics m;
    m.epoch = start.epoch + epoch;
    m.train_loss.asr_attention = counted ? att_sum / static_cast<double>(counted) : 0.0;
    m.train_loss.total = m.train_loss.asr_attention;
    res.history.push_back(m);
  }
  res.checkpoint = {std::move(params), start.epoch + tc.pretrain_epochs, stage_seed, cfg.hash()};
  return res;
}

std::size_t levenshtein(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

EvalResult evaluate(const std::vector<const Utterance*>& utts, const ModelParams& p,
                    const RunConfig& cfg) {
  if (utts.empty()) throw_data("evaluate: empty corpus");
  const TrainConfig& tc = cfg.train;
  const bool use_biam = mode_uses_biam(tc.mode);
  EvalResult res;
  LossBreakdown sum;
  std::size_t loss_count = 0, mono_count = 0;
  for (std::size_t i = 0; i < utts.size(); ++i) {
    const Utterance& utt = *utts[i];
    const Matrix x = encode_speech_lower(utt.speech, p, false, nullptr, nullptr);
    const Matrix u = encode_speech_upper(x, p, false, nullptr, nullptr);
    Matrix logits = matmul(u, p.asr_head.w);
    add_broadcast_row(logits, p.asr_head.b);
    const std::vector<int> hyp = ctc_greedy_decode(logits);
    res.cer += static_cast<double>(levenshtein(hyp, utt.graphemes)) /
               static_cast<double>(std::max<std::size_t>(1, utt.graphemes.size()));

    if (!utt.graphemes.empty()) {
      const Matrix y = encode_text(utt.graphemes, p, false, nullptr, nullptr);
      res.monotonicity += monotonicity_score(biam_forward(x, y).w12, tc.monotonicity_band);
      ++mono_count;
    }
    if (ctc_reachable(utt)) {
      // deterministic evaluation context, independent of training state
      RngState rng(derive_seed(kEvalStream, i));
      StepContext ctx;
      ctx.cd_enabled = mode_allows_cd(tc.mode);
      if (use_biam) {
        ctx.plan = make_mask_plan(utt.graphemes.size(), tc.mask_rate, rng);
        ctx.pick_speech = sampler_pick(rng, tc.sampler_speech_prob);
      }
      accumulate(sum, paired_step(p, utt, cfg, ctx, nullptr, nullptr));
      ++loss_count;
    }
  }
  res.cer /= static_cast<double>(utts.size());
  if (mono_count > 0) res.monotonicity /= static_cast<double>(mono_count);
  res.mean_loss = divide(sum, loss_count);
  return res;
}

EvalResult evaluate(const std::vector<Utterance>& utts, const ModelParams& p,
                    const RunConfig& cfg) {
  std::vector<const Utterance*> ptrs;
  ptrs.reserve(utts.size());
  for (const Utterance& u : utts) ptrs.push_back(&u);
  return evaluate(ptrs, p, cfg);
}

void write_metrics_csv(const std::vector<EpochMetrics>& history, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_data("write_metrics_csv: cannot open '" + path + "'");
  out << "epoch,asr_ctc,asr_attention,cd,mlm,gctc,total,monotonicity,cer\n";
  char buf[512];
  for (const EpochMetrics& m : history) {
    const LossBreakdown& l = m.train_loss;
    std::snprintf(buf, sizeof buf,
                  "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", m.epoch, l.asr_ctc,
                  l.asr_attention, l.cd, l.mlm, l.gctc, l.total, m.monotonicity, m.cer);
    out << buf;
  }
  if (!out) throw_data("write_metrics_csv: write to '" + path + "' failed");
}

namespace {

nlohmann::json model_config_json(const ModelConfig& cfg) {
  nlohmann::json j;
  j["feat_dim"] = cfg.feat_dim;
  j["dim"] = cfg.dim;
  j["vocab"] = cfg.vocab;
  j["lower_layers"] = cfg.lower_layers;
  j["upper_layers"] = cfg.upper_layers;
  j["text_layers"] = cfg.text_layers;
  j["dropout"] = cfg.dropout;
  j["positional_speech"] = cfg.positional_speech;
  j["positional_text"] = cfg.positional_text;
  j["init_gain"] = cfg.init_gain;
  return j;
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig cfg;
  j.at("feat_dim").get_to(cfg.feat_dim);
  j.at("dim").get_to(cfg.dim);
  j.at("vocab").get_to(cfg.vocab);
  j.at("lower_layers").get_to(cfg.lower_layers);
  j.at("upper_layers").get_to(cfg.upper_layers);
  j.at("text_layers").get_to(cfg.text_layers);
  j.at("dropout").get_to(cfg.dropout);
  j.at("positional_speech").get_to(cfg.positional_speech);
  j.at("positional_text").get_to(cfg.positional_text);
  j.at("init_gain").get_to(cfg.init_gain);
  return cfg;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  nlohmann::json doc;
  doc["format"] = "mmt-checkpoint-v1";
  doc["epoch"] = ckpt.epoch;
  doc["rng_state"] = std::to_string(ckpt.rng_state);
  doc["config_hash"] = std::to_string(ckpt.config_hash);
  doc["model"] = model_config_json(ckpt.params.cfg);
  doc["optimizer"] = "sgd";
  nlohmann::json& arrays = doc["params"];
  ckpt.params.visit([&](const std::string& name, const Matrix& m) {
    arrays[name] = {{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
  });
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_data("save_checkpoint: cannot open '" + path + "'");
  out << doc.dump() << '\n';
  if (!out) throw_data("save_checkpoint: write to '" + path + "' failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_data("load_checkpoint: cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw_data("load_checkpoint: '" + path + "' is not valid JSON: " + e.what());
  }
  Checkpoint ckpt;
  try {
    if (doc.at("format").get<std::string>() != "mmt-checkpoint-v1")
      throw_data("load_checkpoint: unknown format in '" + path + "'");
    doc.at("epoch").get_to(ckpt.epoch);
    ckpt.rng_state = std::stoull(doc.at("rng_state").get<std::string>());
    ckpt.config_hash = std::stoull(doc.at("config_hash").get<std::string>());
    ckpt.params = ModelParams::zeros(model_config_from_json(doc.at("model")));
    const nlohmann::json& arrays = doc.at("params");
    std::size_t seen = 0;
    ckpt.params.visit([&](const std::string& name, Matrix& m) {
      const nlohmann::json& a = arrays.at(name);
      if (a.at("rows").get<std::size_t>() != m.rows ||
          a.at("cols").get<std::size_t>() != m.cols)
        throw_data("load_checkpoint: array '" + name + "' has unexpected shape");
      a.at("data").get_to(m.data);
      if (m.data.size() != m.rows * m.cols)
        throw_data("load_checkpoint: array '" + name + "' has wrong element count");
      ++seen;
    });
    if (seen != arrays.size())
      throw_data("load_checkpoint: '" + path + "' carries unknown parameter arrays");
  } catch (const nlohmann::json::exception& e) {
    throw_data("load_checkpoint: bad checkpoint '" + path + "': " + e.what());
  }
  return ckpt;
}

void write_run_dir(const std::string& dir, const RunConfig& cfg,
                   const std::vector<EpochMetrics>& history, const Checkpoint* ckpt,
                   std::size_t skipped) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw_data("run dir: cannot create '" + dir + "': " + ec.message());
  {
    std::ofstream out(dir + "/config.json", std::ios::binary);
    if (!out) throw_data("run dir: cannot write config echo in '" + dir + "'");
    out << cfg.to_json(true);
  }
  write_metrics_csv(history, dir + "/metrics.csv");
  if (ckpt) save_checkpoint(*ckpt, dir + "/checkpoint.json");
  {
    std::ofstream out(dir + "/run.json", std::ios::binary);
    if (!out) throw_data("run dir: cannot write run.json in '" + dir + "'");
    nlohmann::json j;
    j["version"] = kVersion;
    j["epochs_recorded"] = history.size();
    j["skipped_utterances"] = skipped;
    out << j.dump(2) << '\n';
  }
}

}  // namespace mmt
