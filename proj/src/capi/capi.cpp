// extern-C surface of the shared library: opaque handles around the C++
// core, exceptions mapped to status codes, last error kept per thread.

#include "mmt.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/data.hpp"
#include "core/error.hpp"
#include "core/export.hpp"
#include "core/gradcheck.hpp"
#include "core/train.hpp"
#include "core/version.hpp"

struct mmt_config {
  mmt::RunConfig cfg;
};

struct mmt_corpus {
  std::vector<mmt::Utterance> utts;
  std::size_t vocab = 0;
  std::size_t feat_dim = 0;
};

struct mmt_text_corpus {
  std::vector<std::vector<int>> texts;
};

struct mmt_checkpoint {
  mmt::Checkpoint ckpt;
};

namespace {

thread_local std::string g_last_error;

mmt_status fail(mmt_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

template <class Fn>
mmt_status guarded(Fn&& fn) {
  try {
    fn();
    return MMT_OK;
  } catch (const mmt::Error& e) {
    return fail(static_cast<mmt_status>(static_cast<int>(e.kind())), e.what());
  } catch (const std::exception& e) {
    return fail(MMT_ERROR_NUMERIC, e.what());
  }
}

mmt_status require(bool ok, const char* what) {
  return ok ? MMT_OK : fail(MMT_ERROR_USAGE, std::string("null argument: ") + what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<const mmt::Utterance*> select_split(const mmt_corpus& corpus,
                                                const mmt::RunConfig& cfg,
                                                const std::string& split) {
  std::vector<const mmt::Utterance*> out;
  if (split == "all") {
    for (const auto& u : corpus.utts) out.push_back(&u);
    return out;
  }
  const mmt::CorpusSplit s = mmt::split_corpus(corpus.utts, cfg.train.heldout_fraction);
  if (split == "train") return s.train;
  if (split == "heldout") return s.heldout;
  mmt::throw_usage("evaluate: split must be all, train or heldout; got '" + split + "'");
}

}  // namespace

extern "C" {

const char* mmt_version(void) { return mmt::kVersion; }

const char* mmt_last_error(void) { return g_last_error.c_str(); }

void mmt_string_free(char* s) { std::free(s); }

mmt_config* mmt_config_create(void) { return new mmt_config{}; }

void mmt_config_free(mmt_config* cfg) { delete cfg; }

mmt_status mmt_config_load_json(mmt_config* cfg, const char* json_text) {
  if (auto st = require(cfg && json_text, "config/json_text")) return st;
  return guarded([&] { cfg->cfg.merge_json_text(json_text); });
}

mmt_status mmt_config_set(mmt_config* cfg, const char* dotted_key, const char* value) {
  if (auto st = require(cfg && dotted_key && value, "config/key/value")) return st;
  return guarded([&] { cfg->cfg.apply_override(dotted_key, value); });
}

char* mmt_config_dump(const mmt_config* cfg) {
  if (!cfg) return nullptr;
  return dup_string(cfg->cfg.to_json(true));
}

mmt_status mmt_corpus_generate(const mmt_config* cfg, mmt_corpus** out) {
  if (auto st = require(cfg && out, "config/out")) return st;
  return guarded([&] {
    cfg->cfg.validate();
    auto* corpus = new mmt_corpus{mmt::synth_corpus(cfg->cfg.data), cfg->cfg.data.vocab,
                                  cfg->cfg.data.feat_dim};
    *out = corpus;
  });
}

mmt_status mmt_corpus_load(const mmt_config* cfg, const char* path, mmt_corpus** out) {
  if (auto st = require(cfg && path && out, "config/path/out")) return st;
  return guarded([&] {
    auto utts = mmt::load_jsonl(path, cfg->cfg.data.vocab, cfg->cfg.data.feat_dim);
    *out = new mmt_corpus{std::move(utts), cfg->cfg.data.vocab, cfg->cfg.data.feat_dim};
  });
}

mmt_status mmt_corpus_save(const mmt_corpus* corpus, const char* path) {
  if (auto st = require(corpus && path, "corpus/path")) return st;
  return guarded([&] { mmt::save_jsonl(corpus->utts, path); });
}

size_t mmt_corpus_size(const mmt_corpus* corpus) { return corpus ? corpus->utts.size() : 0; }

void mmt_corpus_free(mmt_corpus* corpus) { delete corpus; }

mmt_status mmt_text_corpus_generate(const mmt_config* cfg, mmt_text_corpus** out) {
  if (auto st = require(cfg && out, "config/out")) return st;
  return guarded([&] {
    cfg->cfg.validate();
    *out = new mmt_text_corpus{mmt::unpaired_text_corpus(cfg->cfg.data)};
  });
}

size_t mmt_text_corpus_size(const mmt_text_corpus* corpus) {
  return corpus ? corpus->texts.size() : 0;
}

void mmt_text_corpus_free(mmt_text_corpus* corpus) { delete corpus; }

mmt_status mmt_train_paired(const mmt_config* cfg, const mmt_corpus* corpus,
                            const char* run_dir, mmt_checkpoint** out) {
  if (auto st = require(cfg && corpus && out, "config/corpus/out")) return st;
  return guarded([&] {
    mmt::TrainResult res = mmt::train_paired(corpus->utts, cfg->cfg);
    if (run_dir) mmt::write_run_dir(run_dir, cfg->cfg, res.history, &res.checkpoint, res.skipped);
    *out = new mmt_checkpoint{std::move(res.checkpoint)};
  });
}

mmt_status mmt_pretrain_text(const mmt_config* cfg, const mmt_text_corpus* texts,
                             const mmt_checkpoint* start, const char* run_dir,
                             mmt_checkpoint** out) {
  if (auto st = require(cfg && texts && start && out, "config/texts/start/out")) return st;
  return guarded([&] {
    mmt::TrainResult res = mmt::pretrain_unpaired(texts->texts, start->ckpt, cfg->cfg);
    if (run_dir) mmt::write_run_dir(run_dir, cfg->cfg, res.history, &res.checkpoint, res.skipped);
    *out = new mmt_checkpoint{std::move(res.checkpoint)};
  });
}

mmt_status mmt_finetune_paired(const mmt_config* cfg, const mmt_corpus* corpus,
                               const mmt_checkpoint* start, const char* run_dir,
                               mmt_checkpoint** out) {
  if (auto st = require(cfg && corpus && start && out, "config/corpus/start/out")) return st;
  return guarded([&] {
    mmt::TrainResult res = mmt::finetune_paired(corpus->utts, start->ckpt, cfg->cfg);
    if (run_dir) mmt::write_run_dir(run_dir, cfg->cfg, res.history, &res.checkpoint, res.skipped);
    *out = new mmt_checkpoint{std::move(res.checkpoint)};
  });
}

mmt_status mmt_evaluate(const mmt_config* cfg, const mmt_corpus* corpus,
                        const mmt_checkpoint* ckpt, const char* split, const char* run_dir,
                        mmt_eval_result* out) {
  if (auto st = require(cfg && corpus && ckpt && split && out, "config/corpus/ckpt/split/out"))
    return st;
  return guarded([&] {
    const auto utts = select_split(*corpus, cfg->cfg, split);
    const mmt::EvalResult ev = mmt::evaluate(utts, ckpt->ckpt.params, cfg->cfg);
    out->cer = ev.cer;
    out->mean_monotonicity = ev.monotonicity;
    out->asr_ctc = ev.mean_loss.asr_ctc;
    out->asr_attention = ev.mean_loss.asr_attention;
    out->cd = ev.mean_loss.cd;
    out->mlm = ev.mean_loss.mlm;
    out->gctc = ev.mean_loss.gctc;
    out->total = ev.mean_loss.total;
    if (run_dir) {
      std::error_code ec;
      std::filesystem::create_directories(run_dir, ec);
      if (ec) mmt::throw_data(std::string("eval: cannot create run dir: ") + ec.message());
      std::ofstream f(std::string(run_dir) + "/eval.json", std::ios::binary);
      if (!f) mmt::throw_data("eval: cannot write eval.json");
      char buf[512];
      std::snprintf(buf, sizeof buf,
                    "{\"split\":\"%s\",\"cer\":%.17g,\"mean_monotonicity\":%.17g,"
                    "\"total\":%.17g}\n",
                    split, ev.cer, ev.monotonicity, ev.mean_loss.total);
      f << buf;
    }
  });
}

mmt_status mmt_checkpoint_save(const mmt_checkpoint* ckpt, const char* path) {
  if (auto st = require(ckpt && path, "ckpt/path")) return st;
  return guarded([&] { mmt::save_checkpoint(ckpt->ckpt, path); });
}

mmt_status mmt_checkpoint_load(const char* path, mmt_checkpoint** out) {
  if (auto st = require(path && out, "path/out")) return st;
  return guarded([&] { *out = new mmt_checkpoint{mmt::load_checkpoint(path)}; });
}

void mmt_checkpoint_free(mmt_checkpoint* ckpt) { delete ckpt; }

mmt_status mmt_gradcheck(const char* scope, uint64_t seed, const char* corrupt_op,
                         char** report_out) {
  if (auto st = require(scope, "scope")) return st;
  mmt_status status = MMT_OK;
  const mmt_status run_status = guarded([&] {
    const mmt::GradCheckReport report =
        mmt::run_gradcheck(scope, seed, corrupt_op ? corrupt_op : "");
    if (report_out) *report_out = dup_string(mmt::format_gradcheck_report(report));
    if (!report.all_pass)
      status = fail(MMT_ERROR_NUMERIC, "gradcheck: at least one gradient exceeds the contract");
  });
  return run_status != MMT_OK ? run_status : status;
}

mmt_status mmt_export_alignment(const mmt_checkpoint* ckpt, const mmt_corpus* corpus,
                                const char* utterance_id, const char* out_prefix) {
  if (auto st = require(ckpt && corpus && utterance_id && out_prefix, "ckpt/corpus/id/prefix"))
    return st;
  return guarded([&] {
    for (const mmt::Utterance& utt : corpus->utts)
      if (utt.id == utterance_id) {
        mmt::export_alignment(ckpt->ckpt.params, utt, out_prefix);
        return;
      }
    mmt::throw_data("export_alignment: no utterance with id '" + std::string(utterance_id) +
                    "'");
  });
}

}  // extern "C"
