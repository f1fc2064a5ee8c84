// Command-line front end. Everything goes through the C API of the shared
// library; this file owns only argument parsing and printing.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmt.h"

namespace {

struct ConfigArgs {
  std::string config_path;
  std::vector<std::string> sets;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON configuration file");
  cmd->add_option("--set", args.sets, "override one key, e.g. --set train.epochs=40");
}

int report(mmt_status status) {
  if (status != MMT_OK) std::fprintf(stderr, "error: %s\n", mmt_last_error());
  return static_cast<int>(status);
}

int build_config(const ConfigArgs& args, mmt_config* cfg) {
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path, std::ios::binary);
    if (!in) {
      std::fprintf(stderr, "error: cannot read config file '%s'\n", args.config_path.c_str());
      return static_cast<int>(MMT_ERROR_DATA);
    }
    std::ostringstream text;
    text << in.rdbuf();
    if (const int rc = report(mmt_config_load_json(cfg, text.str().c_str()))) return rc;
  }
  for (const std::string& kv : args.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::fprintf(stderr, "error: --set expects section.key=value, got '%s'\n", kv.c_str());
      return static_cast<int>(MMT_ERROR_USAGE);
    }
    if (const int rc = report(
            mmt_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str())))
      return rc;
  }
  return 0;
}

void print_eval(const char* split, const mmt_eval_result& ev) {
  std::printf("split=%s cer=%.6f monotonicity=%.6f total=%.6f\n", split, ev.cer,
              ev.mean_monotonicity, ev.total);
  std::printf("  losses: asr_ctc=%.6f asr_attention=%.6f cd=%.6f mlm=%.6f gctc=%.6f\n",
              ev.asr_ctc, ev.asr_attention, ev.cd, ev.mlm, ev.gctc);
}

// Prints the held-out summary after a training stage; quietly skips when
// the corpus is too small to carry a held-out split.
void try_heldout_summary(const mmt_config* cfg, const mmt_corpus* corpus,
                         const mmt_checkpoint* ckpt) {
  mmt_eval_result ev{};
  if (mmt_evaluate(cfg, corpus, ckpt, "heldout", nullptr, &ev) == MMT_OK)
    print_eval("heldout", ev);
}

struct Handle {
  mmt_config* cfg = nullptr;
  mmt_corpus* corpus = nullptr;
  mmt_text_corpus* texts = nullptr;
  mmt_checkpoint* ckpt = nullptr;
  mmt_checkpoint* result = nullptr;
  ~Handle() {
    mmt_config_free(cfg);
    mmt_corpus_free(corpus);
    mmt_text_corpus_free(texts);
    mmt_checkpoint_free(ckpt);
    mmt_checkpoint_free(result);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"speech-text multi-modal training toy (bidirectional attention)"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mmt_version());

  ConfigArgs cfg_args;
  std::string corpus_path, run_dir, ckpt_path, out_path, utt_id, split = "heldout";
  std::string scope = "all", corrupt_op;
  std::uint64_t seed = 1;

  CLI::App* gen = app.add_subcommand("gen-data", "generate a synthetic paired corpus (JSONL)");
  add_config_options(gen, cfg_args);
  gen->add_option("--out", out_path, "output JSONL path")->required();

  CLI::App* train = app.add_subcommand("train", "paired multi-modal training");
  add_config_options(train, cfg_args);
  train->add_option("--corpus", corpus_path, "paired corpus JSONL")->required();
  train->add_option("--run-dir", run_dir, "run directory for config echo, metrics, checkpoint")
      ->required();

  CLI::App* pretrain =
      app.add_subcommand("pretrain-text", "unpaired text pretraining (decoder-only updates)");
  add_config_options(pretrain, cfg_args);
  pretrain->add_option("--ckpt", ckpt_path, "checkpoint from paired training")->required();
  pretrain->add_option("--run-dir", run_dir, "run directory")->required();

  CLI::App* finetune = app.add_subcommand("finetune", "paired fine-tuning of a checkpoint");
  add_config_options(finetune, cfg_args);
  finetune->add_option("--corpus", corpus_path, "paired corpus JSONL")->required();
  finetune->add_option("--ckpt", ckpt_path, "checkpoint to start from")->required();
  finetune->add_option("--run-dir", run_dir, "run directory")->required();

  CLI::App* eval = app.add_subcommand("eval", "CER, monotonicity and losses of a checkpoint");
  add_config_options(eval, cfg_args);
  eval->add_option("--corpus", corpus_path, "paired corpus JSONL")->required();
  eval->add_option("--ckpt", ckpt_path, "checkpoint")->required();
  eval->add_option("--split", split, "all, train or heldout");
  eval->add_option("--run-dir", run_dir, "where to persist eval.json");

  CLI::App* gradcheck =
      app.add_subcommand("gradcheck", "finite-difference check of every analytic gradient");
  gradcheck->add_option("--scope", scope, "all or one of ctc, biam, losses, encoders, chain");
  gradcheck->add_option("--seed", seed, "instance seed");
  gradcheck->add_option("--corrupt-op", corrupt_op,
                        "deliberately break one op's gradient (negative control)");

  CLI::App* expo = app.add_subcommand("export-alignment",
                                      "write w12 of one utterance as CSV and PGM");
  add_config_options(expo, cfg_args);
  expo->add_option("--ckpt", ckpt_path, "checkpoint")->required();
  expo->add_option("--corpus", corpus_path, "paired corpus JSONL")->required();
  expo->add_option("--utt", utt_id, "utterance id")->required();
  expo->add_option("--out", out_path, "output prefix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(MMT_ERROR_USAGE);
  }

  Handle h;
  h.cfg = mmt_config_create();
  if (const int rc = build_config(cfg_args, h.cfg)) return rc;

  if (gen->parsed()) {
    if (const int rc = report(mmt_corpus_generate(h.cfg, &h.corpus))) return rc;
    if (const int rc = report(mmt_corpus_save(h.corpus, out_path.c_str()))) return rc;
    std::printf("wrote %zu utterances to %s\n", mmt_corpus_size(h.corpus), out_path.c_str());
    return 0;
  }

  if (gradcheck->parsed()) {
    char* text = nullptr;
    const mmt_status status = mmt_gradcheck(
        scope.c_str(), seed, corrupt_op.empty() ? nullptr : corrupt_op.c_str(), &text);
    if (text) {
      std::fputs(text, stdout);
      mmt_string_free(text);
    }
    return report(status);
  }

  if (!corpus_path.empty())
    if (const int rc = report(mmt_corpus_load(h.cfg, corpus_path.c_str(), &h.corpus))) return rc;
  if (!ckpt_path.empty())
    if (const int rc = report(mmt_checkpoint_load(ckpt_path.c_str(), &h.ckpt))) return rc;

  if (train->parsed()) {
    if (const int rc = report(mmt_train_paired(h.cfg, h.corpus, run_dir.c_str(), &h.result)))
      return rc;
    std::printf("run written to %s\n", run_dir.c_str());
    try_heldout_summary(h.cfg, h.corpus, h.result);
    return 0;
  }

  if (pretrain->parsed()) {
    if (const int rc = report(mmt_text_corpus_generate(h.cfg, &h.texts))) return rc;
    if (const int rc =
            report(mmt_pretrain_text(h.cfg, h.texts, h.ckpt, run_dir.c_str(), &h.result)))
      return rc;
    std::printf("pretrained on %zu text sequences, run written to %s\n",
                mmt_text_corpus_size(h.texts), run_dir.c_str());
    return 0;
  }

  if (finetune->parsed()) {
    if (const int rc =
            report(mmt_finetune_paired(h.cfg, h.corpus, h.ckpt, run_dir.c_str(), &h.result)))
      return rc;
    std::printf("run written to %s\n", run_dir.c_str());
    try_heldout_summary(h.cfg, h.corpus, h.result);
    return 0;
  }

  if (eval->parsed()) {
    mmt_eval_result ev{};
    if (const int rc = report(mmt_evaluate(h.cfg, h.corpus, h.ckpt, split.c_str(),
                                           run_dir.empty() ? nullptr : run_dir.c_str(), &ev)))
      return rc;
    print_eval(split.c_str(), ev);
    return 0;
  }

  if (expo->parsed()) {
    if (const int rc = report(
            mmt_export_alignment(h.ckpt, h.corpus, utt_id.c_str(), out_path.c_str())))
      return rc;
    std::printf("wrote %s.w12.csv and %s.w12.pgm\n", out_path.c_str(), out_path.c_str());
    return 0;
  }

  return static_cast<int>(MMT_ERROR_USAGE);
}
