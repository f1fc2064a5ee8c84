#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <string>

#include <doctest.h>

#include "mmt.h"

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("mmt_capi_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

struct ConfigHandle {
  mmt_config* cfg = mmt_config_create();
  ~ConfigHandle() { mmt_config_free(cfg); }
};

void set_small(mmt_config* cfg) {
  REQUIRE(mmt_config_set(cfg, "data.vocab", "5") == MMT_OK);
  REQUIRE(mmt_config_set(cfg, "model.vocab", "5") == MMT_OK);
  REQUIRE(mmt_config_set(cfg, "data.corpus_size", "20") == MMT_OK);
  REQUIRE(mmt_config_set(cfg, "model.dim", "8") == MMT_OK);
  REQUIRE(mmt_config_set(cfg, "train.epochs", "2") == MMT_OK);
}

}  // namespace

TEST_CASE("version and error strings are always available") {
  CHECK(std::strlen(mmt_version()) >= 5);
  CHECK(mmt_last_error() != nullptr);
}

TEST_CASE("config rejects unknown keys with a usage error") {
  ConfigHandle h;
  CHECK(mmt_config_set(h.cfg, "train.bogus", "1") == MMT_ERROR_USAGE);
  CHECK(std::string(mmt_last_error()).find("train.bogus") != std::string::npos);
  CHECK(mmt_config_load_json(h.cfg, "{\"nope\":{}}") == MMT_ERROR_USAGE);
  CHECK(mmt_config_load_json(h.cfg, "not json") == MMT_ERROR_USAGE);
  CHECK(mmt_config_set(h.cfg, "noformat", "1") == MMT_ERROR_USAGE);
}

TEST_CASE("config dump echoes applied overrides and round trips") {
  ConfigHandle h;
  REQUIRE(mmt_config_set(h.cfg, "train.epochs", "17") == MMT_OK);
  REQUIRE(mmt_config_set(h.cfg, "train.mode", "baseline") == MMT_OK);
  char* dump = mmt_config_dump(h.cfg);
  REQUIRE(dump != nullptr);
  const std::string text(dump);
  mmt_string_free(dump);
  CHECK(text.find("\"epochs\": 17") != std::string::npos);
  CHECK(text.find("\"mode\": \"baseline\"") != std::string::npos);

  ConfigHandle h2;
  CHECK(mmt_config_load_json(h2.cfg, text.c_str()) == MMT_OK);  // the echo is loadable
}

TEST_CASE("corpus generation, save and load through the C surface") {
  TempDir tmp;
  ConfigHandle h;
  set_small(h.cfg);
  mmt_corpus* corpus = nullptr;
  REQUIRE(mmt_corpus_generate(h.cfg, &corpus) == MMT_OK);
  CHECK(mmt_corpus_size(corpus) == 20);

  const std::string path = tmp.file("c.jsonl");
  REQUIRE(mmt_corpus_save(corpus, path.c_str()) == MMT_OK);
  mmt_corpus* reloaded = nullptr;
  REQUIRE(mmt_corpus_load(h.cfg, path.c_str(), &reloaded) == MMT_OK);
  CHECK(mmt_corpus_size(reloaded) == 20);
  mmt_corpus_free(corpus);
  mmt_corpus_free(reloaded);

  mmt_corpus* missing = nullptr;
  CHECK(mmt_corpus_load(h.cfg, tmp.file("absent.jsonl").c_str(), &missing) == MMT_ERROR_DATA);
}

TEST_CASE("null arguments are usage errors, not crashes") {
  CHECK(mmt_corpus_generate(nullptr, nullptr) == MMT_ERROR_USAGE);
  CHECK(mmt_checkpoint_load(nullptr, nullptr) == MMT_ERROR_USAGE);
  CHECK(mmt_gradcheck(nullptr, 1, nullptr, nullptr) == MMT_ERROR_USAGE);
}

TEST_CASE("train, evaluate, checkpoint and alignment export end to end") {
  TempDir tmp;
  ConfigHandle h;
  set_small(h.cfg);
  mmt_corpus* corpus = nullptr;
  REQUIRE(mmt_corpus_generate(h.cfg, &corpus) == MMT_OK);

  const std::string run = tmp.file("run");
  mmt_checkpoint* ckpt = nullptr;
  REQUIRE(mmt_train_paired(h.cfg, corpus, run.c_str(), &ckpt) == MMT_OK);
  CHECK(std::filesystem::exists(run + "/config.json"));
  CHECK(std::filesystem::exists(run + "/metrics.csv"));
  CHECK(std::filesystem::exists(run + "/checkpoint.json"));

  mmt_eval_result ev{};
  REQUIRE(mmt_evaluate(h.cfg, corpus, ckpt, "heldout", run.c_str(), &ev) == MMT_OK);
  CHECK(ev.cer >= 0.0);
  CHECK(std::filesystem::exists(run + "/eval.json"));
  CHECK(mmt_evaluate(h.cfg, corpus, ckpt, "nonsense", nullptr, &ev) == MMT_ERROR_USAGE);

  mmt_checkpoint* loaded = nullptr;
  REQUIRE(mmt_checkpoint_load((run + "/checkpoint.json").c_str(), &loaded) == MMT_OK);
  CHECK(mmt_export_alignment(loaded, corpus, "utt-000000", tmp.file("a").c_str()) == MMT_OK);
  CHECK(std::filesystem::exists(tmp.file("a.w12.csv")));
  CHECK(std::filesystem::exists(tmp.file("a.w12.pgm")));
  CHECK(mmt_export_alignment(loaded, corpus, "no-such-utt", tmp.file("b").c_str()) ==
        MMT_ERROR_DATA);

  mmt_checkpoint_free(ckpt);
  mmt_checkpoint_free(loaded);
  mmt_corpus_free(corpus);
}

TEST_CASE("pretrain and finetune through the C surface") {
  TempDir tmp;
  ConfigHandle h;
  set_small(h.cfg);
  REQUIRE(mmt_config_set(h.cfg, "data.unpaired_size", "10") == MMT_OK);
  REQUIRE(mmt_config_set(h.cfg, "train.pretrain_epochs", "1") == MMT_OK);
  REQUIRE(mmt_config_set(h.cfg, "train.finetune_epochs", "1") == MMT_OK);

  mmt_corpus* corpus = nullptr;
  REQUIRE(mmt_corpus_generate(h.cfg, &corpus) == MMT_OK);
  mmt_text_corpus* texts = nullptr;
  REQUIRE(mmt_text_corpus_generate(h.cfg, &texts) == MMT_OK);
  CHECK(mmt_text_corpus_size(texts) == 10);

  mmt_checkpoint* paired = nullptr;
  REQUIRE(mmt_train_paired(h.cfg, corpus, nullptr, &paired) == MMT_OK);
  mmt_checkpoint* pre = nullptr;
  REQUIRE(mmt_pretrain_text(h.cfg, texts, paired, nullptr, &pre) == MMT_OK);
  mmt_checkpoint* tuned = nullptr;
  REQUIRE(mmt_finetune_paired(h.cfg, corpus, pre, tmp.file("ft").c_str(), &tuned) == MMT_OK);
  CHECK(std::filesystem::exists(tmp.file("ft") + "/checkpoint.json"));

  mmt_checkpoint_free(paired);
  mmt_checkpoint_free(pre);
  mmt_checkpoint_free(tuned);
  mmt_text_corpus_free(texts);
  mmt_corpus_free(corpus);
}

TEST_CASE("gradcheck over the C surface reports and enforces") {
  char* report = nullptr;
  CHECK(mmt_gradcheck("biam", 1, nullptr, &report) == MMT_OK);
  REQUIRE(report != nullptr);
  CHECK(std::string(report).find("biam.backward") != std::string::npos);
  mmt_string_free(report);

  char* bad = nullptr;
  CHECK(mmt_gradcheck("biam", 1, "biam.backward", &bad) == MMT_ERROR_NUMERIC);
  REQUIRE(bad != nullptr);
  CHECK(std::string(bad).find("FAIL biam.backward") != std::string::npos);
  mmt_string_free(bad);

  CHECK(mmt_gradcheck("martian", 1, nullptr, nullptr) == MMT_ERROR_USAGE);
}
