/*
 * mmt — speech-text multi-modal training with a bidirectional attention
 * mechanism, desk scale.
 *
 * C interface of the shared library. All objects are opaque handles owned
 * by the library; every fallible call returns an mmt_status and leaves a
 * human-readable message in mmt_last_error() on failure. Strings returned
 * as char* are malloc'd by the library and must be released with
 * mmt_string_free().
 */
#ifndef MMT_H
#define MMT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mmt_status {
  MMT_OK = 0,
  MMT_ERROR_USAGE = 1,   /* bad arguments, unknown keys, misuse */
  MMT_ERROR_DATA = 2,    /* unreadable or inconsistent data */
  MMT_ERROR_NUMERIC = 3  /* non-finite losses, failed gradient checks */
} mmt_status;

typedef struct mmt_config mmt_config;
typedef struct mmt_corpus mmt_corpus;           /* paired utterances */
typedef struct mmt_text_corpus mmt_text_corpus; /* grapheme sequences only */
typedef struct mmt_checkpoint mmt_checkpoint;

typedef struct mmt_eval_result {
  double cer;
  double mean_monotonicity;
  double asr_ctc;
  double asr_attention;
  double cd;
  double mlm;
  double gctc;
  double total;
} mmt_eval_result;

const char* mmt_version(void);

/* Message of the most recent failing call on this thread. */
const char* mmt_last_error(void);

void mmt_string_free(char* s);

/* ----- configuration ---------------------------------------------------- */

/* A config starts from the library defaults. JSON documents and dotted
 * "section.key" overrides are merged on top; unknown keys are rejected. */
mmt_config* mmt_config_create(void);
void mmt_config_free(mmt_config* cfg);
mmt_status mmt_config_load_json(mmt_config* cfg, const char* json_text);
mmt_status mmt_config_set(mmt_config* cfg, const char* dotted_key, const char* value);
char* mmt_config_dump(const mmt_config* cfg); /* effective config as JSON */

/* ----- corpora ----------------------------------------------------------- */

mmt_status mmt_corpus_generate(const mmt_config* cfg, mmt_corpus** out);
mmt_status mmt_corpus_load(const mmt_config* cfg, const char* path, mmt_corpus** out);
mmt_status mmt_corpus_save(const mmt_corpus* corpus, const char* path);
size_t mmt_corpus_size(const mmt_corpus* corpus);
void mmt_corpus_free(mmt_corpus* corpus);

mmt_status mmt_text_corpus_generate(const mmt_config* cfg, mmt_text_corpus** out);
size_t mmt_text_corpus_size(const mmt_text_corpus* corpus);
void mmt_text_corpus_free(mmt_text_corpus* corpus);

/* ----- training stages --------------------------------------------------- */

/* Each stage writes config.json, metrics.csv and checkpoint.json into
 * run_dir (created on demand) unless run_dir is NULL. */
mmt_status mmt_train_paired(const mmt_config* cfg, const mmt_corpus* corpus,
                            const char* run_dir, mmt_checkpoint** out);
mmt_status mmt_pretrain_text(const mmt_config* cfg, const mmt_text_corpus* texts,
                             const mmt_checkpoint* start, const char* run_dir,
                             mmt_checkpoint** out);
mmt_status mmt_finetune_paired(const mmt_config* cfg, const mmt_corpus* corpus,
                               const mmt_checkpoint* start, const char* run_dir,
                               mmt_checkpoint** out);

/* split: "all", "train" or "heldout" (the trailing fraction never trained
 * on). Writes eval.json into run_dir unless run_dir is NULL. */
mmt_status mmt_evaluate(const mmt_config* cfg, const mmt_corpus* corpus,
                        const mmt_checkpoint* ckpt, const char* split, const char* run_dir,
                        mmt_eval_result* out);

mmt_status mmt_checkpoint_save(const mmt_checkpoint* ckpt, const char* path);
mmt_status mmt_checkpoint_load(const char* path, mmt_checkpoint** out);
void mmt_checkpoint_free(mmt_checkpoint* ckpt);

/* ----- verification and inspection --------------------------------------- */

/* Runs the finite-difference oracle against every analytic gradient in
 * scope ("all" or a module prefix). Returns MMT_ERROR_NUMERIC when any
 * gradient exceeds the contract. corrupt_op (may be NULL) deliberately
 * breaks one op's gradient so callers can verify the check itself. */
mmt_status mmt_gradcheck(const char* scope, uint64_t seed, const char* corrupt_op,
                         char** report_out);

/* Writes <out_prefix>.w12.csv and <out_prefix>.w12.pgm for one utterance. */
mmt_status mmt_export_alignment(const mmt_checkpoint* ckpt, const mmt_corpus* corpus,
                                const char* utterance_id, const char* out_prefix);

#ifdef __cplusplus
}
#endif

#endif /* MMT_H */
