/*
 * hexatag: projective dependency parsing as hexatag sequence labeling.
 *
 * C interface to libhexatag. All objects are opaque handles released with
 * the matching *_free function. Functions that can fail return a
 * hexa_status; on failure hexa_last_error() describes the problem for the
 * calling thread. Strings returned through char** out-parameters are
 * heap-allocated and must be released with hexa_string_free.
 *
 * Word indices are 1-based; head 0 denotes the virtual root. Score
 * matrices cross the interface as contiguous row-major doubles.
 */
#ifndef HEXATAG_HEXATAG_H_
#define HEXATAG_HEXATAG_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HEXA_API __declspec(dllexport)
#else
#define HEXA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hexa_status {
  HEXA_OK = 0,
  HEXA_E_ARGUMENT = 1,       /* bad argument or shape mismatch */
  HEXA_E_PARSE = 2,          /* malformed CoNLL-U, tag text, JSON */
  HEXA_E_STRUCTURE = 3,      /* not a single-rooted tree */
  HEXA_E_NONPROJECTIVE = 4,  /* tree has crossing arcs */
  HEXA_E_TRANSITION = 5,     /* tag sequence is not valid */
  HEXA_E_DECODE = 6,         /* no valid sequence under the depth cap */
  HEXA_E_IO = 7,
  HEXA_E_MODEL_FORMAT = 8,   /* corrupt or wrong-version model file */
  HEXA_E_ALIGNMENT = 9,      /* gold and predicted corpora differ */
  HEXA_E_INTERNAL = 10
} hexa_status;

typedef enum hexa_order {
  HEXA_ORDER_LEFT_FIRST = 0,
  HEXA_ORDER_RIGHT_FIRST = 1
} hexa_order;

typedef enum hexa_punct {
  HEXA_PUNCT_UPOS = 0,    /* exclude gold UPOS == PUNCT */
  HEXA_PUNCT_DEPREL = 1,  /* exclude gold DEPREL == punct */
  HEXA_PUNCT_NONE = 2
} hexa_punct;

typedef struct hexa_corpus hexa_corpus;
typedef struct hexa_vocab hexa_vocab;
typedef struct hexa_model hexa_model;
typedef struct hexa_parse hexa_parse;

HEXA_API const char *hexa_version(void);
HEXA_API const char *hexa_last_error(void);
HEXA_API void hexa_string_free(char *s);

/* ---- Treebanks (CoNLL-U) ---- */

HEXA_API hexa_status hexa_corpus_parse(const char *text, size_t length,
                                       hexa_corpus **out);
HEXA_API hexa_status hexa_corpus_read(const char *path, hexa_corpus **out);
HEXA_API void hexa_corpus_free(hexa_corpus *corpus);
HEXA_API size_t hexa_corpus_size(const hexa_corpus *corpus);
HEXA_API size_t hexa_corpus_sentence_length(const hexa_corpus *corpus,
                                            size_t sentence);
HEXA_API hexa_status hexa_corpus_write(const hexa_corpus *corpus, char **out);

/* ---- Encoding and tag sequences ---- */

/* Space-separated tags for one sentence (0-based sentence index). */
HEXA_API hexa_status hexa_encode(const hexa_corpus *corpus, size_t sentence,
                                 hexa_order order, int labeled, char **tags);
/* heads[i] is the head of word i+1. deprels may be NULL (unlabeled). */
HEXA_API hexa_status hexa_encode_heads(const int *heads,
                                       const char *const *deprels, size_t n,
                                       hexa_order order, int labeled,
                                       char **tags);
/* Encodes every sentence. tags_text gets one line per encoded sentence;
 * rejects_text one "sentence<TAB>reason" line per non-projective input. */
HEXA_API hexa_status hexa_encode_corpus(const hexa_corpus *corpus,
                                        hexa_order order, int labeled, int jobs,
                                        char **tags_text, char **rejects_text,
                                        size_t *rejected);
/* max_depth 0 means unbounded. */
HEXA_API hexa_status hexa_is_valid(const char *tags, size_t max_depth,
                                   int *valid);
/* Rebuilds a tree from one tag line. forms may be NULL. */
HEXA_API hexa_status hexa_decode_tags(const char *tags,
                                      const char *const *forms,
                                      size_t n_forms, hexa_parse **out);

/* ---- Tag vocabularies (one tag per line, line number = id) ---- */

HEXA_API hexa_status hexa_vocab_unlabeled(hexa_vocab **out);
HEXA_API hexa_status hexa_vocab_from_corpus(const hexa_corpus *corpus,
                                            int labeled, hexa_vocab **out);
HEXA_API hexa_status hexa_vocab_parse(const char *text, size_t length,
                                      hexa_vocab **out);
HEXA_API hexa_status hexa_vocab_write(const hexa_vocab *vocab, char **out);
HEXA_API size_t hexa_vocab_terminal_count(const hexa_vocab *vocab);
HEXA_API void hexa_vocab_free(hexa_vocab *vocab);

/* ---- Decoding ---- */

/* Highest-scoring valid tag sequence for n words. terminal_scores is
 * n x terminal_cols, nonterminal_scores is (n-1) x nonterminal_cols, both
 * row-major; columns follow the vocabulary's terminal / nonterminal order.
 * tokens may be NULL. max_depth 0 decodes exactly. */
HEXA_API hexa_status hexa_decode_scores(const hexa_vocab *vocab,
                                        const char *const *tokens, size_t n,
                                        const double *terminal_scores,
                                        size_t terminal_cols,
                                        const double *nonterminal_scores,
                                        size_t nonterminal_cols,
                                        size_t max_depth, hexa_parse **out);
/* Decodes a JSON Lines score file into a corpus (input order kept). */
HEXA_API hexa_status hexa_decode_score_jsonl(const hexa_vocab *vocab,
                                             const char *text, size_t length,
                                             size_t max_depth, int jobs,
                                             hexa_corpus **out);

HEXA_API size_t hexa_parse_length(const hexa_parse *parse);
HEXA_API int hexa_parse_head(const hexa_parse *parse, size_t word);
HEXA_API const char *hexa_parse_deprel(const hexa_parse *parse, size_t word);
HEXA_API double hexa_parse_log_score(const hexa_parse *parse);
HEXA_API const char *hexa_parse_tags(const hexa_parse *parse);
HEXA_API hexa_status hexa_parse_to_conllu(const hexa_parse *parse, char **out);
HEXA_API void hexa_parse_free(hexa_parse *parse);

/* ---- Linear tagger ---- */

typedef struct hexa_train_config {
  int epochs;
  double learning_rate;
  double l2;
  uint64_t seed;
  int shuffle;
  int labeled;
  hexa_order order;
  int use_upos;
  int batch_size;
  int strict; /* fail on non-projective sentences instead of skipping */
} hexa_train_config;

HEXA_API void hexa_train_config_init(hexa_train_config *config);
HEXA_API hexa_status hexa_model_train(const hexa_corpus *corpus,
                                      const hexa_train_config *config,
                                      hexa_model **out);
HEXA_API hexa_status hexa_model_save(const hexa_model *model, const char *path);
HEXA_API hexa_status hexa_model_load(const char *path, hexa_model **out);
HEXA_API void hexa_model_free(hexa_model *model);
/* Mean loss per tag position; index 0 is before training. */
HEXA_API size_t hexa_model_loss_count(const hexa_model *model);
HEXA_API double hexa_model_loss(const hexa_model *model, size_t epoch);
HEXA_API size_t hexa_model_skipped(const hexa_model *model);
HEXA_API hexa_status hexa_model_vocab(const hexa_model *model, char **vocab_text);
HEXA_API hexa_status hexa_model_predict(const hexa_model *model,
                                        const hexa_corpus *corpus,
                                        size_t max_depth, int jobs,
                                        hexa_corpus **out);
HEXA_API hexa_status hexa_model_export_scores(const hexa_model *model,
                                              const hexa_corpus *corpus,
                                              char **jsonl);

/* ---- Evaluation ---- */

typedef struct hexa_eval_summary {
  double uas;
  double las;
  size_t counted;
  size_t excluded;
} hexa_eval_summary;

/* text and json may be NULL. */
HEXA_API hexa_status hexa_evaluate(const hexa_corpus *gold,
                                   const hexa_corpus *pred, hexa_punct policy,
                                   hexa_eval_summary *summary, char **text,
                                   char **json);

/* ---- Verification and benchmarking ---- */

typedef struct hexa_verify_summary {
  size_t verified;
  size_t rejected;
  size_t mismatched;
} hexa_verify_summary;

/* report lists rejects and round-trip mismatches; may be NULL. */
HEXA_API hexa_status hexa_verify(const hexa_corpus *corpus, hexa_order order,
                                 int jobs, hexa_verify_summary *summary,
                                 char **report);

/* Decoding throughput on synthetic score tables; writes a JSON report. */
HEXA_API hexa_status hexa_bench(const int *lengths, size_t count, int batch,
                                int runs, uint64_t seed, size_t max_depth,
                                char **json);

/* Depth cap the command-line tools use by default. */
HEXA_API size_t hexa_default_depth_cap(void);

#ifdef __cplusplus
}
#endif

#endif /* HEXATAG_HEXATAG_H_ */
