/*
 * C interface to the subtree-substitution augmentation library.
 *
 * Every function returns SUBS_OK (0) or a negative SUBS_ERROR_* code. After a
 * failure, subs_last_error() returns a positioned message for the calling
 * thread. Functions that produce text follow the buffer protocol: *out_len
 * holds the capacity of `out` on entry and the required size (including the
 * terminating NUL) on return; a too-small buffer yields
 * SUBS_ERROR_INSUFFICIENT_BUFFER and `out` may be NULL to query the size.
 */
#ifndef SUBS_SUBS_H_
#define SUBS_SUBS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SUBS_API __declspec(dllexport)
#else
#define SUBS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define SUBS_API_VERSION 1

enum subs_error {
  SUBS_OK = 0,
  SUBS_ERROR_INVALID_ARGUMENT = -1,
  SUBS_ERROR_PARSE = -2,
  SUBS_ERROR_SCHEMA = -3,
  SUBS_ERROR_EVALUATION = -4,
  SUBS_ERROR_DATA = -5,
  SUBS_ERROR_IO = -6,
  SUBS_ERROR_INSUFFICIENT_BUFFER = -7,
  SUBS_ERROR_NULL_POINTER = -8,
  SUBS_ERROR_INVALID_HANDLE = -9,
  SUBS_ERROR_INTERNAL = -99
};

#define SUBS_LOAD_STRICT 0x1u
/* Examples file is tab-separated "utterance<TAB>program". */
#define SUBS_LOAD_TSV 0x2u

enum subs_dedup_mode {
  SUBS_DEDUP_TRAIN_AND_SELF = 0,
  SUBS_DEDUP_SELF_ONLY = 1,
  SUBS_DEDUP_NONE = 2
};

enum subs_format { SUBS_FORMAT_TEXT = 0, SUBS_FORMAT_JSON = 1 };

typedef struct subs_domain_struct* subs_domain_t;
typedef struct subs_corpus_struct* subs_corpus_t;
typedef struct subs_augmented_struct* subs_augmented_t;

typedef struct subs_augment_options {
  size_t rounds;
  /* 0 keeps every result. */
  size_t max_output;
  uint64_t seed;
  int dedup_mode;
  int allow_same_example;
  size_t workers;
  /* Keep spliced span trees so subs_augmented_write_trees can emit them. */
  int keep_trees;
} subs_augment_options;

SUBS_API uint32_t subs_api_version(void);
SUBS_API const char* subs_error_description(int code);
SUBS_API int subs_last_error(char* out, size_t* out_len);

SUBS_API void subs_augment_options_init(subs_augment_options* opts);

/* Programs */
SUBS_API int subs_program_canonicalize(const char* text, char* out, size_t* out_len);
SUBS_API int subs_program_token_length(const char* text, size_t* length);

/* Domains */
SUBS_API int subs_domain_load(subs_domain_t* domain, const char* path);
SUBS_API int subs_domain_load_json(subs_domain_t* domain, const char* json_text);
SUBS_API int subs_domain_destroy(subs_domain_t domain);
SUBS_API int subs_domain_category(subs_domain_t domain, const char* program, char* out,
                                  size_t* out_len);

/* 64-bit FNV-1a over the canonical domain, the options and `extra`. Any of the
 * three may be NULL. */
SUBS_API int subs_fingerprint(subs_domain_t domain, const subs_augment_options* opts,
                              const char* extra, uint64_t* fingerprint);

/* Corpora. Examples whose tree fails validation are recorded in the report
 * and left out; with SUBS_LOAD_STRICT the first failure is an error. */
SUBS_API int subs_corpus_load(subs_corpus_t* corpus, subs_domain_t domain,
                              const char* examples_path, const char* trees_path, uint32_t flags);
SUBS_API int subs_corpus_destroy(subs_corpus_t corpus);
SUBS_API int subs_corpus_size(subs_corpus_t corpus, size_t* size);
SUBS_API int subs_corpus_failure_count(subs_corpus_t corpus, size_t* failures);
SUBS_API int subs_corpus_report(subs_corpus_t corpus, int format, char* out, size_t* out_len);

SUBS_API int subs_count_examples(const char* path, uint32_t flags, size_t* count);

/* Augmentation */
SUBS_API int subs_augment(subs_augmented_t* aug, subs_corpus_t corpus, subs_domain_t domain,
                          const subs_augment_options* opts);
SUBS_API int subs_augmented_load(subs_augmented_t* aug, const char* path);
SUBS_API int subs_augmented_destroy(subs_augmented_t aug);
SUBS_API int subs_augmented_count(subs_augmented_t aug, size_t* count);
SUBS_API int subs_augmented_write(subs_augmented_t aug, const char* path);
SUBS_API int subs_augmented_write_trees(subs_augmented_t aug, const char* path);
SUBS_API int subs_augmented_summary(subs_augmented_t aug, int format, char* out, size_t* out_len);

/* Statistics */
SUBS_API int subs_stats(subs_augmented_t aug, size_t n_train, int format, char* out,
                        size_t* out_len);
SUBS_API int subs_stats_write(subs_augmented_t aug, size_t n_train, const char* path);
SUBS_API int subs_coverage(subs_augmented_t aug, const char* test_path, uint32_t flags,
                           size_t* hits, size_t* total);

#ifdef __cplusplus
}
#endif

#endif /* SUBS_SUBS_H_ */
