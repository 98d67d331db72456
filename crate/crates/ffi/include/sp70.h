#ifndef SP70_H
#define SP70_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum Sp70CostMode {
  SP70_COST_MODE_IDEAL = 0,
  SP70_COST_MODE_SFE = 1,
} Sp70CostMode;

typedef enum Sp70Status {
  SP70_STATUS_OK = 0,
  SP70_STATUS_NULL_POINTER = 1,
  SP70_STATUS_INVALID_ARGUMENT = 2,
  SP70_STATUS_INVALID_UTF8 = 3,
  SP70_STATUS_PARSE = 4,
  SP70_STATUS_DATA = 5,
  SP70_STATUS_IO = 6,
  SP70_STATUS_PANIC = 7,
} Sp70Status;

typedef enum Sp70Tokenization {
  SP70_TOKENIZATION_CHARS = 0,
  SP70_TOKENIZATION_TOKENS = 1,
} Sp70Tokenization;

// A parsed corpus.
typedef struct Sp70Corpus Sp70Corpus;

// The outcome of a run.
typedef struct Sp70Result Sp70Result;

// Run parameters. Start from [`sp70_params_default`].
typedef struct Sp70Params {
  size_t beam_width;
  size_t best_few;
  size_t max_cycles;
  size_t min_hit_len;
  size_t grammar_beam;
  size_t max_members_per_stage;
  // An [`Sp70CostMode`] value.
  uint32_t cost_mode;
  // 0 for no batching.
  size_t batch_size;
  // Non-positive for the default.
  double provisional_cost;
} Sp70Params;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. Valid until the next
// failing call on this thread.
const char *sp70_last_error(void);

struct Sp70Params sp70_params_default(void);

// Parse `text`, one pattern per line, into a new corpus. `tokenization`
// is an [`Sp70Tokenization`] value.
//
// # Safety
// `text` must be a valid NUL-terminated string and `out` a valid pointer.
enum Sp70Status sp70_corpus_parse(const char *text, uint32_t tokenization, struct Sp70Corpus **out);

// Number of patterns in the corpus; 0 for null.
//
// # Safety
// `corpus` must be null or a handle from [`sp70_corpus_parse`].
size_t sp70_corpus_len(const struct Sp70Corpus *corpus);

// # Safety
// `corpus` must be null or a handle from [`sp70_corpus_parse`] not yet freed.
void sp70_corpus_free(struct Sp70Corpus *corpus);

// Learn a grammar from `corpus`. `params` may be null for the defaults.
//
// # Safety
// `corpus` must be a live corpus handle, `params` null or valid, `out` valid.
enum Sp70Status sp70_run(const struct Sp70Corpus *corpus,
                         const struct Sp70Params *params,
                         struct Sp70Result **out);

// The tidied best grammar, one pattern per line. Free with [`sp70_string_free`].
//
// # Safety
// `result` must be a live result handle and `out` valid.
enum Sp70Status sp70_result_grammar(const struct Sp70Result *result, char **out);

// Per-stage metrics as CSV. Free with [`sp70_string_free`].
//
// # Safety
// `result` must be a live result handle and `out` valid.
enum Sp70Status sp70_result_metrics_csv(const struct Sp70Result *result, char **out);

// Sizes of the best grammar in bits and its member count. Any output
// pointer may be null.
//
// # Safety
// `result` must be a live result handle; non-null outputs must be valid.
enum Sp70Status sp70_result_scores(const struct Sp70Result *result,
                                   double *g,
                                   double *e,
                                   double *t,
                                   size_t *members);

// # Safety
// `result` must be null or a handle from [`sp70_run`] not yet freed.
void sp70_result_free(struct Sp70Result *result);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void sp70_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SP70_H */
