#ifndef TOP_NLIDB_H
#define TOP_NLIDB_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Print the TOP formula of each reading.
 */
#define TOP_SHOW_TOP 1

/**
 * Print the generated TSQL2 text of each reading.
 */
#define TOP_SHOW_TSQL2 2

/**
 * Evaluate each reading on both paths and report divergences.
 */
#define TOP_CHECK 4

/**
 * Answer only the first reading.
 */
#define TOP_FIRST_READING 8

/**
 * Result of every fallible call.
 */
typedef enum TopStatus {
  TOP_STATUS_OK = 0,
  TOP_STATUS_NULL_ARGUMENT = 1,
  TOP_STATUS_INVALID_UTF8 = 2,
  /**
   * The database or lexicon text could not be loaded.
   */
  TOP_STATUS_LOAD_ERROR = 3,
  /**
   * The speech time is not on the database axis.
   */
  TOP_STATUS_CONFIG_ERROR = 4,
  /**
   * At least one question could not be answered.
   */
  TOP_STATUS_QUESTION_ERROR = 5,
  /**
   * Check mode found answers that differ between the two paths.
   */
  TOP_STATUS_DIVERGENCE = 6,
  /**
   * An internal panic was caught at the boundary.
   */
  TOP_STATUS_PANIC = 7,
} TopStatus;

/**
 * Opaque session handle.
 */
typedef struct TopSession TopSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *top_last_error(void);

/**
 * Builds a session from database text, lexicon text and a speech time
 * (`D/M/YYYY` or `D/M/YYYY HH:MM`). `flags` combines the `TOP_*` option
 * bits. On success `*out` receives the new handle.
 *
 * # Safety
 * String arguments must be null or NUL-terminated; `out` must be null or
 * writable.
 */
enum TopStatus top_session_new(const char *database,
                               const char *lexicon,
                               const char *now,
                               uint32_t flags,
                               struct TopSession **out);

/**
 * Releases a session; null is ignored.
 *
 * # Safety
 * `session` must be null or a handle from `top_session_new` not yet freed.
 */
void top_session_free(struct TopSession *session);

/**
 * Answers one question. `*out` receives the answer lines (formula, query
 * text, answer and check lines as enabled), newline-terminated, even when
 * the status reports a question error or a divergence.
 *
 * # Safety
 * `session` must be a live handle; `question` a NUL-terminated string;
 * `out` writable.
 */
enum TopStatus top_session_ask(const struct TopSession *session, const char *question, char **out);

/**
 * Runs batch mode over newline-separated questions. `*out` receives the
 * full batch output. Questions that fail to parse are reported in the
 * text only. Divergences give `TOP_STATUS_DIVERGENCE`; evaluation errors
 * give `TOP_STATUS_QUESTION_ERROR`.
 *
 * # Safety
 * As for `top_session_ask`.
 */
enum TopStatus top_session_batch(const struct TopSession *session,
                                 const char *questions,
                                 char **out);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library, freed once.
 */
void top_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TOP_NLIDB_H */
