/* C interface to the mgsheaf moment graph toolkit. */

#ifndef MGSHEAF_H
#define MGSHEAF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; identical to the CLI exit codes.
 */
typedef enum MgStatus {
  MG_STATUS_OK = 0,
  MG_STATUS_CHECK_FAILED = 1,
  MG_STATUS_INPUT_ERROR = 2,
  MG_STATUS_UNCERTIFIED = 3,
} MgStatus;

/**
 * A completed construction/verification run.
 */
typedef struct MgRun MgRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread. Borrowed; valid until
 * the next failing call on the same thread.
 */
const char *mg_last_error(void);

/**
 * Run the construction and the selected checks.
 *
 * `checks` is a comma list ("conjMC,mainT,flabby,strucZ,smB,deodhar");
 * NULL runs all of them. `max_degree < 0` uses the default bound l(w).
 * On success `*out` owns the run. A run whose checks failed still
 * returns a handle, with status `CHECK_FAILED`.
 *
 * # Safety
 * String arguments must be NUL-terminated C strings or NULL where
 * documented; `out` must point to writable storage for one pointer.
 */
enum MgStatus mg_run_new(const char *cartan_type,
                         bool affine,
                         const char *word,
                         const char *field,
                         int max_degree,
                         const char *checks,
                         struct MgRun **out);

/**
 * The JSON report of a run. Borrowed from the handle.
 *
 * # Safety
 * `run` must be a live handle from [`mg_run_new`].
 */
const char *mg_run_json(const struct MgRun *run);

/**
 * Verdict string of one named check ("pass", "fail", "skipped(...)"), or
 * NULL for an unknown name. Borrowed from the handle.
 *
 * # Safety
 * `run` must be a live handle; `name` a NUL-terminated string.
 */
const char *mg_run_check(const struct MgRun *run, const char *name);

/**
 * Newline-separated failure details (empty string when everything
 * passed). Borrowed from the handle.
 *
 * # Safety
 * `run` must be a live handle.
 */
const char *mg_run_failures(const struct MgRun *run);

/**
 * Status the run finished with.
 *
 * # Safety
 * `run` must be a live handle.
 */
enum MgStatus mg_run_status(const struct MgRun *run);

/**
 * Release a run handle. NULL is ignored.
 *
 * # Safety
 * `run` must be NULL or a handle not freed before; it is invalid after.
 */
void mg_run_free(struct MgRun *run);

/**
 * Kazhdan-Lusztig table of the interval below `word` as TSV
 * ("x\tw\tc0,c1,..."). The returned string is owned by the caller; free
 * with [`mg_string_free`]. NULL on error.
 *
 * # Safety
 * String arguments as in [`mg_run_new`].
 */
char *mg_kl_tsv(const char *cartan_type, bool affine, const char *word);

/**
 * DOT rendering of the moment graph. Owned by the caller; free with
 * [`mg_string_free`]. NULL on error (including zero labels over F_p).
 *
 * # Safety
 * String arguments as in [`mg_run_new`].
 */
char *mg_graph_dot(const char *cartan_type, bool affine, const char *word, const char *field);

/**
 * Release a string returned as `*mut c_char`. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or an owned string from this library, freed once.
 */
void mg_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* MGSHEAF_H */
