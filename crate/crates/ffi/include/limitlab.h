#ifndef LIMITLAB_H
#define LIMITLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum LlStatus {
  LL_STATUS_OK = 0,
  LL_STATUS_NULL_POINTER = 1,
  LL_STATUS_INVALID_ARGUMENT = 2,
  LL_STATUS_CAPACITY = 3,
  LL_STATUS_PARSE = 4,
  LL_STATUS_DOMAIN = 5,
  LL_STATUS_UNSUPPORTED = 6,
  LL_STATUS_INTERNAL = 7,
} LlStatus;

/**
 * Arithmetic used for the masses of a measure.
 */
typedef enum LlMode {
  LL_MODE_EXACT = 0,
  LL_MODE_FLOAT = 1,
} LlMode;

/**
 * A finite union of intervals on the extended line.
 */
typedef struct LlEvent LlEvent;

/**
 * A measure family such as `record_index` with its parameters.
 */
typedef struct LlFamily LlFamily;

/**
 * A finitely supported probability measure.
 */
typedef struct LlMeasure LlMeasure;

/**
 * A digit prefix and the half-open interval it fixes.
 */
typedef struct LlPrefix LlPrefix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; do not free.
 */
const char *ll_version(void);

/**
 * Message of the last failed call on this thread, or NULL. Free with
 * [`ll_string_free`].
 */
char *ll_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void ll_string_free(char *s);

/**
 * Creates a family by registry name with a JSON parameter object such as
 * `{"q": "1/2"}`. `params_json` may be NULL for families without parameters.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be writable.
 */
enum LlStatus ll_family_new(const char *name, const char *params_json, struct LlFamily **out);

/**
 * # Safety
 * `family` must come from [`ll_family_new`] or be NULL.
 */
void ll_family_free(struct LlFamily *family);

/**
 * The `n`-th measure of a family (`n ≥ 1`).
 *
 * # Safety
 * `family` must be a live handle; `out` must be writable.
 */
enum LlStatus ll_family_measure(const struct LlFamily *family,
                                uint64_t n,
                                enum LlMode mode,
                                struct LlMeasure **out);

/**
 * Reads a measure from its JSON form; the `mode` field picks the arithmetic.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` must be writable.
 */
enum LlStatus ll_measure_from_json(const char *json, struct LlMeasure **out);

/**
 * JSON form of a measure. Free the string with [`ll_string_free`].
 *
 * # Safety
 * `measure` must be a live handle; `out` must be writable.
 */
enum LlStatus ll_measure_to_json(const struct LlMeasure *measure, char **out);

/**
 * # Safety
 * `measure` must come from this library or be NULL.
 */
void ll_measure_free(struct LlMeasure *measure);

/**
 * Number of atoms with positive mass.
 *
 * # Safety
 * `measure` must be a live handle; `out` must be writable.
 */
enum LlStatus ll_measure_atom_count(const struct LlMeasure *measure, size_t *out);

/**
 * Mass of an event, as a double.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum LlStatus ll_measure_of_event(const struct LlMeasure *measure,
                                  const struct LlEvent *event,
                                  double *out);

/**
 * Total variation distance. Summed in rationals when both measures are
 * exact and rounded once at the end; otherwise summed in floating point.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum LlStatus ll_tv_distance(const struct LlMeasure *a, const struct LlMeasure *b, double *out);

/**
 * Parses event syntax such as `"(-inf,3)"`, `"{5}"` or `"[0,1) u {4}"`.
 *
 * # Safety
 * `text` must be NUL-terminated; `out` must be writable.
 */
enum LlStatus ll_event_parse(const char *text, struct LlEvent **out);

/**
 * # Safety
 * `event` must come from [`ll_event_parse`] or be NULL.
 */
void ll_event_free(struct LlEvent *event);

/**
 * Membership of a point given as text (`"1/2"`, `"-3"`, `"+inf"`).
 *
 * # Safety
 * `event` must be live; `point` NUL-terminated; `out` writable.
 */
enum LlStatus ll_event_contains(const struct LlEvent *event, const char *point, bool *out);

/**
 * Parses a decimal digit prefix such as `"0.141"`.
 *
 * # Safety
 * `text` must be NUL-terminated; `out` must be writable.
 */
enum LlStatus ll_prefix_parse(const char *text, struct LlPrefix **out);

/**
 * # Safety
 * `prefix` must come from [`ll_prefix_parse`] or be NULL.
 */
void ll_prefix_free(struct LlPrefix *prefix);

/**
 * Exact endpoints of `[lo, hi)` as strings. Free both with
 * [`ll_string_free`].
 *
 * # Safety
 * `prefix` must be live; both out-pointers writable.
 */
enum LlStatus ll_prefix_bounds(const struct LlPrefix *prefix, char **lo, char **hi);

/**
 * Range `(lo, hi]` of `cos²θ` over the prefix's interval, in radians.
 *
 * # Safety
 * `prefix` must be live; both out-pointers writable.
 */
enum LlStatus ll_prefix_transmission_range(const struct LlPrefix *prefix, double *lo, double *hi);

/**
 * `λₙ({0}) − γₙ({0}) − μₙ((−∞, n))` as an exact rational string. With
 * `enumerate` set both sides come from enumerating all trial strings
 * (`n ≤ 20`), otherwise from the closed forms.
 *
 * # Safety
 * `q` must be NUL-terminated; `out` writable.
 */
enum LlStatus ll_identity_residual(const char *q, uint64_t n, bool enumerate, char **out);

/**
 * Runs a report command (`"oracle"`, `"example ex2"`, …) with a JSON
 * configuration such as `{"q": "1/2", "N": 200}` (NULL for defaults) and
 * returns the versioned JSON envelope.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` writable.
 */
enum LlStatus ll_report_json(const char *command, const char *config_json, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LIMITLAB_H */
