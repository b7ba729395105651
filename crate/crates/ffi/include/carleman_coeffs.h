#ifndef CARLEMAN_COEFFS_H
#define CARLEMAN_COEFFS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CarlemanStatus {
  CARLEMAN_STATUS_OK = 0,
  CARLEMAN_STATUS_NULL_POINTER = 1,
  CARLEMAN_STATUS_INVALID_ARGUMENT = 2,
  CARLEMAN_STATUS_OUT_OF_RANGE = 3,
  CARLEMAN_STATUS_NOT_CONVERGED = 4,
  CARLEMAN_STATUS_BUFFER_TOO_SMALL = 5,
  CARLEMAN_STATUS_PARSE = 6,
  CARLEMAN_STATUS_IO = 7,
  CARLEMAN_STATUS_INTERNAL = 8,
} CarlemanStatus;

/**
 * Opaque table of exact coefficients b_1..b_N.
 */
typedef struct CarlemanTable CarlemanTable;

typedef struct CarlemanQuadResult {
  double value;
  double error_estimate;
  uint32_t levels_used;
  bool converged;
} CarlemanQuadResult;

typedef struct CarlemanGap {
  /**
   * `(1 + 1/x)^x`
   */
  double compound;
  /**
   * `e * F_m(x)`
   */
  double weighted_e;
  double gap;
  double tail_bound;
} CarlemanGap;

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call into this library on the same thread.
 */
const char *carleman_last_error_message(void);

/**
 * Builds b_1..b_max_n with the exact recurrence. Free with `carleman_table_free`.
 *
 * # Safety
 * `out_table` must be null or valid for writes.
 */
enum CarlemanStatus carleman_table_new(size_t max_n, struct CarlemanTable **out_table);

/**
 * # Safety
 * `table` must be null or come from `carleman_table_new`, and not be freed twice.
 */
void carleman_table_free(struct CarlemanTable *table);

/**
 * # Safety
 * Pointers must be null or valid.
 */
enum CarlemanStatus carleman_table_len(const struct CarlemanTable *table, size_t *out_len);

/**
 * b_n as the nearest double, 1-based.
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum CarlemanStatus carleman_coefficient_f64(const struct CarlemanTable *table,
                                             size_t n,
                                             double *out_value);

/**
 * b_n as a NUL-terminated "p/q" string. `out_needed` (optional) receives the
 * buffer size required including the terminator; if `capacity` is smaller,
 * nothing is written to `buf` and `BUFFER_TOO_SMALL` is returned.
 *
 * # Safety
 * `buf` must be valid for `capacity` bytes; other pointers null or valid.
 */
enum CarlemanStatus carleman_coefficient_exact(const struct CarlemanTable *table,
                                               size_t n,
                                               char *buf,
                                               size_t capacity,
                                               size_t *out_needed);

/**
 * g(s) on [0, 1].
 *
 * # Safety
 * `out_value` must be null or valid.
 */
enum CarlemanStatus carleman_g(double s, double *out_value);

/**
 * h(s) on [0, 1].
 *
 * # Safety
 * `out_value` must be null or valid.
 */
enum CarlemanStatus carleman_h(double s, double *out_value);

/**
 * f(x) = (x + 1)(e - (1 + 1/x)^x) for x > 0.
 *
 * # Safety
 * `out_value` must be null or valid.
 */
enum CarlemanStatus carleman_f_closed(double x, double *out_value);

/**
 * b_n (n >= 2) from the g-moment integral. On `NOT_CONVERGED` the result
 * still holds the best estimate.
 *
 * # Safety
 * `out_result` must be null or valid.
 */
enum CarlemanStatus carleman_b_quad_g(size_t n, double tol, struct CarlemanQuadResult *out_result);

/**
 * b_n (n >= 2) from the integrated-by-parts h form.
 *
 * # Safety
 * `out_result` must be null or valid.
 */
enum CarlemanStatus carleman_b_quad_h(size_t n, double tol, struct CarlemanQuadResult *out_result);

/**
 * n ∫ s^n h(s) ds, which tends to h(1) = -1.
 *
 * # Safety
 * `out_result` must be null or valid.
 */
enum CarlemanStatus carleman_lemma2(size_t n, double tol, struct CarlemanQuadResult *out_result);

/**
 * F_m(x) = 1 - Σ_{k<=m} b_k/(x+1)^k and its gap against (1 + 1/x)^x.
 * Either out pointer may be null.
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum CarlemanStatus carleman_refinement_factor(const struct CarlemanTable *table,
                                               double x,
                                               size_t terms,
                                               double *out_factor,
                                               struct CarlemanGap *out_gap);

/**
 * Runs the full verification suite and returns the JSON report in
 * `*out_json` (free with `carleman_string_free`). `out_exit_code` (optional)
 * receives 0 if every check passed, 1 otherwise.
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum CarlemanStatus carleman_verify_json(size_t max_n,
                                         size_t quad_max,
                                         double tol,
                                         char **out_json,
                                         int32_t *out_exit_code);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void carleman_string_free(char *s);

/**
 * Library version as a static NUL-terminated string.
 */
const char *carleman_version(void);

#endif  /* CARLEMAN_COEFFS_H */
