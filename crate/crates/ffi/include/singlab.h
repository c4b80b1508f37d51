#ifndef SINGLAB_H
#define SINGLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SinglabStatus {
  SINGLAB_STATUS_OK = 0,
  SINGLAB_STATUS_NULL_POINTER = 1,
  SINGLAB_STATUS_INVALID_UTF8 = 2,
  SINGLAB_STATUS_PARSE = 3,
  SINGLAB_STATUS_NOT_ISOLATED = 4,
  SINGLAB_STATUS_UNSUPPORTED = 5,
  SINGLAB_STATUS_REJECTED = 6,
  SINGLAB_STATUS_GCD_NOT_ONE = 7,
  SINGLAB_STATUS_NOT_A_BRANCH = 8,
  SINGLAB_STATUS_BUDGET = 9,
  SINGLAB_STATUS_FAILED = 10,
  SINGLAB_STATUS_PANIC = 11,
} SinglabStatus;

/**
 * An analyzed germ together with its miniversal unfolding.
 */
typedef struct SinglabGerm SinglabGerm;

typedef struct SinglabSemigroup SinglabSemigroup;

/**
 * Message of the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next singlab call on this thread.
 */
const char *singlab_last_error(void);

/**
 * # Safety
 * `s` must come from a singlab function or be null.
 */
void singlab_string_free(char *s);

/**
 * Parses and analyzes `expr`; on success `*out` owns a new handle.
 *
 * # Safety
 * `expr` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SinglabStatus singlab_germ_analyze(const char *expr, struct SinglabGerm **out);

/**
 * # Safety
 * `germ` must be null or a handle from [`singlab_germ_analyze`] not yet freed.
 */
void singlab_germ_free(struct SinglabGerm *germ);

/**
 * # Safety
 * `germ` must be a live handle and `mu` a valid pointer.
 */
enum SinglabStatus singlab_germ_mu(const struct SinglabGerm *germ, size_t *mu);

/**
 * JSON record of the analysis and unfolding.
 *
 * # Safety
 * `germ` must be a live handle and `json` a valid pointer.
 */
enum SinglabStatus singlab_germ_report_json(const struct SinglabGerm *germ, char **json);

/**
 * Sets `*holds` to whether the jacobian/hessian identity holds exactly.
 *
 * # Safety
 * `germ` must be a live handle and `holds` a valid pointer.
 */
enum SinglabStatus singlab_germ_verify_identity(const struct SinglabGerm *germ, bool *holds);

/**
 * Runs a seeded degree-invariance scan with `samples` accepted samples
 * in the parameter box of radius `delta` (a rational such as `"1/2"`).
 *
 * # Safety
 * `germ` must be a live handle, `delta` a NUL-terminated string and
 * `alt_sum` a valid pointer.
 */
enum SinglabStatus singlab_germ_degree_scan(const struct SinglabGerm *germ,
                                            size_t samples,
                                            const char *delta,
                                            uint64_t seed,
                                            int64_t *alt_sum);

/**
 * Exact discriminant of a one-variable germ as text.
 *
 * # Safety
 * `germ` must be a live handle and `out` a valid pointer.
 */
enum SinglabStatus singlab_germ_discriminant(const struct SinglabGerm *germ, char **out);

/**
 * # Safety
 * `gens` must point to `len` readable values and `out` be a valid pointer.
 */
enum SinglabStatus singlab_semigroup_new(const uint64_t *gens,
                                         size_t len,
                                         struct SinglabSemigroup **out);

/**
 * Value semigroup of a branch given as `"x(t), y(t)"`.
 *
 * # Safety
 * `branch` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SinglabStatus singlab_semigroup_from_branch(const char *branch, struct SinglabSemigroup **out);

/**
 * # Safety
 * `s` must be null or a handle not yet freed.
 */
void singlab_semigroup_free(struct SinglabSemigroup *s);

/**
 * # Safety
 * `s` must be a live handle and `conductor` a valid pointer.
 */
enum SinglabStatus singlab_semigroup_conductor(const struct SinglabSemigroup *s,
                                               uint64_t *conductor);

/**
 * Copies up to `cap` minimal generators into `buf` and stores their
 * total number in `*len`.
 *
 * # Safety
 * `buf` must have room for `cap` values (or `cap` be 0), `len` valid.
 */
enum SinglabStatus singlab_semigroup_generators(const struct SinglabSemigroup *s,
                                                uint64_t *buf,
                                                size_t cap,
                                                size_t *len);

/**
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
enum SinglabStatus singlab_semigroup_contains(const struct SinglabSemigroup *s,
                                              uint64_t x,
                                              bool *out);

/**
 * Resolution certificate `{cones, chart, a}` as JSON.
 *
 * # Safety
 * `s` must be a live handle and `json` a valid pointer.
 */
enum SinglabStatus singlab_semigroup_resolve_json(const struct SinglabSemigroup *s, char **json);

#endif  /* SINGLAB_H */
