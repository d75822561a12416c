#ifndef NCTORUS_H
#define NCTORUS_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NctStatus {
  NCT_STATUS_OK = 0,
  /**
   * A verification ran and found a counterexample.
   */
  NCT_STATUS_FAIL = 1,
  /**
   * Malformed arguments, config or algebra input.
   */
  NCT_STATUS_INPUT_ERROR = 2,
  NCT_STATUS_NULL_POINTER = 3,
  NCT_STATUS_PANIC = 4,
} NctStatus;

/**
 * Element of the Laurent polynomial algebra over a twist.
 */
typedef struct NctPoly NctPoly;

/**
 * Twist matrix θ of a quantum torus.
 */
typedef struct NctTwist NctTwist;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *nct_version(void);

/**
 * Copy of the last error message on this thread, or null if the last call
 * succeeded.
 */
char *nct_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void nct_string_free(char *s);

/**
 * Builds an `n × n` twist from its `n(n-1)/2` upper-triangle entries
 * `θ_{12}, θ_{13}, …, θ_{(n-1)n}`, given as rational strings like `"-1/3"`.
 *
 * # Safety
 * `upper` must point to `count` valid C strings; `out` must be writable.
 */
enum NctStatus nct_twist_new(size_t n,
                             const char *const *upper,
                             size_t count,
                             struct NctTwist **out_twist);

/**
 * # Safety
 * `t` must be null or a handle from [`nct_twist_new`], not yet freed.
 */
void nct_twist_free(struct NctTwist *t);

/**
 * The generator `u_k`, numbered from 1. Negative `k` gives `u_{|k|}*`.
 *
 * # Safety
 * `t` must be a live twist handle; `out_poly` must be writable.
 */
enum NctStatus nct_poly_generator(const struct NctTwist *t, int64_t k, struct NctPoly **out_poly);

/**
 * The unit of the algebra.
 *
 * # Safety
 * `t` must be a live twist handle; `out_poly` must be writable.
 */
enum NctStatus nct_poly_one(const struct NctTwist *t, struct NctPoly **out_poly);

/**
 * `a · b`. Both operands must share the same twist.
 *
 * # Safety
 * `a` and `b` must be live poly handles; `out_poly` must be writable.
 */
enum NctStatus nct_poly_mul(const struct NctPoly *a,
                            const struct NctPoly *b,
                            struct NctPoly **out_poly);

/**
 * `a + b`.
 *
 * # Safety
 * As for [`nct_poly_mul`].
 */
enum NctStatus nct_poly_add(const struct NctPoly *a,
                            const struct NctPoly *b,
                            struct NctPoly **out_poly);

/**
 * `a - b`.
 *
 * # Safety
 * As for [`nct_poly_mul`].
 */
enum NctStatus nct_poly_sub(const struct NctPoly *a,
                            const struct NctPoly *b,
                            struct NctPoly **out_poly);

/**
 * The adjoint `a*`.
 *
 * # Safety
 * `a` must be a live poly handle; `out_poly` must be writable.
 */
enum NctStatus nct_poly_star(const struct NctPoly *a, struct NctPoly **out_poly);

/**
 * Exact equality.
 *
 * # Safety
 * `a` and `b` must be live poly handles; `out_equal` must be writable.
 */
enum NctStatus nct_poly_equal(const struct NctPoly *a, const struct NctPoly *b, bool *out_equal);

/**
 * Normal-ordered text form, e.g. `q13^-1*u1 + 2*u2^-1`.
 *
 * # Safety
 * `a` must be a live poly handle; `out_str` must be writable. Free the
 * result with [`nct_string_free`].
 */
enum NctStatus nct_poly_to_string(const struct NctPoly *a, char **out_str);

/**
 * # Safety
 * `p` must be null or a poly handle from this library, not yet freed.
 */
void nct_poly_free(struct NctPoly *p);

/**
 * Runs `check-factor-system`, `lift`, `lift-derivation` or `curvature` on
 * a JSON config and writes the JSON report to `out_report` (also on
 * `Fail` and `InputError`). Negative `range` or `degree` selects the
 * default.
 *
 * # Safety
 * `command` and `config_json` must be valid C strings; `out_report` must
 * be writable. Free the report with [`nct_string_free`].
 */
enum NctStatus nct_run(const char *command,
                       const char *config_json,
                       int64_t range,
                       int64_t degree,
                       uint64_t seed,
                       char **out_report);

/**
 * The worked three-torus example. `theta` is `"t12,t13,t23"` or null for
 * the default `1/4,-1/3,-1/6`.
 *
 * # Safety
 * `theta` must be null or a valid C string; `out_report` must be
 * writable. Free the report with [`nct_string_free`].
 */
enum NctStatus nct_demo_q3torus(const char *theta, int64_t range, char **out_report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NCTORUS_H */
