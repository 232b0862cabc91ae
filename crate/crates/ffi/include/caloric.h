#ifndef CALORIC_H
#define CALORIC_H

/* Generated by cbindgen from caloric-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum CaloricStatus {
  CALORIC_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  CALORIC_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  CALORIC_STATUS_INVALID_UTF8 = 2,
  /**
   * The domain description did not parse.
   */
  CALORIC_STATUS_PARSE_ERROR = 3,
  /**
   * Arguments were out of range for the routine.
   */
  CALORIC_STATUS_BAD_PARAMS = 4,
  /**
   * The computation ran but the checked condition failed.
   */
  CALORIC_STATUS_CHECK_FAILED = 5,
  /**
   * Internal failure (panic or unexpected error); see the last error.
   */
  CALORIC_STATUS_INTERNAL_ERROR = 6,
} CaloricStatus;

/**
 * Opaque handle to a constructed space-time domain.
 */
typedef struct CaloricDomain CaloricDomain;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread; copy it if you
 * need to keep it.
 */
const char *caloric_last_error(void);

/**
 * Library version as a static C string.
 */
const char *caloric_version(void);

/**
 * Build a domain from a TOML table such as
 * `kind = "half_space_slab"\nn = 1\nwidth = 2.0\nt_end = 1.0`.
 * On success writes a handle that must be released with
 * `caloric_domain_free`.
 *
 * # Safety
 * `text` must point to a NUL-terminated string and `out` to a writable
 * pointer slot.
 */
enum CaloricStatus caloric_domain_from_toml(const char *text, struct CaloricDomain **out);

/**
 * Release a handle from `caloric_domain_from_toml`. Null is a no-op.
 *
 * # Safety
 * `dom` must be a pointer returned by this library and not yet freed.
 */
void caloric_domain_free(struct CaloricDomain *dom);

/**
 * Spatial dimension of the domain, or -1 on a null handle.
 *
 * # Safety
 * `dom` must be a live handle or null.
 */
int caloric_domain_dim(const struct CaloricDomain *dom);

/**
 * 1 if the point `(x[0..dim], t)` lies in the open domain, 0 if not,
 * -1 on a null argument.
 *
 * # Safety
 * `x` must point to at least `caloric_domain_dim(dom)` doubles.
 */
int caloric_domain_contains(const struct CaloricDomain *dom, const double *x, double t);

/**
 * Parabolic distance from the point to the domain complement, written to
 * `out`.
 *
 * # Safety
 * `x` must point to at least `caloric_domain_dim(dom)` doubles and `out`
 * to a writable double.
 */
enum CaloricStatus caloric_domain_boundary_distance(const struct CaloricDomain *dom,
                                                    const double *x,
                                                    double t,
                                                    double *out);

/**
 * Sampled exterior-measure density over boundary cylinders: writes the
 * observed density floor theta0_hat to `out_theta0`. Returns `Ok` when
 * every sampled cylinder shows density above `theta_floor`, `CheckFailed`
 * (with theta0_hat still written) when some cylinder falls below it.
 *
 * # Safety
 * `dom` must be a live handle and `out_theta0` writable.
 */
enum CaloricStatus caloric_check_condition_a(const struct CaloricDomain *dom,
                                             size_t boundary_samples,
                                             size_t samples,
                                             double theta_floor,
                                             uint64_t seed,
                                             double *out_theta0);

/**
 * Volume of the heat ball of level `r` in dimension `n` (1..=3), written
 * to `out`.
 *
 * # Safety
 * `out` must be writable.
 */
enum CaloricStatus caloric_heat_ball_volume(size_t n, double r, double *out);

/**
 * Gauss-Weierstrass kernel evaluated at displacement `(x[0..n], t)`,
 * written to `out`; zero for t <= 0.
 *
 * # Safety
 * `x` must point to `n` doubles and `out` to a writable double.
 */
enum CaloricStatus caloric_heat_kernel(const double *x, size_t n, double t, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CALORIC_H */
