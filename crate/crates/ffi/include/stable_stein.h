#ifndef STABLE_STEIN_H
#define STABLE_STEIN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a call.
 */
typedef enum SsStatus {
  SS_STATUS_OK = 0,
  /**
   * A parameter is outside its domain.
   */
  SS_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Quadrature or another numerical routine failed.
   */
  SS_STATUS_NUMERIC_FAILURE = 2,
  /**
   * A required pointer was null.
   */
  SS_STATUS_NULL_POINTER = 3,
  /**
   * The requested amount of sampling exceeds the budget.
   */
  SS_STATUS_BUDGET_EXCEEDED = 4,
  /**
   * An internal panic was caught.
   */
  SS_STATUS_PANIC = 5,
} SsStatus;

/**
 * Which quantity [`ss_stein_eval`] returns.
 */
typedef enum SsSteinQuantity {
  SS_STEIN_QUANTITY_F = 0,
  SS_STEIN_QUANTITY_FPRIME = 1,
  SS_STEIN_QUANTITY_FSECOND = 2,
  /**
   * 𝒜f(y) - y f'(y)/α - g(y) + ν(g).
   */
  SS_STEIN_QUANTITY_RESIDUAL = 3,
} SsSteinQuantity;

/**
 * A law in the domain of normal attraction.
 */
typedef struct SsAttractionLaw SsAttractionLaw;

/**
 * The stable law S_α(σ, δ).
 */
typedef struct SsStableLaw SsStableLaw;

/**
 * Solution of the Stein equation for g(x) = (x - M)₊.
 */
typedef struct SsSteinSolution SsSteinSolution;

/**
 * Main constants and bounds; absent values are NaN.
 */
typedef struct SsBoundSummary {
  double eta1;
  double eta2;
  double eta3;
  double eta4;
  double rn;
  double c1;
  double c2m;
  double c3m;
  double uniform_bound;
  double nonuniform_bound;
} SsBoundSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null if none. The pointer stays valid
 * until the next failing call on the same thread.
 */
const char *ss_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ss_version(void);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ss_string_free(char *s);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum SsStatus ss_stable_new(double alpha, double sigma, double delta, struct SsStableLaw **out);

/**
 * # Safety
 * `h` must come from [`ss_stable_new`] and not have been freed.
 */
void ss_stable_free(struct SsStableLaw *h);

/**
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum SsStatus ss_stable_density(const struct SsStableLaw *h, double y, double *out);

/**
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum SsStatus ss_stable_cdf(const struct SsStableLaw *h, double y, double *out);

/**
 * E(Y - M)₊.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum SsStatus ss_stable_call(const struct SsStableLaw *h, double m, double *out);

/**
 * Characteristic function at λ.
 *
 * # Safety
 * `h` must be a live handle; `re` and `im` writable.
 */
enum SsStatus ss_stable_char_fn(const struct SsStableLaw *h, double lambda, double *re, double *im);

/**
 * Writes `n` seeded draws to `buf`.
 *
 * # Safety
 * `h` must be a live handle and `buf` valid for `n` writes.
 */
enum SsStatus ss_stable_sample(const struct SsStableLaw *h,
                               uintptr_t n,
                               uint64_t seed,
                               double *buf);

/**
 * Symmetric Pareto law with index α.
 *
 * # Safety
 * `out` must be writable.
 */
enum SsStatus ss_law_pareto(double alpha, struct SsAttractionLaw **out);

/**
 * Tails (1 ± δ)(A|x|^{-α} + b|x|^{-α-γ}).
 *
 * # Safety
 * `out` must be writable.
 */
enum SsStatus ss_law_power_tail(double alpha,
                                double a,
                                double delta,
                                double b,
                                double gamma,
                                struct SsAttractionLaw **out);

/**
 * # Safety
 * `h` must come from a law constructor and not have been freed.
 */
void ss_law_free(struct SsAttractionLaw *h);

/**
 * F_X(x).
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum SsStatus ss_law_cdf(const struct SsAttractionLaw *h, double x, double *out);

/**
 * Writes `paths` normalized sums S_n to `buf`.
 *
 * # Safety
 * `h` must be a live handle and `buf` valid for `paths` writes.
 */
enum SsStatus ss_law_sample_sn(const struct SsAttractionLaw *h,
                               uintptr_t n,
                               uintptr_t paths,
                               uint64_t seed,
                               double *buf);

/**
 * Bounds for sample size `n` and strike `m` (NaN for none).
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum SsStatus ss_bounds(const struct SsAttractionLaw *h,
                        double n,
                        double m,
                        struct SsBoundSummary *out);

/**
 * Full bound report as JSON; free with [`ss_string_free`].
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum SsStatus ss_bounds_json(const struct SsAttractionLaw *h, double n, double m, char **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum SsStatus ss_stein_call_new(double m, double alpha, double delta, struct SsSteinSolution **out);

/**
 * # Safety
 * `h` must come from [`ss_stein_call_new`] and not have been freed.
 */
void ss_stein_free(struct SsSteinSolution *h);

/**
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum SsStatus ss_stein_eval(const struct SsSteinSolution *h,
                            enum SsSteinQuantity what,
                            double y,
                            double *out);

/**
 * ν(g) = E(Y - M)₊.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum SsStatus ss_stein_nu(const struct SsSteinSolution *h, double *out);

/**
 * Copies the last error message into `buf` (truncated, NUL-terminated) and returns the
 * full message length, or 0 when there is none.
 *
 * # Safety
 * `buf` must be valid for `len` bytes, or null with `len` 0.
 */
uintptr_t ss_last_error_copy(char *buf, uintptr_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STABLE_STEIN_H */
