#ifndef BURBEA_RAO_H
#define BURBEA_RAO_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum BrStatus {
  BR_STATUS_OK = 0,
  BR_STATUS_NULL_POINTER = 1,
  BR_STATUS_INVALID_ARGUMENT = 2,
  BR_STATUS_DOMAIN_ERROR = 3,
  BR_STATUS_SINGULAR_SYSTEM = 4,
  BR_STATUS_NOT_POSITIVE_DEFINITE = 5,
  BR_STATUS_NON_FINITE = 6,
  /**
   * The iteration budget ran out; any out-parameters still hold the last
   * iterate.
   */
  BR_STATUS_NOT_CONVERGED = 7,
  BR_STATUS_INTERNAL_ERROR = 8,
} BrStatus;

/**
 * Opaque exponential-family handle.
 */
typedef struct BrFamily BrFamily;

/**
 * Opaque strictly convex generator handle.
 */
typedef struct BrGenerator BrGenerator;

/**
 * Opaque parameter point (vector plus optional symmetric matrix block).
 */
typedef struct BrParam BrParam;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for the calling thread, or NULL when the previous call
 * succeeded. The pointer stays valid until the next failing call on the
 * same thread.
 */
const char *br_last_error_message(void);

/**
 * Quadratic generator F(x) = x'x over vectors of the given dimension.
 */
struct BrGenerator *br_generator_quadratic_identity(uintptr_t dim);

/**
 * Negative Shannon entropy F(x) = sum x_i log x_i on the non-negative
 * orthant.
 */
struct BrGenerator *br_generator_neg_shannon(uintptr_t dim);

/**
 * Extended negative entropy F(x) = sum (x_i log x_i - x_i).
 */
struct BrGenerator *br_generator_neg_shannon_extended(uintptr_t dim);

/**
 * Negative Renyi entropy of the given order in (0,1); NULL on a bad order.
 */
struct BrGenerator *br_generator_neg_renyi(uintptr_t dim, double order);

/**
 * # Safety
 * `gen` must be a pointer returned by a `br_generator_*` constructor, not
 * yet freed.
 */
void br_generator_free(struct BrGenerator *generator);

struct BrFamily *br_family_poisson(void);

struct BrFamily *br_family_gaussian(void);

/**
 * Single-trial multinomial with the given number of categories (>= 2);
 * NULL on a bad count.
 */
struct BrFamily *br_family_multinomial(uintptr_t categories);

/**
 * Multivariate Gaussian family of the given dimension (>= 1); NULL on 0.
 */
struct BrFamily *br_family_mv_gaussian(uintptr_t dim);

/**
 * The family's log-normalizer as a generator over natural parameters.
 *
 * # Safety
 * `family` must be a live pointer from a `br_family_*` constructor.
 */
struct BrGenerator *br_family_log_normalizer(const struct BrFamily *family);

/**
 * # Safety
 * `family` must be a pointer returned by a `br_family_*` constructor, not
 * yet freed.
 */
void br_family_free(struct BrFamily *family);

/**
 * Build a parameter point from a vector and an optional symmetric matrix
 * block (`mat` row-major `mat_dim` x `mat_dim`, or NULL for none). Returns
 * NULL when the matrix is not symmetric or an argument is malformed.
 *
 * # Safety
 * `vec` must point to `vec_len` doubles; `mat`, when non-NULL, to
 * `mat_dim * mat_dim` doubles.
 */
struct BrParam *br_param_new(const double *vec,
                             uintptr_t vec_len,
                             const double *mat,
                             uintptr_t mat_dim);

/**
 * # Safety
 * `param` must be a pointer returned by [`br_param_new`], not yet freed.
 */
void br_param_free(struct BrParam *param);

/**
 * Jensen gap (F(p)+F(q))/2 - F((p+q)/2).
 *
 * # Safety
 * All handles must be live pointers from this library; `out` must be
 * writable.
 */
enum BrStatus br_burbea_rao(const struct BrGenerator *generator,
                            const struct BrParam *p,
                            const struct BrParam *q,
                            double *out);

/**
 * Skew Jensen gap with alpha in (0,1).
 *
 * # Safety
 * As for [`br_burbea_rao`].
 */
enum BrStatus br_skew_burbea_rao(const struct BrGenerator *generator,
                                 const struct BrParam *p,
                                 const struct BrParam *q,
                                 double alpha,
                                 double *out);

/**
 * Skew Jensen gap divided by alpha(1-alpha); alpha may be any real outside
 * {0,1} whose combination stays inside the domain.
 *
 * # Safety
 * As for [`br_burbea_rao`].
 */
enum BrStatus br_scaled_skew_burbea_rao(const struct BrGenerator *generator,
                                        const struct BrParam *p,
                                        const struct BrParam *q,
                                        double alpha,
                                        double *out);

/**
 * Bregman divergence F(p) - F(q) - <p-q, grad F(q)>.
 *
 * # Safety
 * As for [`br_burbea_rao`].
 */
enum BrStatus br_bregman(const struct BrGenerator *generator,
                         const struct BrParam *p,
                         const struct BrParam *q,
                         double *out);

/**
 * Symmetrized Bregman divergence (B(p,q)+B(q,p))/2.
 *
 * # Safety
 * As for [`br_burbea_rao`].
 */
enum BrStatus br_jeffreys_bregman(const struct BrGenerator *generator,
                                  const struct BrParam *p,
                                  const struct BrParam *q,
                                  double *out);

/**
 * Population diversity sum w_i F(p_i) - F(sum w_i p_i) over `n` points.
 *
 * # Safety
 * `points` must hold `n` live parameter handles and `weights` `n` doubles.
 */
enum BrStatus br_population_diversity(const struct BrGenerator *generator,
                                      const struct BrParam *const *points,
                                      const double *weights,
                                      uintptr_t n,
                                      double *out);

/**
 * Evaluate bhattacharyya, hellinger, kl, and the Chernoff coefficient at
 * `alpha` between two JSON source parameters; writes 4 doubles in that
 * order.
 *
 * # Safety
 * `family` must be live; `p_json`/`q_json` NUL-terminated strings; `out`
 * must have room for 4 doubles.
 */
enum BrStatus br_family_divergences(const struct BrFamily *family,
                                    const char *p_json,
                                    const char *q_json,
                                    double alpha,
                                    double *out);

/**
 * Solve the centroid of a weighted parameter set
 * (`{"points":[{"weight":w,"param":{...}}]}`) with the generic fixed-point
 * solver at uniform skew `alpha`. On success `*out_json` holds
 * `{"centroid": ..., "iterations": n, "converged": bool}` (free with
 * [`br_string_free`]). Returns `NotConverged` with the result still written
 * when the iteration budget ran out.
 *
 * # Safety
 * `family` must be live, `points_json` NUL-terminated, `out_json` writable.
 */
enum BrStatus br_centroid_generic(const struct BrFamily *family,
                                  const char *points_json,
                                  double alpha,
                                  double tolerance,
                                  uintptr_t max_iterations,
                                  char **out_json);

/**
 * Solve the Bhattacharyya centroid of weighted multivariate Gaussians
 * (`{"points":[{"weight":w,"param":{"mean":[..],"cov":[[..]]}}]}`) with the
 * direct matrix-update scheme. Output as for [`br_centroid_generic`], plus
 * a `"failure"` field when a covariance iterate left the PD cone.
 *
 * # Safety
 * `points_json` NUL-terminated, `out_json` writable.
 */
enum BrStatus br_centroid_tailored(const char *points_json,
                                   double tolerance,
                                   uintptr_t max_iterations,
                                   char **out_json);

/**
 * Reduce a mixture (JSON schema as emitted by `brc simplify`) to `k_target`
 * components by greedy Bhattacharyya merging. `*out_json` holds the
 * simplified mixture JSON on success.
 *
 * # Safety
 * `mixture_json` NUL-terminated, `out_json` writable.
 */
enum BrStatus br_simplify_mixture(const char *mixture_json,
                                  uintptr_t k_target,
                                  double tolerance,
                                  uintptr_t max_iterations,
                                  char **out_json);

/**
 * Natural parameters of a JSON source parameter, flattened as the vector
 * block followed by the row-major matrix block. `out_len` receives the
 * number of doubles written; `out` must have room for
 * `vec_dim + mat_dim * mat_dim` doubles (poisson 1, gaussian 2,
 * multinomial d-1, mvgaussian d + d*d).
 *
 * # Safety
 * `family` live, `param_json` NUL-terminated, `out`/`out_len` writable.
 */
enum BrStatus br_to_natural(const struct BrFamily *family,
                            const char *param_json,
                            double *out,
                            uintptr_t *out_len);

/**
 * Free a string returned through an `out_json` parameter.
 *
 * # Safety
 * `s` must be a pointer produced by this library, not yet freed.
 */
void br_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BURBEA_RAO_H */
