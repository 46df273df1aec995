#ifndef AHLFORS_H
#define AHLFORS_H

/* Generated from the Rust sources by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of an API call. Anything other than `Ok` leaves a message
 * readable through `ahlfors_last_error`.
 */
typedef enum AhlforsStatus {
  /**
   * The call succeeded.
   */
  AHLFORS_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  AHLFORS_STATUS_NULL_POINTER = 1,
  /**
   * Malformed JSON, a band-limit violation, a degenerate metric, or
   * any other rejected input.
   */
  AHLFORS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The iterative solver ran out of iterations before reaching its
   * tolerance.
   */
  AHLFORS_STATUS_SOLVER_FAILURE = 3,
  /**
   * The linear system is inconsistent (right-hand side meets the
   * operator kernel).
   */
  AHLFORS_STATUS_INCONSISTENT_SYSTEM = 4,
  /**
   * An internal invariant failed; the library state is still valid
   * but the call produced nothing.
   */
  AHLFORS_STATUS_PANIC = 5,
} AhlforsStatus;

/**
 * Opaque metric handle: a realized metric on its grid plus the solver
 * settings the configuration document selected.
 */
typedef struct AhlforsMetric AhlforsMetric;

/**
 * Convergence record of the traceless decomposition.
 */
typedef struct AhlforsDecompositionInfo {
  /**
   * Conjugate-gradient iterations spent on the potential equation.
   */
  size_t cg_iterations;
  /**
   * Relative residual of the linear solve at termination.
   */
  double final_residual;
  /**
   * |<S theta, phi_tt>| scaled by the part norms; 0 when either part
   * vanishes numerically.
   */
  double orthogonality_defect;
  /**
   * L2 norm of the divergence of the transverse part.
   */
  double tt_divergence_norm;
  /**
   * L2 norm of the metric trace of the transverse part.
   */
  double trace_norm;
} AhlforsDecompositionInfo;

/**
 * Summary of an almost-soliton fit.
 */
typedef struct AhlforsSolitonInfo {
  /**
   * Relative size of the transverse remainder; 0 means the metric is
   * an almost Ricci soliton on this grid.
   */
  double deviation;
  /**
   * sup - inf of the fitted soliton function; 0 for a genuine
   * (constant-coefficient) soliton.
   */
  double lambda_variation;
  /**
   * Grid mean of the fitted soliton function.
   */
  double lambda_mean;
} AhlforsSolitonInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message from the most recent failing call on this thread, as a
 * nul-terminated UTF-8 string; empty if no call has failed yet. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *ahlfors_last_error(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *ahlfors_version(void);

/**
 * Builds a metric handle from a JSON configuration document. The
 * document uses the CLI schema: a `grid` block (resolution, optional
 * periods), a `metric` block (flat / conformal / perturbation) and an
 * optional `solver` block; command-specific blocks are accepted and
 * ignored. On success `*out` owns the handle; release it with
 * `ahlfors_metric_free`.
 *
 * # Safety
 * `config_json` must be a nul-terminated string and `out` a valid
 * pointer.
 */
enum AhlforsStatus ahlfors_metric_new(const char *config_json, struct AhlforsMetric **out);

/**
 * Releases a handle returned by `ahlfors_metric_new`. Null is a no-op.
 *
 * # Safety
 * `metric` must be null or a pointer obtained from `ahlfors_metric_new`
 * that has not been freed before.
 */
void ahlfors_metric_free(struct AhlforsMetric *metric);

/**
 * Number of grid axes, or 0 for a null handle.
 */
size_t ahlfors_metric_dimension(const struct AhlforsMetric *metric);

/**
 * Total number of grid points, or 0 for a null handle.
 */
size_t ahlfors_metric_point_count(const struct AhlforsMetric *metric);

/**
 * Copies the metric components into `out` (symmetric-tensor layout).
 *
 * # Safety
 * `out` must point to `n*(n+1)/2 * points` writable doubles.
 */
enum AhlforsStatus ahlfors_metric_components(const struct AhlforsMetric *metric, double *out);

/**
 * Evaluates the scalar curvature of the metric into `out` (scalar
 * layout).
 *
 * # Safety
 * `out` must point to `points` writable doubles.
 */
enum AhlforsStatus ahlfors_scalar_curvature(const struct AhlforsMetric *metric, double *out);

/**
 * Applies the trace-adjusted conformal Killing operator to the
 * one-form in `theta` and writes the resulting trace-free symmetric
 * tensor to `out`.
 *
 * # Safety
 * `theta` must point to `n * points` readable doubles and `out` to
 * `n*(n+1)/2 * points` writable doubles.
 */
enum AhlforsStatus ahlfors_conformal_killing(const struct AhlforsMetric *metric,
                                             const double *theta,
                                             double *out);

/**
 * Writes the divergence of the symmetric tensor in `phi` (taken in the
 * metric's volume-weighted sense, the exact adjoint of the conformal
 * Killing operator) to the one-form buffer `out`.
 *
 * # Safety
 * `phi` must point to `n*(n+1)/2 * points` readable doubles and `out`
 * to `n * points` writable doubles.
 */
enum AhlforsStatus ahlfors_divergence(const struct AhlforsMetric *metric,
                                      const double *phi,
                                      double *out);

/**
 * Splits the trace-free symmetric tensor in `phi` into a conformal
 * Killing image plus a transverse-traceless remainder, using the
 * handle's solver settings. Output pointers may be null to skip a
 * part: `out_theta` receives the potential one-form, `out_s_theta` its
 * image under the conformal Killing operator, `out_phi_tt` the
 * transverse remainder, and `info` the convergence record. Rejects
 * input whose metric trace is not numerically zero.
 *
 * # Safety
 * `phi` must point to `n*(n+1)/2 * points` readable doubles; non-null
 * outputs must be writable with the layouts documented at the top of
 * the header.
 */
enum AhlforsStatus ahlfors_decompose(const struct AhlforsMetric *metric,
                                     const double *phi,
                                     double *out_theta,
                                     double *out_s_theta,
                                     double *out_phi_tt,
                                     struct AhlforsDecompositionInfo *info);

/**
 * Fits the almost-soliton structure of the metric: decomposes the
 * trace-free Ricci tensor and returns the potential one-form
 * (`out_theta`), the pointwise soliton function (`out_lambda`, scalar
 * layout), the transverse remainder (`out_phi_tt`) and a fit summary
 * (`info`). Output pointers may be null to skip a part.
 *
 * # Safety
 * Non-null outputs must be writable with the documented layouts.
 */
enum AhlforsStatus ahlfors_soliton_fit(const struct AhlforsMetric *metric,
                                       double *out_theta,
                                       double *out_lambda,
                                       double *out_phi_tt,
                                       struct AhlforsSolitonInfo *info);

/**
 * Evaluates the vacuum constraint residuals of the initial data set
 * `(g, K)` with `K` the symmetric tensor in `second_fundamental`: the
 * scalar (Hamiltonian) residual into `out_hamiltonian` (scalar layout)
 * and the vector (momentum) residual into `out_momentum` (one-form
 * layout). Either output may be null to skip it. Both residuals vanish
 * exactly when the data set satisfies the vacuum constraints.
 *
 * # Safety
 * `second_fundamental` must point to `n*(n+1)/2 * points` readable
 * doubles; non-null outputs must be writable with the documented
 * layouts.
 */
enum AhlforsStatus ahlfors_constraint_residuals(const struct AhlforsMetric *metric,
                                                const double *second_fundamental,
                                                double *out_hamiltonian,
                                                double *out_momentum);

/**
 * Runs one batch command (`"verify"`, `"decompose"`, `"soliton"`,
 * `"constraints"` or `"gen-tt"`) against a JSON configuration document
 * and hands back the JSON report through `out_report`. The status
 * reflects execution only; whether the report's checks passed is the
 * `"passed"` field inside the document. Free the returned string with
 * `ahlfors_string_free`.
 *
 * # Safety
 * `command` and `config_json` must be nul-terminated strings and
 * `out_report` a valid pointer.
 */
enum AhlforsStatus ahlfors_run_json(const char *command,
                                    const char *config_json,
                                    char **out_report);

/**
 * Frees a string returned by `ahlfors_run_json`. Null is a no-op.
 *
 * # Safety
 * `text` must be null or a pointer obtained from this library that has
 * not been freed before.
 */
void ahlfors_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AHLFORS_H */
