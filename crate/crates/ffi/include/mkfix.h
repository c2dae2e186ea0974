#ifndef MKFIX_H
#define MKFIX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum MkfixCode {
  MKFIX_CODE_OK = 0,
  MKFIX_CODE_NULL_POINTER = 1,
  MKFIX_CODE_INVALID_ARGUMENT = 2,
  MKFIX_CODE_DOMAIN_ERROR = 3,
  MKFIX_CODE_NUMERIC_ERROR = 4,
  MKFIX_CODE_METRIC_AXIOM = 5,
  MKFIX_CODE_FORMAT_ERROR = 6,
  /**
   * The iteration stopped at the cap. The handle is still returned.
   */
  MKFIX_CODE_MAX_ITERATIONS = 7,
  MKFIX_CODE_PANIC = 8,
} MkfixCode;

/**
 * Why an iteration stopped.
 */
typedef enum MkfixStatus {
  MKFIX_STATUS_CONVERGED = 0,
  MKFIX_STATUS_MAX_ITERATIONS = 1,
  MKFIX_STATUS_DOMAIN_ERROR = 2,
} MkfixStatus;

/**
 * Opaque result of [`mkfix_bvp_solve`].
 */
typedef struct MkfixBvpSolution MkfixBvpSolution;

/**
 * Opaque result of [`mkfix_iterate_real`].
 */
typedef struct MkfixRealIteration MkfixRealIteration;

/**
 * Opaque result of [`mkfix_check_n_transitive`].
 */
typedef struct MkfixTransitivity MkfixTransitivity;

/**
 * Iteration settings shared by the solvers.
 */
typedef struct MkfixIterationSettings {
  double tolerance;
  uintptr_t max_iterations;
  uintptr_t cauchy_window;
} MkfixIterationSettings;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call on the same thread.
 */
const char *mkfix_last_error_message(void);

/**
 * `G(t, s)` for `(t, s)` in the unit square.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum MkfixCode mkfix_greens_kernel(double t, double s, double *out);

/**
 * Quadrature value of `int_0^1 G(t, s) ds` with `subintervals` (even) Simpson
 * subintervals per unit length.
 *
 * # Safety
 * `out` must be null or valid for one write.
 */
enum MkfixCode mkfix_kernel_row_integral(double t, uintptr_t subintervals, double *out);

/**
 * Library defaults: tolerance 1e-10, 10000 iterations, Cauchy window 2.
 */
struct MkfixIterationSettings mkfix_iteration_settings_default(void);

/**
 * Picard iteration of `map` on the real line from `start`.
 *
 * Once the iteration has started, a handle is written to `*out` whatever
 * the code, so the trace of a failed run stays inspectable. Otherwise
 * `*out` is set to null.
 *
 * # Safety
 * `settings` and `out` must be null or valid; `map` must be safe to call
 * with `user`.
 */
enum MkfixCode mkfix_iterate_real(double (*map)(double x, void *user),
                                  void *user,
                                  double start,
                                  const struct MkfixIterationSettings *settings,
                                  struct MkfixRealIteration **out);

/**
 * Solves `x''' + f(t, x) = 0`, `x(0) = x(1) = x''(0) = 0` on `grid_nodes`
 * (odd) uniform nodes from the zero function. `quadrature_subintervals`
 * of 0 uses `grid_nodes - 1`.
 *
 * # Safety
 * As for [`mkfix_iterate_real`].
 */
enum MkfixCode mkfix_bvp_solve(double (*source)(double t, double x, void *user),
                               void *user,
                               uintptr_t grid_nodes,
                               uintptr_t quadrature_subintervals,
                               const struct MkfixIterationSettings *settings,
                               struct MkfixBvpSolution **out);

/**
 * Why the iteration stopped.
 *
 * # Safety
 * `h` must be a live handle.
 */
enum MkfixStatus mkfix_real_iteration_status(const struct MkfixRealIteration *h);

/**
 * Index `n` of the stopping step; `d(x_n, x_{n+1})` was the last residual checked.
 *
 * # Safety
 * `h` must be a live handle.
 */
uintptr_t mkfix_real_iteration_iterations(const struct MkfixRealIteration *h);

/**
 * `d(x*, T x*)` at the returned point; NaN after a failure.
 *
 * # Safety
 * `h` must be a live handle.
 */
double mkfix_real_iteration_residual(const struct MkfixRealIteration *h);

/**
 * Copies up to `cap` successive residuals into `buf` and returns the
 * full count. Pass a null `buf` to query the count.
 *
 * # Safety
 * `h` must be a live handle; `buf` null or valid for `cap` writes.
 */
uintptr_t mkfix_real_iteration_residuals(const struct MkfixRealIteration *h,
                                         double *buf,
                                         uintptr_t cap);

/**
 * Releases the handle. Null is ignored.
 *
 * # Safety
 * `h` must be null or a handle not yet freed.
 */
void mkfix_real_iteration_free(struct MkfixRealIteration *h);

/**
 * Why the iteration stopped.
 *
 * # Safety
 * `h` must be a live handle.
 */
enum MkfixStatus mkfix_bvp_solution_status(const struct MkfixBvpSolution *h);

/**
 * Index `n` of the stopping step; `d(x_n, x_{n+1})` was the last residual checked.
 *
 * # Safety
 * `h` must be a live handle.
 */
uintptr_t mkfix_bvp_solution_iterations(const struct MkfixBvpSolution *h);

/**
 * `d(x*, T x*)` at the returned point; NaN after a failure.
 *
 * # Safety
 * `h` must be a live handle.
 */
double mkfix_bvp_solution_residual(const struct MkfixBvpSolution *h);

/**
 * Copies up to `cap` successive residuals into `buf` and returns the
 * full count. Pass a null `buf` to query the count.
 *
 * # Safety
 * `h` must be a live handle; `buf` null or valid for `cap` writes.
 */
uintptr_t mkfix_bvp_solution_residuals(const struct MkfixBvpSolution *h,
                                       double *buf,
                                       uintptr_t cap);

/**
 * Releases the handle. Null is ignored.
 *
 * # Safety
 * `h` must be null or a handle not yet freed.
 */
void mkfix_bvp_solution_free(struct MkfixBvpSolution *h);

/**
 * Writes the fixed point to `*out`. Fails with `DomainError` when the
 * iteration produced none.
 *
 * # Safety
 * `h` must be a live handle; `out` null or valid for one write.
 */
enum MkfixCode mkfix_real_iteration_point(const struct MkfixRealIteration *h, double *out);

/**
 * Copies up to `cap` node values of the solution into `buf` and returns
 * the node count, or 0 when the solve produced no solution.
 *
 * # Safety
 * `h` must be a live handle; `buf` null or valid for `cap` writes.
 */
uintptr_t mkfix_bvp_solution_values(const struct MkfixBvpSolution *h, double *buf, uintptr_t cap);

/**
 * Checks `R^(N+1) ⊆ R` for the relation given by `size * size` row-major
 * bytes (nonzero means related).
 *
 * # Safety
 * `rows` must be valid for `size * size` reads; `out` null or valid.
 */
enum MkfixCode mkfix_check_n_transitive(const uint8_t *rows,
                                        uintptr_t size,
                                        uintptr_t n,
                                        struct MkfixTransitivity **out);

/**
 * 1 when the relation is N-transitive, 0 otherwise.
 *
 * # Safety
 * `h` must be a live handle.
 */
int32_t mkfix_transitivity_passes(const struct MkfixTransitivity *h);

/**
 * Copies up to `cap` indices of the counterexample chain into `buf` and
 * returns its length (`N + 2`), or 0 when the check passed.
 *
 * # Safety
 * `h` must be a live handle; `buf` null or valid for `cap` writes.
 */
uintptr_t mkfix_transitivity_counterexample(const struct MkfixTransitivity *h,
                                            uintptr_t *buf,
                                            uintptr_t cap);

/**
 * Releases the handle. Null is ignored.
 *
 * # Safety
 * `h` must be null or a handle not yet freed.
 */
void mkfix_transitivity_free(struct MkfixTransitivity *h);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MKFIX_H */
