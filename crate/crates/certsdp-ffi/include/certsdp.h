#ifndef CERTSDP_H
#define CERTSDP_H

/* Generated by cbindgen from the certsdp-ffi crate; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes returned by every fallible function.
 */
typedef enum CertsdpStatus {
  CERTSDP_STATUS_OK = 0,
  CERTSDP_STATUS_INVALID_ARGUMENT = 1,
  CERTSDP_STATUS_IO_ERROR = 2,
  CERTSDP_STATUS_NUMERICAL_ERROR = 3,
  CERTSDP_STATUS_BUDGET_EXHAUSTED = 4,
} CertsdpStatus;

/**
 * Opaque instance handle.
 */
typedef struct certsdp_instance certsdp_instance;

/**
 * Opaque solve-report handle.
 */
typedef struct certsdp_report certsdp_report;

/**
 * Solver options. Zero-initialize and override selectively:
 * zero/negative values select the documented defaults.
 */
typedef struct CertsdpOptions {
  /**
   * Feasibility acceptance threshold on the residual norm (default 1e-13).
   */
  double eta;
  /**
   * Optimality target for the inner accelerated loop (default 1e-13).
   */
  double delta_target;
  /**
   * Per-constraint feasibility tolerance (default 1e-13).
   */
  double feas_tol;
  /**
   * Ball schedule period; every `schedule_period`-th dual iterate is
   * attempted (default 250). Set `guess_and_double` nonzero to use the
   * doubling schedule instead.
   */
  uintptr_t schedule_period;
  int32_t guess_and_double;
  /**
   * 0 = decaying-step subgradient dual (default), 1 = adaptive
   * accelerated dual.
   */
  int32_t use_accelegrad;
  /**
   * Dual penalty parameter; <= 0 uses 20 tr(Y*) from the ground truth
   * (an error if the instance carries none).
   */
  double penalty;
  /**
   * Wall-clock budget in seconds; <= 0 means unbounded.
   */
  double max_seconds;
} CertsdpOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message on this thread into `buf` (NUL-terminated,
 * truncated to `len` bytes). Returns the full message length in bytes,
 * excluding the NUL.
 *
 * # Safety
 * `buf` must point to `len` writable bytes, or be null (queries length).
 */
uintptr_t certsdp_last_error(char *buf, uintptr_t len);

/**
 * Load an instance JSON file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be a valid pointer.
 * On success `*out` owns the instance and must be released with
 * `certsdp_instance_free`.
 */
enum CertsdpStatus certsdp_instance_load(const char *path, struct certsdp_instance **out);

/**
 * Generate a random instance with planted ground truth.
 *
 * # Safety
 * `out` must be a valid pointer; the returned handle must be released with
 * `certsdp_instance_free`.
 */
enum CertsdpStatus certsdp_instance_generate(uintptr_t n_minus_k,
                                             uintptr_t k,
                                             uintptr_t m,
                                             double mu_star,
                                             uintptr_t nnz,
                                             uint64_t seed,
                                             struct certsdp_instance **out);

/**
 * Write an instance (with its ground truth, if any) to a JSON file.
 *
 * # Safety
 * `inst` must be a live handle; `path` a NUL-terminated string.
 */
enum CertsdpStatus certsdp_instance_save(const struct certsdp_instance *inst, const char *path);

/**
 * Query instance dimensions. Null out-pointers are skipped.
 *
 * # Safety
 * `inst` must be a live handle.
 */
enum CertsdpStatus certsdp_instance_dims(const struct certsdp_instance *inst,
                                         uintptr_t *n_minus_k,
                                         uintptr_t *k,
                                         uintptr_t *m);

/**
 * Release an instance handle. Null is a no-op.
 *
 * # Safety
 * `inst` must be a handle returned by this library, released once.
 */
void certsdp_instance_free(struct certsdp_instance *inst);

/**
 * Solve an instance.
 *
 * # Safety
 * `inst` must be a live handle; `opts` may be null for defaults; `out`
 * must be valid and receives a report handle to release with
 * `certsdp_report_free`. Returns `BudgetExhausted` (with a report still
 * written to `*out`) when the solve ran out of budget or stream.
 */
enum CertsdpStatus certsdp_solve(const struct certsdp_instance *inst,
                                 const struct CertsdpOptions *opts,
                                 struct certsdp_report **out);

/**
 * Scalar metrics of a report. Null out-pointers are skipped. `dist_sq` is
 * set to a negative value when no ground truth was available.
 *
 * # Safety
 * `report` must be a live handle.
 */
enum CertsdpStatus certsdp_report_metrics(const struct certsdp_report *report,
                                          double *objective,
                                          double *residual,
                                          double *max_abs_q,
                                          double *dist_sq,
                                          double *time_sec);

/**
 * Copy the recovered factor X (row-major, (n-k) x k) into `buf`. Returns
 * the required length when `buf` is null or too short via `*needed`.
 *
 * # Safety
 * `buf`, when non-null, must point to `len` writable doubles.
 */
enum CertsdpStatus certsdp_report_x(const struct certsdp_report *report,
                                    double *buf,
                                    uintptr_t len,
                                    uintptr_t *needed);

/**
 * Copy the final dual vector gamma into `buf`; same contract as
 * `certsdp_report_x`.
 *
 * # Safety
 * `buf`, when non-null, must point to `len` writable doubles.
 */
enum CertsdpStatus certsdp_report_gamma(const struct certsdp_report *report,
                                        double *buf,
                                        uintptr_t len,
                                        uintptr_t *needed);

/**
 * Release a report handle. Null is a no-op.
 *
 * # Safety
 * `report` must be a handle returned by this library, released once.
 */
void certsdp_report_free(struct certsdp_report *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CERTSDP_H */
