#ifndef KBM_LAB_H
#define KBM_LAB_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Warping-function family.
typedef enum KbmFamily {
  // `f(r) = r`; the parameter is ignored.
  KBM_FAMILY_EUCLIDEAN = 0,
  // `f(r) = sinh r`; the parameter is ignored.
  KBM_FAMILY_HYPERBOLIC = 1,
  // `f(r) ∝ r^β`; the parameter is `β`.
  KBM_FAMILY_POLYNOMIAL = 2,
  // `f(r) ∝ exp(r^β)`; the parameter is `β`.
  KBM_FAMILY_SUBEXPONENTIAL = 3,
  // `f(r) = exp(c·r)`; the parameter is `c`.
  KBM_FAMILY_EXPONENTIAL = 4,
} KbmFamily;

// Time-stepping scheme.
typedef enum KbmScheme {
  // Projected Euler–Maruyama on the Itô form.
  KBM_SCHEME_ITO_EULER_PROJECT = 0,
  // Projected Heun on the Stratonovich form.
  KBM_SCHEME_STRATONOVICH_HEUN_PROJECT = 1,
} KbmScheme;

// Result code of every fallible call.
typedef enum KbmStatus {
  // The call succeeded.
  KBM_STATUS_OK = 0,
  // A required pointer argument was null.
  KBM_STATUS_NULL_POINTER = 1,
  // A parameter, index or configuration value is out of range.
  KBM_STATUS_INVALID_ARGUMENT = 2,
  // A trajectory left the domain of the metric.
  KBM_STATUS_DOMAIN_EXIT = 3,
  // An integrator or quadrature failed numerically.
  KBM_STATUS_NUMERICAL = 4,
  // The library panicked; the message names the cause.
  KBM_STATUS_PANIC = 5,
} KbmStatus;

// Opaque warped-product metric.
typedef struct KbmMetric KbmMetric;

// Opaque recorded trajectory: a row-major table whose first column is `t`.
typedef struct KbmTrajectory KbmTrajectory;

// Transience and angle-convergence integrals of a metric.
typedef struct KbmIntegrability {
  // `∫₁^∞ f^{1−d}`, or `+∞` when it diverges.
  double transience_integral;
  // The angle-clock integral, or `+∞` when it diverges.
  double angle_integral;
  // Value on `[1, r_max]` when the transience integral diverges.
  double transience_truncated;
  // Value on `[1, r_max]` when the angle integral diverges.
  double angle_truncated;
  // The radial process is transient.
  bool radial_transient;
  // The angular clock converges.
  bool angle_converges;
} KbmIntegrability;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a NUL-terminated string with static lifetime.
const char *kbm_version(void);

// Message of the most recent failure on this thread, or an empty string.
//
// The pointer stays valid until the next library call on the same thread.
const char *kbm_last_error_message(void);

// Creates a metric of the given family. `parameter` is `β` or `c` where the
// family has one and is ignored otherwise.
//
// # Safety
// `out` must be null or point to writable storage for one pointer.
enum KbmStatus kbm_metric_new(enum KbmFamily family, double parameter, struct KbmMetric **out);

// Releases a metric. Null is ignored.
//
// # Safety
// `metric` must be null or a handle from [`kbm_metric_new`] not yet freed.
void kbm_metric_free(struct KbmMetric *metric);

// Radial sectional curvature `K(r) = −f″/f` and log-derivative `f′/f` at `r`.
//
// # Safety
// `metric` must be a live handle; the outputs must be null or writable.
enum KbmStatus kbm_metric_curvature(const struct KbmMetric *metric,
                                    double r,
                                    double *curvature,
                                    double *log_derivative);

// Transience and angle-convergence integrals in dimension `d`, truncated at `r_max`.
//
// # Safety
// `metric` must be a live handle and `out` null or writable.
enum KbmStatus kbm_metric_integrability(const struct KbmMetric *metric,
                                        size_t d,
                                        double r_max,
                                        struct KbmIntegrability *out);

// Simulates the polar system from `r = r0`, `ṙ = rdot0`, with the standard
// initial direction and velocity. Path `path_index` of stream `seed` is used.
//
// # Safety
// `metric` must be a live handle and `out` null or writable.
enum KbmStatus kbm_simulate_polar(const struct KbmMetric *metric,
                                  size_t d,
                                  double sigma,
                                  double horizon,
                                  double dt,
                                  enum KbmScheme kind,
                                  size_t stride,
                                  uint64_t seed,
                                  uint64_t path_index,
                                  double r0,
                                  double rdot0,
                                  struct KbmTrajectory **out);

// Simulates the Euclidean system in `ℝ^d` from the origin.
//
// # Safety
// `out` must be null or writable.
enum KbmStatus kbm_simulate_euclidean(size_t d,
                                      double sigma,
                                      double horizon,
                                      double dt,
                                      enum KbmScheme kind,
                                      size_t stride,
                                      uint64_t seed,
                                      uint64_t path_index,
                                      struct KbmTrajectory **out);

// Releases a trajectory. Null is ignored.
//
// # Safety
// `traj` must be null or a handle from a simulate call not yet freed.
void kbm_trajectory_free(struct KbmTrajectory *traj);

// Number of recorded rows, or 0 for a null handle.
//
// # Safety
// `traj` must be null or a live handle.
size_t kbm_trajectory_rows(const struct KbmTrajectory *traj);

// Number of columns, including the leading `t`, or 0 for a null handle.
//
// # Safety
// `traj` must be null or a live handle.
size_t kbm_trajectory_columns(const struct KbmTrajectory *traj);

// Name of column `j`, or null when out of range. The string is owned by the handle.
//
// # Safety
// `traj` must be null or a live handle.
const char *kbm_trajectory_column_name(const struct KbmTrajectory *traj, size_t j);

// SHA-256 fingerprint of the simulation parameters, owned by the handle.
//
// # Safety
// `traj` must be null or a live handle.
const char *kbm_trajectory_fingerprint(const struct KbmTrajectory *traj);

// Copies row `i` into `buffer`, which must hold at least `capacity` values.
//
// # Safety
// `traj` must be a live handle and `buffer` valid for `capacity` writes.
enum KbmStatus kbm_trajectory_copy_row(const struct KbmTrajectory *traj,
                                       size_t i,
                                       double *buffer,
                                       size_t capacity);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KBM_LAB_H */
