#ifndef LORENZ_3DVAR_H
#define LORENZ_3DVAR_H

/* Generated by cbindgen from lorenz-3dvar-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Call outcome. Anything other than `OK` leaves out-pointers untouched.
typedef enum L63Status {
  L63_STATUS_OK = 0,
  // A pointer argument was null.
  L63_STATUS_NULL_POINTER = 1,
  // A numeric argument failed validation.
  L63_STATUS_INVALID_ARGUMENT = 2,
  // Integration exceeded the overflow guard (unstable step).
  L63_STATUS_DIVERGENCE = 3,
  // Two time grids that must nest exactly do not.
  L63_STATUS_GRID_MISMATCH = 4,
  // No contraction certificate exists for this inflation ratio.
  L63_STATUS_NO_CONTRACTION = 5,
} L63Status;

// Output of one filter run (opaque): means and error records on the
// analysis grid.
typedef struct L63FilterRun L63FilterRun;

// Lorenz parameters plus cached attractor constants (opaque).
typedef struct L63Params L63Params;

// Uniformly sampled truth trajectory (opaque).
typedef struct L63Trajectory L63Trajectory;

// Every theoretical constant and bound for one configuration. Fields that
// have no certificate in the configuration are NaN.
typedef struct L63BoundReport {
  double k;
  double beta;
  double eta;
  double eps;
  double h;
  double m1;
  double m2;
  double m_max;
  double lambda_discrete;
  double h_c;
  double recursion_constant_sharp;
  double asymptotic_discrete;
  double lambda_continuous;
  double asymptotic_continuous;
  double eta_c;
} L63BoundReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *l63_version(void);

// Static description of a status code.
const char *l63_status_message(enum L63Status status);

// Create a parameter handle; requires `alpha, b > 1` and `r > 0`.
//
// # Safety
// `out` must be a valid pointer to writable storage for one pointer.
enum L63Status l63_params_new(double alpha, double b, double r, struct L63Params **out);

// # Safety
// `p` must be null or a pointer previously returned by [`l63_params_new`]
// and not yet freed.
void l63_params_free(struct L63Params *p);

// Attractor radius-squared bound `K`; NaN on null.
//
// # Safety
// `p` must be null or a live parameter handle.
double l63_params_k(const struct L63Params *p);

// Separation exponent `beta`; NaN on null.
//
// # Safety
// `p` must be null or a live parameter handle.
double l63_params_beta(const struct L63Params *p);

// Critical inflation ratio `eta_c = 4/K`; NaN on null.
//
// # Safety
// `p` must be null or a live parameter handle.
double l63_params_eta_c(const struct L63Params *p);

// Evaluate the full bound report for `(eta, eps, h)`.
//
// # Safety
// `p` must be a live parameter handle; `out` must point to writable storage
// for one `L63BoundReport`.
enum L63Status l63_bound_report(const struct L63Params *p,
                                double eta,
                                double eps,
                                double h,
                                struct L63BoundReport *out);

// Spin up from `(1, 1, 1)` for `t_burn` time units, then integrate the
// horizon at step `dt` (explicit Euler, or RK4 when `use_rk4` is true).
//
// # Safety
// `p` must be a live parameter handle; `out` must point to writable storage
// for one pointer.
enum L63Status l63_truth_generate(const struct L63Params *p,
                                  double t_burn,
                                  double horizon,
                                  double dt,
                                  bool use_rk4,
                                  struct L63Trajectory **out);

// # Safety
// `t` must be null or a pointer previously returned by
// [`l63_truth_generate`] and not yet freed.
void l63_trajectory_free(struct L63Trajectory *t);

// Number of states in the trajectory; 0 on null.
//
// # Safety
// `t` must be null or a live trajectory handle.
size_t l63_trajectory_len(const struct L63Trajectory *t);

// Grid step of the trajectory; NaN on null.
//
// # Safety
// `t` must be null or a live trajectory handle.
double l63_trajectory_dt(const struct L63Trajectory *t);

// Copy the states as `len x 3` row-major doubles `(x, y, z)`.
// `cap` is the capacity of `out` in doubles and must be at least `3 len`.
//
// # Safety
// `t` must be a live trajectory handle; `out` must point to at least `cap`
// writable doubles.
enum L63Status l63_trajectory_copy(const struct L63Trajectory *t, double *out, size_t cap);

// Run the discrete 3DVAR filter against a truth trajectory.
//
// Observations `y_k = v_x(k h) + eps xi_k` are synthesized from `seed`; the
// initial mean is the truth state plus a `delta0`-sized perturbation in a
// seed-derived direction. `dt_model` must divide `h`, and `h` must sit on
// the trajectory grid.
//
// # Safety
// `p` and `truth` must be live handles; `out` must point to writable
// storage for one pointer.
enum L63Status l63_filter_discrete_run(const struct L63Params *p,
                                       const struct L63Trajectory *truth,
                                       double eta,
                                       double eps,
                                       double h,
                                       double dt_model,
                                       uint64_t seed,
                                       double delta0,
                                       struct L63FilterRun **out);

// Run the continuous 3DVAR filter along a truth trajectory (Euler-Maruyama
// on the trajectory grid, noise drawn from `seed`).
//
// # Safety
// `p` and `truth` must be live handles; `out` must point to writable
// storage for one pointer.
enum L63Status l63_filter_continuous_run(const struct L63Params *p,
                                         const struct L63Trajectory *truth,
                                         double eta,
                                         double eps,
                                         uint64_t seed,
                                         double delta0,
                                         struct L63FilterRun **out);

// # Safety
// `r` must be null or a pointer previously returned by one of the filter
// run constructors and not yet freed.
void l63_filter_run_free(struct L63FilterRun *r);

// Number of records in the run; 0 on null.
//
// # Safety
// `r` must be null or a live filter-run handle.
size_t l63_filter_run_len(const struct L63FilterRun *r);

// Copy the error process as `len x 4` row-major doubles
// `(t, |d|^2, |Pd|^2, ||d||^2)`. `cap` must be at least `4 len`.
//
// # Safety
// `r` must be a live filter-run handle; `out` must point to at least `cap`
// writable doubles.
enum L63Status l63_filter_run_copy_errors(const struct L63FilterRun *r, double *out, size_t cap);

// Copy the mean path as `len x 4` row-major doubles `(t, mx, my, mz)`.
// `cap` must be at least `4 len`.
//
// # Safety
// `r` must be a live filter-run handle; `out` must point to at least `cap`
// writable doubles.
enum L63Status l63_filter_run_copy_means(const struct L63FilterRun *r, double *out, size_t cap);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LORENZ_3DVAR_H */
