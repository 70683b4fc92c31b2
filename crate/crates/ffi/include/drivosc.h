#ifndef DRIVOSC_H
#define DRIVOSC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DrivoscStatus {
  DRIVOSC_STATUS_OK = 0,
  DRIVOSC_STATUS_NULL_POINTER = 1,
  DRIVOSC_STATUS_INVALID_ARGUMENT = 2,
  DRIVOSC_STATUS_NUMERICAL_ERROR = 3,
  DRIVOSC_STATUS_BUFFER_TOO_SMALL = 4,
  DRIVOSC_STATUS_PANIC = 5,
} DrivoscStatus;

typedef enum DrivoscStateKind {
  DRIVOSC_STATE_KIND_COHERENT = 0,
  DRIVOSC_STATE_KIND_FOCK = 1,
} DrivoscStateKind;

/**
 * Opaque external force.
 */
typedef struct DrivoscForce DrivoscForce;

/**
 * Opaque wavefunction sampled on a uniform grid.
 */
typedef struct DrivoscWavefunction DrivoscWavefunction;

/**
 * `F = ∫ sin τ f`, `J = ∫ cos τ f`, and the trajectory `(x̃, p̃)` from rest.
 */
typedef struct DrivoscDriveIntegrals {
  double sin_moment;
  double cos_moment;
  double x_rest;
  double p_rest;
  double t;
} DrivoscDriveIntegrals;

typedef struct DrivoscPhasePoint {
  double q;
  double p;
} DrivoscPhasePoint;

typedef struct DrivoscComplex {
  double re;
  double im;
} DrivoscComplex;

/**
 * Initial state; `x0`/`p0` are read for coherent states, `n` for Fock states.
 */
typedef struct DrivoscState {
  enum DrivoscStateKind kind;
  double x0;
  double p0;
  uint32_t n;
} DrivoscState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the next
 * failing call on the same thread.
 */
const char *drivosc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *drivosc_version(void);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum DrivoscStatus drivosc_force_zero(struct DrivoscForce **out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum DrivoscStatus drivosc_force_constant(double f0, struct DrivoscForce **out);

/**
 * `amplitude · sin(frequency · t + phase)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum DrivoscStatus drivosc_force_sinusoidal(double amplitude,
                                            double frequency,
                                            double phase,
                                            struct DrivoscForce **out);

/**
 * Piecewise-linear force through `(times[i], values[i])`.
 *
 * # Safety
 * `times` and `values` must point to `len` readable doubles; `out` must be
 * valid for writes.
 */
enum DrivoscStatus drivosc_force_tabulated(const double *times,
                                           const double *values,
                                           size_t len,
                                           struct DrivoscForce **out);

/**
 * # Safety
 * `force` must be null or a handle from a `drivosc_force_*` constructor that
 * has not been freed.
 */
void drivosc_force_free(struct DrivoscForce *force);

/**
 * # Safety
 * `force` must be a live handle; `out` must be valid for writes.
 */
enum DrivoscStatus drivosc_drive_integrals(const struct DrivoscForce *force,
                                           double t,
                                           struct DrivoscDriveIntegrals *out);

/**
 * # Safety
 * `force` must be a live handle; `out` must be valid for writes.
 */
enum DrivoscStatus drivosc_classical_trajectory(const struct DrivoscForce *force,
                                                double q0,
                                                double p0,
                                                double t,
                                                struct DrivoscPhasePoint *out);

/**
 * Green function `G(x, x', t)` for `0 < t < π`.
 *
 * # Safety
 * `force` must be a live handle; `out` must be valid for writes.
 */
enum DrivoscStatus drivosc_green_function(const struct DrivoscForce *force,
                                          double t,
                                          double x,
                                          double x_prime,
                                          struct DrivoscComplex *out);

/**
 * # Safety
 * `state` must be readable; `out` must be valid for writes.
 */
enum DrivoscStatus drivosc_wavefunction_new(const struct DrivoscState *state,
                                            double x_min,
                                            double x_max,
                                            size_t n_points,
                                            struct DrivoscWavefunction **out);

/**
 * Propagates `psi` for time `t` into a new handle.
 *
 * # Safety
 * `psi` and `force` must be live handles; `out` must be valid for writes.
 */
enum DrivoscStatus drivosc_wavefunction_propagate(const struct DrivoscWavefunction *psi,
                                                  const struct DrivoscForce *force,
                                                  double t,
                                                  struct DrivoscWavefunction **out);

/**
 * Number of grid points, or 0 for a null handle.
 *
 * # Safety
 * `psi` must be null or a live handle.
 */
size_t drivosc_wavefunction_len(const struct DrivoscWavefunction *psi);

/**
 * Copies the amplitudes into `buffer`, which must hold at least
 * `drivosc_wavefunction_len(psi)` entries.
 *
 * # Safety
 * `psi` must be a live handle; `buffer` must be writable for `capacity` entries.
 */
enum DrivoscStatus drivosc_wavefunction_values(const struct DrivoscWavefunction *psi,
                                               struct DrivoscComplex *buffer,
                                               size_t capacity);

/**
 * # Safety
 * `psi` must be null or a live handle.
 */
void drivosc_wavefunction_free(struct DrivoscWavefunction *psi);

/**
 * Symplectic tomogram of `psi` along `(mu, nu)` on `n_points` values of X.
 *
 * # Safety
 * `psi` must be a live handle; `densities` must be writable for `capacity` doubles.
 */
enum DrivoscStatus drivosc_symplectic_tomogram(const struct DrivoscWavefunction *psi,
                                               double mu,
                                               double nu,
                                               double x_min,
                                               double x_max,
                                               size_t n_points,
                                               double *densities,
                                               size_t capacity);

/**
 * Closed-form tomogram of `state` evolved for `t` under `force`.
 *
 * # Safety
 * `state` must be readable, `force` a live handle, and `densities` writable
 * for `capacity` doubles.
 */
enum DrivoscStatus drivosc_closed_form_tomogram(const struct DrivoscState *state,
                                                const struct DrivoscForce *force,
                                                double t,
                                                double mu,
                                                double nu,
                                                double x_min,
                                                double x_max,
                                                size_t n_points,
                                                double *densities,
                                                size_t capacity);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DRIVOSC_H */
