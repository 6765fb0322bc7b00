#ifndef MCN_H
#define MCN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum McnStatus {
  MCN_STATUS_OK = 0,
  MCN_STATUS_NULL_POINTER = 1,
  MCN_STATUS_INVALID_ARGUMENT = 2,
  MCN_STATUS_MODEL_FAILURE = 3,
  MCN_STATUS_FIT_FAILURE = 4,
  MCN_STATUS_PANIC = 5,
} McnStatus;

/**
 * Opaque model handle.
 */
typedef struct McnModel McnModel;

/**
 * Species and geometry in SI units (rad/s, m, m²) plus the attenuation
 * scaling factor β.
 */
typedef struct McnModelParams {
  double gamma_rad_s;
  double lambda_m;
  double branching;
  double sigma13_m2;
  double gamma0_rad_s;
  double sigma_a_m;
  double sigma_p_m;
  double length_m;
  double core_radius_m;
  double beta;
} McnModelParams;

/**
 * MCN breakdown at one operating point. Rates in rad/s, delay in s.
 */
typedef struct McnResult {
  double mean_rate_r;
  double delta_s;
  double delta_rate;
  double eta_inh;
  double alpha0;
  double alpha_tilde;
  double eta_s;
  double n_mu;
  double n_mc;
  double mean_delay;
} McnResult;

/**
 * Features of one fitted burst; `converged` is 0 when the raw fallback
 * was used.
 */
typedef struct McnBurst {
  double t_d;
  double p_s;
  double tau_b;
  double t_d_raw;
  double fit_rms;
  int32_t converged;
} McnBurst;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a model from explicit parameters.
 *
 * # Safety
 * `params` must point to a valid `McnModelParams` and `out` to writable
 * storage for one pointer.
 */
enum McnStatus mcn_model_new(const struct McnModelParams *params, struct McnModel **out);

/**
 * Fills `out` with the reference parameters: ⁸⁷Rb D1 in a hollow-core
 * fiber with β = 0.07.
 *
 * # Safety
 * `out` must point to writable storage for one `McnModelParams`.
 */
enum McnStatus mcn_model_params_reference(struct McnModelParams *out);

/**
 * Releases a model. Null is ignored.
 *
 * # Safety
 * `model` must come from [`mcn_model_new`] and not be used afterwards.
 */
void mcn_model_free(struct McnModel *model);

/**
 * Evaluates the MCN pipeline. Ω_p⁽⁰⁾ and Δ_p in units of Γ, τ_p in s.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum McnStatus mcn_model_evaluate(const struct McnModel *model,
                                  double n_atoms,
                                  double omega_p0_gamma,
                                  double delta_p_gamma,
                                  double tau_p_s,
                                  struct McnResult *out);

/**
 * ⟨t_D⟩ = [ln√(2πN)]²/(4·N_c·Γ_R).
 *
 * # Safety
 * `out` must be writable.
 */
enum McnStatus mcn_mean_delay(double n_prefactor, double rate, double n_atoms, double *out);

/**
 * Γ_N = [ln√(2πN)]²/(4⟨t_D⟩).
 *
 * # Safety
 * `out` must be writable.
 */
enum McnStatus mcn_gamma_n_from_delay(double t_d, double n_atoms, double *out);

/**
 * Fits A·sech²((t − t₀)/τ) + b to samples `[start, end)` of a uniformly
 * sampled trace.
 *
 * # Safety
 * `t` and `p` must each point to `len` readable doubles; `out` must be
 * writable.
 */
enum McnStatus mcn_fit_burst(const double *t,
                             const double *p,
                             size_t len,
                             size_t start,
                             size_t end,
                             double t_zero,
                             struct McnBurst *out);

/**
 * Copies the calling thread's last error message, NUL-terminated and
 * truncated to `buf_len`, into `buf`. Returns the buffer size needed for
 * the full message, or 0 when no error is recorded. `buf` may be null to
 * query the size.
 *
 * # Safety
 * `buf` must be null or point to `buf_len` writable bytes.
 */
size_t mcn_last_error_message(char *buf, size_t buf_len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *mcn_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MCN_H */
