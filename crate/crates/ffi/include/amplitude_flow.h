/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef AMPLITUDE_FLOW_H
#define AMPLITUDE_FLOW_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every function.
 */
typedef enum AflStatus {
  AFL_STATUS_OK = 0,
  AFL_STATUS_NULL_POINTER = 1,
  AFL_STATUS_INVALID_INPUT = 2,
  AFL_STATUS_OUT_OF_RANGE = 3,
  AFL_STATUS_NOT_NORMALIZED = 4,
  AFL_STATUS_WRONG_BRANCH = 5,
  AFL_STATUS_CONFIG = 6,
  AFL_STATUS_IO = 7,
  AFL_STATUS_PANIC = 8,
} AflStatus;

/**
 * A prepared amplitude-flow channel.
 */
typedef struct AflModel AflModel;

/**
 * Exact-diagonalization engine for a model.
 */
typedef struct AflOracle AflOracle;

/**
 * One oracle evaluation.
 */
typedef struct AflOracleSample {
  double time;
  double p;
  double k_qubit;
  double k_partner;
  double k_moon;
  double max_third_eigenvalue;
  double norm_drift;
} AflOracleSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *afl_version(void);

/**
 * Message of the last failed call on this thread, or NULL.
 *
 * The pointer stays valid until the next call into the library on the same
 * thread.
 */
const char *afl_last_error(void);

/**
 * `K_M = 1 / (cos⁴θ + sin⁴θ)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum AflStatus afl_moon_weight(double theta, double *out);

/**
 * Closed-form `K_A` and `K_a` for survival probability `p`.
 *
 * # Safety
 * Both out pointers must be valid for writes.
 */
enum AflStatus afl_closed_form_weights(double p, double theta, double *k_qubit, double *k_partner);

/**
 * `√(2/K − 1)` for `K ∈ [1, 2]`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum AflStatus afl_sqrt_coordinate(double k, double *out);

/**
 * Conservation residual; `AFL_STATUS_WRONG_BRANCH` when sin²θ < cos²θ.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum AflStatus afl_conservation_residual(double k_qubit,
                                         double k_partner,
                                         double k_moon,
                                         double theta,
                                         double *out);

/**
 * Signed conservation residual, defined on both branches.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum AflStatus afl_signed_residual(double p, double theta, double *out);

/**
 * Weisskopf–Wigner spontaneous emission with decay rate `gamma`.
 *
 * # Safety
 * `out` must be valid for writes; release the handle with [`afl_model_free`].
 */
enum AflStatus afl_model_new_se(double gamma, double omega_a, struct AflModel **out);

/**
 * Resonant Jaynes–Cummings exchange with coupling `g`.
 *
 * # Safety
 * `out` must be valid for writes; release the handle with [`afl_model_free`].
 */
enum AflStatus afl_model_new_jc(double g, double omega_a, struct AflModel **out);

/**
 * XY chain of `sites` partner spins with hopping `hopping`.
 *
 * # Safety
 * `out` must be valid for writes; release the handle with [`afl_model_free`].
 */
enum AflStatus afl_model_new_xy(size_t sites, double hopping, struct AflModel **out);

/**
 * # Safety
 * `model` must come from an `afl_model_new_*` call and not be used afterwards.
 * NULL is ignored.
 */
void afl_model_free(struct AflModel *model);

/**
 * Survival probability `p(t) = |c_e(t)|²`.
 *
 * # Safety
 * `model` must be a live handle and `out` valid for writes.
 */
enum AflStatus afl_model_flow(const struct AflModel *model, double t, double *out);

/**
 * Schmidt weights of the three cuts computed from the amplitudes at `t`.
 *
 * # Safety
 * `model` must be a live handle and the out pointers valid for writes.
 */
enum AflStatus afl_model_snapshot_weights(const struct AflModel *model,
                                          double theta,
                                          double t,
                                          double *k_qubit,
                                          double *k_partner,
                                          double *k_moon);

/**
 * Builds the oracle for `model`. Spontaneous emission is discretized on a
 * flat grid of `n_modes` modes over `bandwidth` (40 decay rates when
 * `bandwidth <= 0`); the two arguments are ignored for the other models.
 *
 * # Safety
 * `model` must be a live handle and `out` valid for writes; release the
 * oracle with [`afl_oracle_free`].
 */
enum AflStatus afl_oracle_new(const struct AflModel *model,
                              size_t n_modes,
                              double bandwidth,
                              struct AflOracle **out);

/**
 * # Safety
 * `oracle` must come from [`afl_oracle_new`] and not be used afterwards.
 * NULL is ignored.
 */
void afl_oracle_free(struct AflOracle *oracle);

/**
 * Evolves the pair, assembles the three-party state and reports the
 * numerical Schmidt weights.
 *
 * # Safety
 * `oracle` must be a live handle and `out` valid for writes.
 */
enum AflStatus afl_oracle_sample(const struct AflOracle *oracle,
                                 double theta,
                                 double t,
                                 struct AflOracleSample *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AMPLITUDE_FLOW_H */
