#ifndef EQGROWTH_H
#define EQGROWTH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EqStatus {
  EQ_STATUS_OK = 0,
  EQ_STATUS_NULL_POINTER = 1,
  EQ_STATUS_INVALID_ARGUMENT = 2,
  EQ_STATUS_BUFFER_TOO_SMALL = 3,
  EQ_STATUS_PANIC = 4,
} EqStatus;

typedef enum EqModel {
  EQ_MODEL_POWER_LAW = 0,
  EQ_MODEL_STRETCHED_EXP = 1,
  EQ_MODEL_SATURATING_PL = 2,
  EQ_MODEL_LINEAR = 3,
  EQ_MODEL_LOG_NORMAL = 4,
} EqModel;

typedef enum EqDomain {
  EQ_DOMAIN_ARITH = 0,
  EQ_DOMAIN_BOOL = 1,
  EQ_DOMAIN_LIST = 2,
} EqDomain;

typedef enum EqGenerator {
  EQ_GENERATOR_RANDOM = 0,
  EQ_GENERATOR_COMPOSITIONAL = 1,
  EQ_GENERATOR_FREQ = 2,
  EQ_GENERATOR_MDL_GREEDY = 3,
} EqGenerator;

typedef enum EqFilter {
  EQ_FILTER_ANY = 0,
  EQ_FILTER_NOVELTY = 1,
} EqFilter;

// One fitted model.
typedef struct EqFit EqFit;

// A growth series `(t, n)`.
typedef struct EqSeries EqSeries;

// A discovery trajectory.
typedef struct EqTrajectory EqTrajectory;

// Closure-model parameters; `big_k` is the generator throughput K.
typedef struct EqClosureParams {
  double big_k;
  double k;
  double mu;
  double n0;
} EqClosureParams;

// Architecture of one discovery run.
typedef struct EqArchConfig {
  enum EqDomain domain;
  enum EqGenerator generator;
  enum EqFilter filter;
  uint32_t depth;
  size_t batch_size;
  uint64_t seed;
  size_t epochs;
  // Non-zero admits depths and batch sizes outside the sweep sets.
  bool allow_override;
} EqArchConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. Owned by the
// library; valid until the next call.
const char *eq_last_error(void);

// Library version as a static NUL-terminated string.
const char *eq_version(void);

// Builds a series from `len` pairs. `t` must be positive and strictly
// increasing; `n` finite and non-negative.
//
// # Safety
// `t` and `n` must point to `len` readable doubles; `out` must be writable.
enum EqStatus eq_series_new(const double *t, const double *n, size_t len, struct EqSeries **out);

// Number of points, or 0 for NULL.
//
// # Safety
// `series` must be NULL or a live handle.
size_t eq_series_len(const struct EqSeries *series);

// Copies the series into caller buffers of capacity `cap`.
//
// # Safety
// `series` must be a live handle; `t` and `n` must hold `cap` doubles.
enum EqStatus eq_series_copy(const struct EqSeries *series, double *t, double *n, size_t cap);

// # Safety
// `series` must be NULL or a handle not yet freed.
void eq_series_free(struct EqSeries *series);

// Fits one model by damped least squares in linear space.
//
// # Safety
// `series` must be a live handle; `out` must be writable.
enum EqStatus eq_fit(const struct EqSeries *series, enum EqModel model, struct EqFit **out);

// Fits every model and writes the lowest-AIC usable one to `best`.
//
// # Safety
// `series` must be a live handle; `best` must be writable.
enum EqStatus eq_select_model(const struct EqSeries *series, struct EqFit **best);

// # Safety
// `fit` must be a live handle.
enum EqModel eq_fit_model(const struct EqFit *fit);

// Number of parameters, or 0 for NULL.
//
// # Safety
// `fit` must be NULL or a live handle.
size_t eq_fit_n_params(const struct EqFit *fit);

// Parameter `index` in the model's order (`a, b`; `a, tau, beta`; `a, k, mu`; `a, b`; `a, m, s`).
//
// # Safety
// `fit` must be a live handle; `value` must be writable.
enum EqStatus eq_fit_param(const struct EqFit *fit, size_t index, double *value);

// # Safety
// `fit` must be a live handle.
double eq_fit_rss(const struct EqFit *fit);

// # Safety
// `fit` must be a live handle.
double eq_fit_aic(const struct EqFit *fit);

// # Safety
// `fit` must be a live handle.
bool eq_fit_converged(const struct EqFit *fit);

// # Safety
// `fit` must be a live handle.
bool eq_fit_degenerate(const struct EqFit *fit);

// # Safety
// `fit` must be NULL or a handle not yet freed.
void eq_fit_free(struct EqFit *fit);

// RK4 integration of the closure growth equation, sampled at t = 1, 2, ….
//
// # Safety
// `params` must be readable; `out` must be writable.
enum EqStatus eq_simulate_ode(const struct EqClosureParams *params,
                              double t_end,
                              double dt,
                              struct EqSeries **out);

// Runs one discovery configuration.
//
// # Safety
// `config` must be readable; `out` must be writable.
enum EqStatus eq_discover(const struct EqArchConfig *config, struct EqTrajectory **out);

// Number of epochs, or 0 for NULL.
//
// # Safety
// `traj` must be NULL or a live handle.
size_t eq_trajectory_len(const struct EqTrajectory *traj);

// Copies cumulative rule counts into `sizes` (capacity `cap`).
//
// # Safety
// `traj` must be a live handle; `sizes` must hold `cap` values.
enum EqStatus eq_trajectory_sizes(const struct EqTrajectory *traj, uint64_t *sizes, size_t cap);

// The trajectory as one JSON line; release with [`eq_string_free`].
//
// # Safety
// `traj` must be NULL or a live handle.
char *eq_trajectory_json(const struct EqTrajectory *traj);

// # Safety
// `traj` must be NULL or a handle not yet freed.
void eq_trajectory_free(struct EqTrajectory *traj);

// # Safety
// `s` must be NULL or a string returned by this library and not yet freed.
void eq_string_free(char *s);

// Parses a model name such as `saturating_pl`.
//
// # Safety
// `name` must be a NUL-terminated string; `model` must be writable.
enum EqStatus eq_model_from_name(const char *name, enum EqModel *model);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EQGROWTH_H */
