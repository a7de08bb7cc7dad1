#ifndef GLME_H
#define GLME_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Slack allowed on the uncertainty bound for states passed in by callers.
#define PHYSICALITY_TOL 1e-8

// Result of every fallible call.
typedef enum GlmeStatus {
  GLME_STATUS_OK = 0,
  GLME_STATUS_NULL_ARGUMENT = 1,
  GLME_STATUS_INVALID_ARGUMENT = 2,
  GLME_STATUS_BUFFER_SIZE = 3,
  GLME_STATUS_PARSE = 4,
  GLME_STATUS_IO = 5,
  GLME_STATUS_STRUCTURAL = 6,
  GLME_STATUS_POSITIVITY = 7,
  GLME_STATUS_NON_HERMITIAN = 8,
  GLME_STATUS_STABILITY = 9,
  GLME_STATUS_UNPHYSICAL = 10,
  GLME_STATUS_BOUNDARY = 11,
  GLME_STATUS_NUMERICAL = 12,
  GLME_STATUS_SPECTRAL_EVALUATION = 13,
  GLME_STATUS_DOMAIN = 14,
  GLME_STATUS_TRUNCATION = 15,
  GLME_STATUS_PANIC = 16,
} GlmeStatus;

// Particle statistics of a model or state.
typedef enum GlmeKind {
  GLME_KIND_BOSONIC = 0,
  GLME_KIND_FERMIONIC = 1,
} GlmeKind;

// Integration path for `glme_evolve*`.
typedef enum GlmeMethod {
  GLME_METHOD_EXACT = 0,
  GLME_METHOD_RK4 = 1,
} GlmeMethod;

// Opaque model handle.
typedef struct GlmeModel GlmeModel;

// Opaque Gaussian state handle (bosonic `(mean, V)` or fermionic `σ`).
typedef struct GlmeState GlmeState;

// Copies the calling thread's last error message into `buf` (NUL
// terminated, truncated to `len`). Returns the full message length in bytes,
// excluding the terminator.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t glme_last_error_message(char *buf, size_t len);

// Parses a model from JSON text (same schema as the CLI model files).
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum GlmeStatus glme_model_from_json(const char *json, struct GlmeModel **out);

// Reads a model file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum GlmeStatus glme_model_load(const char *path, struct GlmeModel **out);

// Releases a model. Null is ignored.
//
// # Safety
// `model` must come from this library and not be used afterwards.
void glme_model_free(struct GlmeModel *model);

// Number of modes, or 0 for a null handle.
//
// # Safety
// `model` must be null or a live handle.
size_t glme_model_n_modes(const struct GlmeModel *model);

// # Safety
// `model` must be a live handle; `out` must be writable.
enum GlmeStatus glme_model_kind(const struct GlmeModel *model, enum GlmeKind *out);

// Validates with one tolerance for every check. `defects`, if not null,
// receives `[hermitian_defect, min_gamma_eigenvalue, hamiltonian_symmetry_defect]`.
//
// # Safety
// `model` must be a live handle; `is_valid` writable; `defects` null or 3 writable doubles.
enum GlmeStatus glme_model_validate(const struct GlmeModel *model,
                                    double tol,
                                    bool *is_valid,
                                    double *defects);

// Writes the `2N × 2N` drift (`A` or `X`) and diffusion (`D` or `Y`)
// matrices row-major; each buffer needs `len ≥ 4N²`.
//
// # Safety
// `model` must be a live handle; both buffers must hold `len` doubles.
enum GlmeStatus glme_model_drift_diffusion(const struct GlmeModel *model,
                                           double *drift,
                                           double *diffusion,
                                           size_t len);

// Vacuum state of `n_modes` modes.
//
// # Safety
// `out` must be writable.
enum GlmeStatus glme_state_vacuum(enum GlmeKind kind, size_t n_modes, struct GlmeState **out);

// Builds a state from a row-major covariance (`V` or `σ`) of size `dim × dim`
// and, for bosons, an optional mean of length `dim` (null for zero).
//
// # Safety
// `covariance` must hold `dim²` doubles, `mean` null or `dim` doubles; `out` writable.
enum GlmeStatus glme_state_new(enum GlmeKind kind,
                               size_t dim,
                               const double *covariance,
                               const double *mean,
                               struct GlmeState **out);

// Parses a state from JSON text (same schema as the CLI state files).
//
// # Safety
// `json` must be a NUL-terminated string; `out` writable.
enum GlmeStatus glme_state_from_json(const char *json, struct GlmeState **out);

// Releases a state. Null is ignored.
//
// # Safety
// `state` must come from this library and not be used afterwards.
void glme_state_free(struct GlmeState *state);

// Covariance dimension `2N`, or 0 for a null handle.
//
// # Safety
// `state` must be null or a live handle.
size_t glme_state_dim(const struct GlmeState *state);

// # Safety
// `state` must be a live handle; `out` writable.
enum GlmeStatus glme_state_kind(const struct GlmeState *state, enum GlmeKind *out);

// Copies the covariance row-major into `out` (`len ≥ dim²`).
//
// # Safety
// `state` must be a live handle; `out` must hold `len` doubles.
enum GlmeStatus glme_state_covariance(const struct GlmeState *state, double *out, size_t len);

// Copies the bosonic mean into `out` (`len ≥ dim`).
//
// # Safety
// `state` must be a live handle; `out` must hold `len` doubles.
enum GlmeStatus glme_state_mean(const struct GlmeState *state, double *out, size_t len);

// Purity `Tr ρ²` of the state.
//
// # Safety
// `state` must be a live handle; `out` writable.
enum GlmeStatus glme_state_purity(const struct GlmeState *state, double *out);

// Stationary state; fails with `Stability` when the drift is not Hurwitz.
//
// # Safety
// `model` must be a live handle; `out` writable.
enum GlmeStatus glme_steady_state(const struct GlmeModel *model, struct GlmeState **out);

// Propagates `initial` for time `t ≥ 0` and returns a new state.
//
// # Safety
// `model`, `initial` must be live handles; `out` writable.
enum GlmeStatus glme_evolve(const struct GlmeModel *model,
                            const struct GlmeState *initial,
                            double t,
                            enum GlmeMethod method,
                            struct GlmeState **out);

// Covariances at `times` (non-decreasing, the first is the initial time),
// written back to back into `out` (`len ≥ n_times · dim²`).
//
// # Safety
// `times` must hold `n_times` doubles, `out` `len` doubles; handles live.
enum GlmeStatus glme_evolve_trajectory(const struct GlmeModel *model,
                                       const struct GlmeState *initial,
                                       const double *times,
                                       size_t n_times,
                                       enum GlmeMethod method,
                                       double *out,
                                       size_t len);

// Logarithmic negativity of a two-mode state (bosonic `max(0, −ln η)`).
//
// # Safety
// `state` must be a live handle; `out` writable.
enum GlmeStatus glme_log_negativity(const struct GlmeState *state, double *out);

#endif  /* GLME_H */
