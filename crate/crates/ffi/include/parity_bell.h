#ifndef PARITY_BELL_H
#define PARITY_BELL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  PB_STATUS_OK = 0,
  PB_STATUS_NULL_POINTER = 1,
  PB_STATUS_INVALID_ARGUMENT = 2,
  PB_STATUS_CAP_EXCEEDED = 3,
  PB_STATUS_TRUNCATION_TOO_SMALL = 4,
  PB_STATUS_QUADRATURE_INSUFFICIENT = 5,
  PB_STATUS_NON_UNITARY = 6,
  PB_STATUS_DIMENSION_MISMATCH = 7,
  PB_STATUS_BUFFER_TOO_SMALL = 8,
  PB_STATUS_PANIC = 9,
} PbStatus;

typedef enum {
  PB_CONFIG_LABEL_NUMBER = 0,
  PB_CONFIG_LABEL_POSITION = 1,
  PB_CONFIG_LABEL_ALT_PHASE = 2,
} PbConfigLabel;

typedef enum {
  PB_ROUTE_DIRECT = 0,
  PB_ROUTE_TRACE = 1,
} PbRoute;

/**
 * Configurational unitary on the half-index space.
 */
typedef struct PbConfig PbConfig;

/**
 * Truncated two-mode squeezed vacuum and its reduced density.
 */
typedef struct PbState PbState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *pb_version(void);

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *pb_last_error_message(void);

/**
 * Builds the state with the adaptive truncation for `tail_tol`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
PbStatus pb_state_new(double zeta, double tail_tol, PbState **out);

/**
 * # Safety
 * `state` must be null or a handle from `pb_state_new` not yet freed.
 */
void pb_state_free(PbState *state);

/**
 * Fock levels per mode, or 0 for a null handle.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
uintptr_t pb_state_dim(const PbState *state);

/**
 * Copies the Schmidt coefficients into `out[0..dim]`.
 *
 * # Safety
 * `state` must be a live handle and `out` valid for `len` writes.
 */
PbStatus pb_state_lambda(const PbState *state, double *out, uintptr_t len);

/**
 * `Tr rho^2` of either mode.
 *
 * # Safety
 * `state` must be a live handle and `out` valid for a write.
 */
PbStatus pb_state_purity(const PbState *state, double *out);

/**
 * A named configuration on `half_dim` half-indices.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
PbStatus pb_config_named(PbConfigLabel label, uintptr_t half_dim, PbConfig **out);

/**
 * A caller-supplied unitary from row-major real and imaginary parts, each
 * `half_dim * half_dim` long; rejected if `|U U^dagger - I| >= tol`.
 *
 * # Safety
 * `re` and `im` must be valid for `half_dim * half_dim` reads; `out` valid
 * for writes.
 */
PbStatus pb_config_custom(const double *re,
                          const double *im,
                          uintptr_t half_dim,
                          double tol,
                          PbConfig **out);

/**
 * # Safety
 * `config` must be null or a handle not yet freed.
 */
void pb_config_free(PbConfig *config);

/**
 * # Safety
 * `config` must be null or a live handle.
 */
uintptr_t pb_config_half_dim(const PbConfig *config);

/**
 * The key correlation `F` for configurations `c1`, `c2` (one per mode).
 *
 * # Safety
 * Handles must be live; `out` valid for a write.
 */
PbStatus pb_f(const PbState *state,
              const PbConfig *c1,
              const PbConfig *c2,
              PbRoute route,
              double *out);

/**
 * Row-major 3x3 correlation tensor `<Pi_i (x) Pi_j>`, `i, j` in `x, y, z`.
 *
 * # Safety
 * Handles must be live; `out` valid for 9 writes.
 */
PbStatus pb_correlation_tensor(const PbState *state,
                               const PbConfig *c1,
                               const PbConfig *c2,
                               double *out);

/**
 * Largest CHSH value for a row-major tensor. When `setting` is non-null it
 * receives `n, n', m, m'` as 12 consecutive components.
 *
 * # Safety
 * `k` must be valid for 9 reads, `value` for a write, `setting` null or
 * valid for 12 writes.
 */
PbStatus pb_horodecki_max(const double *k, double *value, double *setting);

/**
 * Closed-form `F` of a named family at squeezing `zeta`.
 *
 * # Safety
 * `out` must be valid for a write.
 */
PbStatus pb_f_closed(double zeta, PbConfigLabel label, double *out);

/**
 * `2 sqrt(1 + f^2)`.
 */
double pb_bell_from_f(double f);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PARITY_BELL_H */
