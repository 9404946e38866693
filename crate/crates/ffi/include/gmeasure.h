#ifndef GMEASURE_H
#define GMEASURE_H

#pragma once

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes; the numeric values match the CLI exit codes.
 */
typedef enum GmStatus {
  GM_STATUS_OK = 0,
  GM_STATUS_FAILED = 1,
  GM_STATUS_PARSE = 2,
  GM_STATUS_VALIDATION = 3,
  GM_STATUS_PRECONDITION = 4,
  GM_STATUS_NOT_CONVERGED = 5,
  GM_STATUS_NULL_POINTER = 6,
  GM_STATUS_PANIC = 7,
} GmStatus;

/**
 * Opaque Green-measure estimate on a lattice.
 */
typedef struct GmGreenEstimate GmGreenEstimate;

/**
 * Opaque jump kernel.
 */
typedef struct GmKernel GmKernel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread (empty if none). The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *gm_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gm_version(void);

/**
 * Parses `spec` (e.g. `"gauss:b=1"`), using `dim` when the spec has no
 * `dim=` entry (pass 0 to require it in the spec).
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be writable.
 */
enum GmStatus gm_kernel_new(const char *spec, size_t dim, struct GmKernel **out);

/**
 * # Safety
 * `kernel` must be null or a handle from [`gm_kernel_new`] not yet freed.
 */
void gm_kernel_free(struct GmKernel *kernel);

/**
 * Dimension of the kernel (0 for a null handle).
 *
 * # Safety
 * `kernel` must be null or a live handle.
 */
size_t gm_kernel_dim(const struct GmKernel *kernel);

/**
 * Density `a(x)`.
 *
 * # Safety
 * `x` must point to `len` doubles; `out` must be writable.
 */
enum GmStatus gm_kernel_density(const struct GmKernel *kernel,
                                const double *x,
                                size_t len,
                                double *out);

/**
 * Closed-form `G_λ(x)` of the Gaussian kernel with parameter `b`.
 *
 * # Safety
 * `x` must point to `dim` doubles; `value` and `error_bound` must be writable.
 */
enum GmStatus gm_gauss_green_closed(double b,
                                    size_t dim,
                                    double lambda,
                                    const double *x,
                                    double tol,
                                    double *value,
                                    double *error_bound);

/**
 * Regular part of the Green measure by spectral inversion on an
 * `n^d` lattice of half-width `half_width`. At λ = 0 the zero mode is
 * excluded (values are defined up to a constant).
 *
 * # Safety
 * `kernel` must be a live handle; `out` must be writable.
 */
enum GmStatus gm_green_fourier(const struct GmKernel *kernel,
                               size_t n,
                               double half_width,
                               double lambda,
                               struct GmGreenEstimate **out);

/**
 * `G_λ(x)` from an estimate (lattice value or trigonometric interpolation).
 *
 * # Safety
 * `est` must be a live handle; `x` must point to `len` doubles; `out` writable.
 */
enum GmStatus gm_green_evaluate(const struct GmGreenEstimate *est,
                                const double *x,
                                size_t len,
                                double *out);

/**
 * Weight `1/(1+λ)` of the atom at the origin (NaN for a null handle).
 *
 * # Safety
 * `est` must be null or a live handle.
 */
double gm_green_atom_weight(const struct GmGreenEstimate *est);

/**
 * Whether absolute values are uncertified (zero mode excluded at λ = 0).
 *
 * # Safety
 * `est` must be null or a live handle.
 */
bool gm_green_zero_mode_uncertain(const struct GmGreenEstimate *est);

/**
 * # Safety
 * `est` must be null or a handle from [`gm_green_fourier`] not yet freed.
 */
void gm_green_free(struct GmGreenEstimate *est);

/**
 * Monte Carlo `E^{x0} ∫₀^T e^{-λt} f(X(t)) dt` for the Gaussian bump
 * `f(y) = height·exp(-|y|²/(2 width²))` centered at the origin.
 *
 * # Safety
 * `kernel` must be a live handle; `x0` must point to the kernel dimension
 * of doubles; `mean` and `stderr` must be writable.
 */
enum GmStatus gm_mc_potential(const struct GmKernel *kernel,
                              double f_width,
                              double f_height,
                              const double *x0,
                              double lambda,
                              uint64_t paths,
                              double horizon,
                              uint64_t seed,
                              double *mean,
                              double *stderr);

/**
 * Clears the last error message of this thread.
 */
void gm_clear_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GMEASURE_H */
