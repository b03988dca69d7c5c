/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#ifndef ROBUST_CV_H
#define ROBUST_CV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum RcvStatus {
  RCV_STATUS_OK = 0,
  RCV_STATUS_NULL_POINTER = 1,
  RCV_STATUS_INVALID_ARGUMENT = 2,
  RCV_STATUS_INVALID_DATASET = 3,
  // Solver, bracketing or quadrature failure.
  RCV_STATUS_NUMERICAL = 4,
  // Degenerate input for the plug-in rule or threshold pilot.
  RCV_STATUS_DEGENERATE = 5,
  RCV_STATUS_PANIC = 6,
} RcvStatus;

typedef enum RcvKernel {
  RCV_KERNEL_GAUSSIAN = 0,
  RCV_KERNEL_EPANECHNIKOV = 1,
  RCV_KERNEL_UNIFORM = 2,
} RcvKernel;

typedef enum RcvWeights {
  RCV_WEIGHTS_NADARAYA_WATSON = 0,
  RCV_WEIGHTS_GASSER_MULLER = 1,
  RCV_WEIGHTS_PRIESTLEY_CHAO = 2,
} RcvWeights;

typedef enum RcvBoundary {
  RCV_BOUNDARY_CIRCULAR = 0,
  RCV_BOUNDARY_NONE = 1,
} RcvBoundary;

// Loss family; the threshold argument is used by `RCV_RHO_HUBER` only.
typedef enum RcvRho {
  RCV_RHO_QUADRATIC = 0,
  RCV_RHO_HUBER = 1,
  RCV_RHO_ABSOLUTE_VALUE = 2,
} RcvRho;

// Opaque dataset handle.
typedef struct RcvDataset RcvDataset;

// Opaque smoother-settings handle.
typedef struct RcvSmoother RcvSmoother;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer stays
// valid until the next failing call on the same thread.
const char *rcv_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *rcv_version(void);

// Copies `n` design points (strictly increasing, in `[0, 1]`) and responses.
//
// # Safety
// `x` and `y` must point to `n` readable doubles; `out` must be writable.
enum RcvStatus rcv_dataset_new(const double *x, const double *y, size_t n, struct RcvDataset **out);

// Dataset with design `x_i = i / n` for the `n` responses.
//
// # Safety
// `y` must point to `n` readable doubles; `out` must be writable.
enum RcvStatus rcv_dataset_equispaced(const double *y, size_t n, struct RcvDataset **out);

// # Safety
// `data` must come from a dataset constructor and not be used afterwards. NULL is ignored.
void rcv_dataset_free(struct RcvDataset *data);

// Number of observations, or 0 for NULL.
//
// # Safety
// `data` must be NULL or a live dataset handle.
size_t rcv_dataset_len(const struct RcvDataset *data);

// Default settings: Gaussian kernel, Nadaraya–Watson weights, circular
// boundary, Huber loss with threshold 0.5.
//
// # Safety
// `out` must be writable.
enum RcvStatus rcv_smoother_new(struct RcvSmoother **out);

// # Safety
// `smoother` must come from [`rcv_smoother_new`] and not be used afterwards. NULL is ignored.
void rcv_smoother_free(struct RcvSmoother *smoother);

// # Safety
// `smoother` must be a live handle.
enum RcvStatus rcv_smoother_set_kernel(struct RcvSmoother *smoother, enum RcvKernel kernel);

// # Safety
// `smoother` must be a live handle.
enum RcvStatus rcv_smoother_set_weights(struct RcvSmoother *smoother,
                                        enum RcvWeights weights,
                                        enum RcvBoundary boundary);

// Loss used inside the smoother. `c` is the Huber threshold.
//
// # Safety
// `smoother` must be a live handle.
enum RcvStatus rcv_smoother_set_rho(struct RcvSmoother *smoother, enum RcvRho family, double c);

// Solver tolerance (relative to the total weight) and iteration cap.
//
// # Safety
// `smoother` must be a live handle.
enum RcvStatus rcv_smoother_set_solver(struct RcvSmoother *smoother, double tol, size_t max_iter);

// Robust fit at `x` with bandwidth `h`.
//
// # Safety
// Handles must be live; `out` must be writable.
enum RcvStatus rcv_fit_at(const struct RcvSmoother *smoother,
                          const struct RcvDataset *data,
                          double x,
                          double h,
                          double *out);

// Fit at `x` with observation `exclude` (0-based) left out.
//
// # Safety
// Handles must be live; `out` must be writable.
enum RcvStatus rcv_fit_at_excluding(const struct RcvSmoother *smoother,
                                    const struct RcvDataset *data,
                                    double x,
                                    double h,
                                    size_t exclude,
                                    double *out);

// Fits at each of the `len` points of `grid`, writing `len` values to `out`.
//
// # Safety
// Handles must be live; `grid` and `out` must hold `len` doubles.
enum RcvStatus rcv_curve(const struct RcvSmoother *smoother,
                         const struct RcvDataset *data,
                         const double *grid,
                         size_t len,
                         double h,
                         double *out);

// FFT-binned fit at the `nbins` points `j / nbins` (power of two, at most 1024).
// Needs Nadaraya–Watson weights on the circular design.
//
// # Safety
// Handles must be live; `out` must hold `nbins` doubles.
enum RcvStatus rcv_curve_binned(const struct RcvSmoother *smoother,
                                const struct RcvDataset *data,
                                size_t nbins,
                                double h,
                                double *out);

// Mean squared leave-one-out residual at each of `len` strictly increasing
// bandwidths; the minimizing bandwidth goes to `argmin_h`.
//
// # Safety
// Handles must be live; `bandwidths` and `values` must hold `len` doubles.
enum RcvStatus rcv_crvd(const struct RcvSmoother *smoother,
                        const struct RcvDataset *data,
                        const double *bandwidths,
                        size_t len,
                        double *values,
                        double *argmin_h);

// Mean loss of the leave-one-out residuals, with the loss given by `family`
// and threshold `c`.
//
// # Safety
// As [`rcv_crvd`].
enum RcvStatus rcv_rcrvd(const struct RcvSmoother *smoother,
                         const struct RcvDataset *data,
                         enum RcvRho family,
                         double c,
                         const double *bandwidths,
                         size_t len,
                         double *values,
                         double *argmin_h);

// Plug-in bandwidth with pilot bandwidth `pilot_h0`, using the smoother's
// kernel and loss. No clamping is applied.
//
// # Safety
// Handles must be live; `out` must be writable.
enum RcvStatus rcv_plug_in_bandwidth(const struct RcvSmoother *smoother,
                                     const struct RcvDataset *data,
                                     double pilot_h0,
                                     double *out);

// Difference-based noise scale `(med|Δy| / (0.6745 √2))²`.
//
// # Safety
// `data` must be live; `out` must be writable.
enum RcvStatus rcv_sigma_r(const struct RcvDataset *data, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROBUST_CV_H */
