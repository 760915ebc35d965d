#ifndef SVTIME_KERNELS_HPP
#define SVTIME_KERNELS_HPP

#include <cstddef>
#include <span>

#include "svtime/matrix.hpp"

namespace svtime {

// Trend-branch kernels over row blocks of samples. Loops are t-major so one
// weight row is reused across all samples of a block, and every accumulator
// folds in a fixed order — results are identical for any block size and any
// thread count. Definitions stay out of line so all callers share one
// compiled instance.

/// y_s = b + x_s^T * W for s in [0, n).  xs: n x T contiguous, ys: n x H.
void trend_forward(const Matrix& weights, std::span<const double> bias,
                   const double* xs, double* ys, std::size_t n);

/// dx_s = W * dy_s for s in [0, n).  dys: n x H, dxs: n x T.
void trend_input_grad(const Matrix& weights, const double* dys, double* dxs, std::size_t n);

/// dW += sum_s x_s outer dy_s, db += sum_s dy_s; samples folded in order.
/// Parallelism is across weight rows (race-free); `parallel` toggles it.
void trend_weight_grad(Matrix& dweights, std::span<double> dbias,
                       const double* xs, const double* dys, std::size_t n, bool parallel);

} // namespace svtime

#endif // SVTIME_KERNELS_HPP
