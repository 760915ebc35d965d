#include "svtime/kernels.hpp"

namespace svtime {

void trend_forward(const Matrix& weights, std::span<const double> bias,
                   const double* xs, double* ys, std::size_t n) {
    const std::size_t T = weights.rows;
    const std::size_t H = weights.cols;
    for (std::size_t s = 0; s < n; ++s) {
        double* y = ys + s * H;
        for (std::size_t h = 0; h < H; ++h) y[h] = bias[h];
    }
    for (std::size_t t = 0; t < T; ++t) {
        const double* wrow = weights.row(t);
        for (std::size_t s = 0; s < n; ++s) {
            const double xv = xs[s * T + t];
            double* y = ys + s * H;
            for (std::size_t h = 0; h < H; ++h) y[h] += xv * wrow[h];
        }
    }
}

void trend_input_grad(const Matrix& weights, const double* dys, double* dxs, std::size_t n) {
    const std::size_t T = weights.rows;
    const std::size_t H = weights.cols;
    for (std::size_t t = 0; t < T; ++t) {
        const double* wrow = weights.row(t);
        for (std::size_t s = 0; s < n; ++s) {
            const double* dy = dys + s * H;
            double acc = 0.0;
            for (std::size_t h = 0; h < H; ++h) acc += wrow[h] * dy[h];
            dxs[s * T + t] = acc;
        }
    }
}

void trend_weight_grad(Matrix& dweights, std::span<double> dbias,
                       const double* xs, const double* dys, std::size_t n, bool parallel) {
    const std::size_t T = dweights.rows;
    const std::size_t H = dweights.cols;
#pragma omp parallel for schedule(static) if (parallel)
    for (std::size_t t = 0; t < T; ++t) {
        double* drow = dweights.row(t);
        for (std::size_t s = 0; s < n; ++s) {
            const double xv = xs[s * T + t];
            const double* dy = dys + s * H;
            for (std::size_t h = 0; h < H; ++h) drow[h] += xv * dy[h];
        }
    }
    for (std::size_t s = 0; s < n; ++s) {
        const double* dy = dys + s * H;
        for (std::size_t h = 0; h < H; ++h) dbias[h] += dy[h];
    }
}

} // namespace svtime
