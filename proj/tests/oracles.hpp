// Independent oracles for the test suites. Everything here recomputes
// expected values from first principles, without touching the library's
// implementation paths.
#ifndef SVTIME_TESTS_ORACLES_HPP
#define SVTIME_TESTS_ORACLES_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "svtime/data.hpp"
#include "svtime/matrix.hpp"

namespace oracles {

/// Direct DFT magnitude scan over all non-DC bins; returns the bin with the
/// largest magnitude (lowest frequency on ties) mapped to a period.
inline std::size_t dft_period_scan(std::span<const double> x) {
    const std::size_t n = x.size();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);

    std::size_t best_f = 1;
    double best = -1.0;
    for (std::size_t f = 1; f <= n / 2; ++f) {
        double re = 0.0, im = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(f) *
                                 static_cast<double>(t) / static_cast<double>(n);
            re += (x[t] - mean) * std::cos(angle);
            im += (x[t] - mean) * std::sin(angle);
        }
        const double mag = re * re + im * im;
        if (mag > best) {
            best = mag;
            best_f = f;
        }
    }
    const auto period = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) / static_cast<double>(best_f)));
    return std::min(std::max<std::size_t>(period, 2), n / 2);
}

/// Central finite difference of a scalar function w.r.t. one coordinate.
inline double central_difference(const std::function<double()>& eval, double* coord,
                                 double step = 1e-5) {
    const double saved = *coord;
    *coord = saved + step;
    const double up = eval();
    *coord = saved - step;
    const double down = eval();
    *coord = saved;
    return (up - down) / (2.0 * step);
}

/// Pass when |a - b| <= floor or the relative error is below tol.
inline bool grad_close(double analytic, double numeric, double tol = 1e-4,
                       double abs_floor = 1e-8) {
    const double diff = std::fabs(analytic - numeric);
    if (diff <= abs_floor) return true;
    return diff / std::max(std::fabs(analytic), std::fabs(numeric)) < tol;
}

inline std::vector<double> sine_wave(std::size_t n, double period, double amplitude = 1.0,
                                     double phase = 0.0) {
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t)
        x[t] = amplitude * std::sin(2.0 * std::numbers::pi *
                                        (static_cast<double>(t) + phase) / period);
    return x;
}

inline svtime::SeriesMatrix make_series(const std::vector<std::vector<double>>& rows) {
    svtime::SeriesMatrix s;
    const std::size_t d = rows.size();
    const std::size_t len = rows[0].size();
    s.values = svtime::Matrix(d, len);
    for (std::size_t i = 0; i < d; ++i) {
        s.variate_names.push_back("v" + std::to_string(i));
        for (std::size_t t = 0; t < len; ++t) s.values(i, t) = rows[i][t];
    }
    for (std::size_t t = 0; t < len; ++t) s.timestamps.push_back("t" + std::to_string(t));
    return s;
}

inline svtime::SeriesMatrix random_walk_series(std::size_t d, std::size_t len,
                                               std::uint64_t seed, double period = 0.0) {
    svtime::Rng rng(seed);
    std::vector<std::vector<double>> rows(d, std::vector<double>(len));
    for (std::size_t i = 0; i < d; ++i) {
        double level = rng.uniform(-1.0, 1.0);
        for (std::size_t t = 0; t < len; ++t) {
            level += rng.uniform(-0.1, 0.1);
            double v = level;
            if (period > 0.0)
                v += std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period +
                              static_cast<double>(i));
            rows[i][t] = v;
        }
    }
    return make_series(rows);
}

} // namespace oracles

#endif // SVTIME_TESTS_ORACLES_HPP
