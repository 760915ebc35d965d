#include "svtime/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <fftw3.h>

#include "svtime/errors.hpp"

namespace svtime {

std::size_t detect_period(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 4) throw DataError("detect_period needs at least 4 points");

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);

    double maxdev = 0.0;
    std::vector<double> centered(n);
    for (std::size_t t = 0; t < n; ++t) {
        centered[t] = x[t] - mean;
        maxdev = std::max(maxdev, std::fabs(centered[t]));
    }
    if (maxdev <= 1e-12 * (1.0 + std::fabs(mean)))
        throw DataError("constant series: cannot detect a period, supply it explicitly");

    // FFTW's planner is not thread-safe; execution is.
    const std::size_t nbins = n / 2 + 1;
    std::vector<fftw_complex> spectrum(nbins);
    {
        static std::mutex planner_mutex;
        std::lock_guard<std::mutex> lock(planner_mutex);
        fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), centered.data(),
                                              spectrum.data(), FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }

    // Strongest non-DC bin; strict '>' keeps the lowest frequency on ties.
    std::size_t best_f = 1;
    double best_mag = -1.0;
    for (std::size_t f = 1; f <= n / 2; ++f) {
        const double mag = spectrum[f][0] * spectrum[f][0] + spectrum[f][1] * spectrum[f][1];
        if (mag > best_mag) {
            best_mag = mag;
            best_f = f;
        }
    }

    auto period = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) / static_cast<double>(best_f)));
    period = std::clamp<std::size_t>(period, 2, n / 2);
    return period;
}

std::size_t default_period(SamplingFrequency f) {
    switch (f) {
    case SamplingFrequency::Hourly: return 24;
    case SamplingFrequency::Min15: return 96;
    case SamplingFrequency::Min10: return 144;
    }
    throw ConfigError("unknown sampling frequency");
}

PeriodImage to_image(std::span<const double> x, std::size_t period) {
    const std::size_t n = x.size();
    if (period < 1) throw ConfigError("period must be >= 1");
    if (n < period)
        throw DataError("series of " + std::to_string(n) + " points is shorter than period " +
                        std::to_string(period));
    PeriodImage img;
    img.period = period;
    img.num_periods = n / period;
    const std::size_t rem = n % period;
    img.remainder.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(rem));
    img.values = Matrix(period, img.num_periods);
    for (std::size_t m = 0; m < img.num_periods; ++m)
        for (std::size_t p = 0; p < period; ++p)
            img.values(p, m) = x[rem + m * period + p];
    return img;
}

std::vector<double> from_image(const Matrix& img, std::size_t horizon) {
    if (img.rows * img.cols < horizon)
        throw DataError("image covers " + std::to_string(img.rows * img.cols) +
                        " points, fewer than horizon " + std::to_string(horizon));
    std::vector<double> out(horizon);
    for (std::size_t h = 0; h < horizon; ++h)
        out[h] = img(h % img.rows, h / img.rows);
    return out;
}

PatchLayout patch_layout(std::size_t period, std::size_t patch_count) {
    if (patch_count < 1 || patch_count > period)
        throw ConfigError("patch count " + std::to_string(patch_count) +
                          " out of range [1, " + std::to_string(period) + "]");
    PatchLayout layout;
    layout.patch_count = patch_count;
    layout.boundaries.resize(patch_count + 1);
    const std::size_t base = period / patch_count;
    for (std::size_t k = 0; k < patch_count; ++k)
        layout.boundaries[k] = k * base;
    layout.boundaries[patch_count] = period;
    return layout;
}

} // namespace svtime
