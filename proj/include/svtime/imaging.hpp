#ifndef SVTIME_IMAGING_HPP
#define SVTIME_IMAGING_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "svtime/data.hpp"
#include "svtime/matrix.hpp"

namespace svtime {

/// A lookback reshaped into a P x N period image: row = within-period index,
/// column = period index (oldest first). The oldest T mod P points don't fit
/// a full period and are kept aside as `remainder`.
struct PeriodImage {
    Matrix values; // P x N
    std::size_t period = 0;      // P
    std::size_t num_periods = 0; // N = floor(T / P)
    std::vector<double> remainder;
};

/// Dominant period via the magnitude spectrum of the mean-removed series:
/// pick the strongest non-DC bin (ties -> lowest frequency, i.e. longest
/// period) and return round(T / f*), clamped to [2, floor(T/2)].
/// Constant input is an error — supply the period explicitly.
std::size_t detect_period(std::span<const double> x);

/// One-day period for the dataset's sampling frequency:
/// Hourly -> 24, Min15 -> 96, Min10 -> 144.
std::size_t default_period(SamplingFrequency f);

PeriodImage to_image(std::span<const double> x, std::size_t period);

/// Column-major flatten (oldest column first, top to bottom), truncated to
/// the first `horizon` values. Requires img.rows * img.cols >= horizon.
std::vector<double> from_image(const Matrix& img, std::size_t horizon);

/// Partition of the P within-period rows into K patches. The first K-1
/// patches have length floor(P/K); the last takes the leftover rows.
struct PatchLayout {
    std::size_t patch_count = 0;
    std::vector<std::size_t> boundaries; // K+1 indices, 0 .. P

    std::size_t patch_len(std::size_t k) const { return boundaries[k + 1] - boundaries[k]; }
};

PatchLayout patch_layout(std::size_t period, std::size_t patch_count);

} // namespace svtime

#endif // SVTIME_IMAGING_HPP
