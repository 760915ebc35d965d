#ifndef SVTIME_DATA_HPP
#define SVTIME_DATA_HPP

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "svtime/matrix.hpp"

namespace svtime {

/// Multivariate series: D variate rows x L time columns, chronological.
struct SeriesMatrix {
    Matrix values; // D x L
    std::vector<std::string> variate_names;
    std::vector<std::string> timestamps; // opaque, order-defining only

    std::size_t variates() const { return values.rows; }
    std::size_t length() const { return values.cols; }
};

/// Load a CSV time series: header row; first column timestamps; remaining
/// columns real-valued (64-bit parse, '.' decimal point, no separators).
/// Rejects non-numeric cells (naming data row / column) and non-finite
/// values (naming the variate row).
SeriesMatrix load_csv(const std::string& path);

enum class SamplingFrequency { Hourly, Min15, Min10 };

enum class SplitMode { Ratio, EttBorder };

struct SplitSpec {
    SplitMode mode = SplitMode::Ratio;
    std::array<double, 3> ratios{0.7, 0.1, 0.2};          // Ratio mode
    std::array<std::size_t, 3> border_sizes{0, 0, 0};     // EttBorder mode

    static SplitSpec ratio(double train, double val, double test);
    /// Conventional ETT borders: 12/4/4 months of points.
    /// Hourly -> 8640/2880/2880, Min15 -> 34560/11520/11520.
    static SplitSpec ett_border(SamplingFrequency f);
};

/// Chronological train/val/test segments. `val_ext`/`test_ext` carry the
/// lookback overhang into the preceding segment's tail (up to T points),
/// which is the border-based window convention for evaluation splits.
struct SplitResult {
    SeriesMatrix train, val, test;  // pure contiguous segments
    SeriesMatrix val_ext, test_ext; // with overhang prefix
    std::size_t val_overhang = 0, test_overhang = 0;
};

SplitResult split(const SeriesMatrix& series, const SplitSpec& spec,
                  std::size_t lookback, std::size_t horizon);

/// Stride-1 enumeration of valid window origins (index of the first target
/// step): T, T+1, ..., S-H. Throws DataError when no window fits.
std::vector<std::size_t> window_origins(std::size_t segment_len, std::size_t lookback,
                                        std::size_t horizon);

/// Windows fitting entirely inside a segment of length S: S - T - H + 1.
std::size_t count_windows(std::size_t segment_len, std::size_t lookback, std::size_t horizon);

/// Lookback placements only (S - T + 1) — the "dataset size" statistic
/// convention used by the benchmark tables.
std::size_t lookback_window_count(std::size_t segment_len, std::size_t lookback);

struct WindowPair {
    Matrix lookback; // D x T
    Matrix target;   // D x H
    std::size_t origin_index = 0;
};

WindowPair window_at(const SeriesMatrix& segment, std::size_t origin,
                     std::size_t lookback, std::size_t horizon);

/// Per-window instance-normalization statistics, one entry per variate.
/// stddev is floored at kStdFloor so constant rows stay finite.
struct NormStats {
    std::vector<double> mean;
    std::vector<double> stddev;
};

inline constexpr double kStdFloor = 1e-8;

/// Population mean/std of one row. With mean_center=false the mean is fixed
/// at 0 and the scale is the RMS, so constant rows map near 1 instead of
/// exploding against the std floor.
void row_norm_stats(std::span<const double> row, bool mean_center, double& mean, double& stddev);

/// out[i] = (in[i] - mean_i) / stddev_i per variate row.
std::pair<Matrix, NormStats> normalize(const Matrix& lookback, bool mean_center = true);

Matrix denormalize(const Matrix& normalized, const NormStats& stats);

/// Dataset-level z-scoring, fit on the train split and applied to every
/// segment; reported metrics live in this standardized space.
struct Standardization {
    std::vector<double> mean;
    std::vector<double> stddev;
};

Standardization fit_standardization(const SeriesMatrix& train);
SeriesMatrix standardize(const SeriesMatrix& s, const Standardization& st);
/// Inverse transform applied to forecast rows (D x H), back to raw units.
void destandardize_rows(Matrix& rows, const Standardization& st);

} // namespace svtime

#endif // SVTIME_DATA_HPP
