#ifndef SVTIME_EVALUATION_HPP
#define SVTIME_EVALUATION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "svtime/data.hpp"
#include "svtime/model.hpp"
#include "svtime/training.hpp"

namespace svtime {

struct Metrics {
    double mse = 0.0;
    double mae = 0.0;
    std::size_t n_windows = 0;
};

/// Stride-1 windows over a segment (already carrying any lookback overhang);
/// forecasts are instance-denormalized, metrics computed in the segment's
/// (dataset-standardized) space. Deterministic for any thread count.
/// `instance_norm=false` is an internal test hook.
Metrics metrics_on_segment(const ModelConfig& cfg, const ModelParams& params,
                           const SeriesMatrix& segment, bool parallel,
                           bool instance_norm = true);

struct EvalReport {
    std::string dataset;
    std::string variant;
    std::size_t horizon = 0;
    double mse = 0.0;
    double mae = 0.0;
    std::size_t n_windows = 0;
    std::size_t param_count = 0;
    double train_seconds = 0.0;
    double inference_ms_per_window = 0.0;
    std::uint64_t seed = 0;
    std::string metric_space = "dataset-standardized";
    std::string config_json; // resolved config snapshot

    std::string to_json() const;
    static std::string csv_header();
    std::string to_csv_row() const;
};

/// Evaluate a trained model on a test segment; timing is wall time per
/// window on a single thread over (a prefix of) the inference loop.
EvalReport evaluate(const ModelConfig& cfg, const ModelParams& params,
                    const SeriesMatrix& test_segment, const std::string& dataset_name,
                    std::uint64_t seed, double train_seconds);

/// One dataset entry of a benchmark suite.
struct DatasetSpec {
    std::string name;
    std::string path;
    SamplingFrequency frequency = SamplingFrequency::Hourly;
    SplitMode split_mode = SplitMode::Ratio;
    std::array<double, 3> ratios{0.7, 0.1, 0.2};
    std::size_t period = 0; // 0 -> default_period(frequency)
};

struct SuiteConfig {
    std::vector<DatasetSpec> datasets;
    Variant variant = Variant::SVTime;
    std::size_t lookback = 512;
    std::vector<std::size_t> horizons{96, 192, 336, 720};
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::size_t patch_count = 0; // 0 -> floor(P / 6)
    std::size_t num_blocks = 1;  // 0 -> validation block search
    Ablation ablation;
    SvtimeTBackcast svtimet_backcast = SvtimeTBackcast::ScaledMean;
    TrainConfig train;
};

struct DatasetAverage {
    std::string dataset;
    double mse_mean = 0.0, mse_std = 0.0;
    double mae_mean = 0.0, mae_std = 0.0;
};

struct SuiteResult {
    std::vector<EvalReport> reports;            // per (dataset, horizon, seed)
    std::vector<DatasetAverage> averages;       // per dataset, over horizons; mean +- std over seeds
};

/// Full benchmark protocol: per (dataset, horizon, seed) train + evaluate,
/// plus the per-dataset horizon average. Missing dataset files are skipped
/// with a warning; an entirely empty suite is an error.
SuiteResult benchmark_suite(const SuiteConfig& cfg);

struct AblationDelta {
    std::size_t horizon = 0;
    double full_mse = 0.0, ablated_mse = 0.0;
    double full_mae = 0.0, ablated_mae = 0.0;
};

struct AblationResult {
    std::vector<AblationDelta> per_horizon;
    double full_avg_mse = 0.0, ablated_avg_mse = 0.0;
    double full_avg_mae = 0.0, ablated_avg_mae = 0.0;
    double mse_change_percent = 0.0; // signed, relative to the full model
    double mae_change_percent = 0.0;
};

/// Full vs ablated run with shared seeds on one dataset; percentage deltas
/// over the horizon-averaged metrics.
AblationResult ablation_suite(const DatasetSpec& dataset, const SuiteConfig& base,
                              const Ablation& flags);

std::string suite_csv(const SuiteResult& r);
std::string suite_json(const SuiteResult& r);

} // namespace svtime

#endif // SVTIME_EVALUATION_HPP
