#ifndef SVTIME_TRAINING_HPP
#define SVTIME_TRAINING_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "svtime/data.hpp"
#include "svtime/model.hpp"

namespace svtime {

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 512; // univariate (window, variate) samples
    std::size_t max_epochs = 50;
    std::size_t patience = 5;
    std::uint64_t seed = 1;
    double beta1 = 0.9, beta2 = 0.999, eps_opt = 1e-8;
    bool block_search = false;

    enum class Optimizer { Adam, Sgd };
    Optimizer optimizer = Optimizer::Adam;
    double grad_clip = 5.0;           // global-norm clip, applied only above the threshold
    bool halve_lr_on_plateau = false; // constant LR by default
    int threads = 0;                  // 0 = library default

    void validate() const;
};

/// (1 / (D*H)) * sum of squared errors. Shapes must match.
double mse_loss(const Matrix& pred, const Matrix& target);

/// One univariate training sample: a (window, variate) pair of a segment.
struct SampleSpec {
    const SeriesMatrix* segment = nullptr;
    std::uint32_t origin = 0;
    std::uint32_t variate = 0;
};

struct BatchResult {
    GradientSet grads;
    double loss = 0.0; // mean over batch samples and horizon steps
};

/// Two-phase batch gradients: samples forward/backward in parallel, then
/// parameter-major accumulation with a fixed per-element fold order. Results
/// are bit-identical for any thread count.
BatchResult batch_gradients(std::span<const SampleSpec> batch, const ModelConfig& cfg,
                            const ModelParams& params, bool parallel);

/// Straightforward sample-major reference implementation, kept for testing
/// the parallel path against.
BatchResult batch_gradients_serial(std::span<const SampleSpec> batch, const ModelConfig& cfg,
                                   const ModelParams& params);

struct AdamState {
    GradientSet m, v;
    std::size_t step = 0;
};

/// Adaptive-moment update with bias correction; lr taken from `config`
/// unless `lr_override` > 0. Throws NumericError on non-finite gradients,
/// naming the tensor.
void optimizer_step(ModelParams& params, GradientSet& grads, AdamState& state,
                    const TrainConfig& config, double lr_override = 0.0);

/// Global-norm clip at `max_norm`; no-op when the norm is below it.
/// Returns the pre-clip norm.
double clip_global_norm(GradientSet& grads, double max_norm);

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_mse = 0.0;
    double val_mae = 0.0;
    double seconds = 0.0;
};

struct TrainingLog {
    std::vector<EpochRecord> epochs;
    std::string to_jsonl() const;
};

struct FitResult {
    ModelParams params; // best-validation snapshot
    TrainingLog log;
    std::size_t best_epoch = 0;
    double best_val_mse = std::numeric_limits<double>::infinity();
    double train_seconds = 0.0;
};

/// Epochs over seeded shuffles of all train (window, variate) samples;
/// early-stops on validation MSE (computed on `val_ext`, the validation
/// segment with its lookback overhang) and returns the best snapshot.
FitResult fit(const SeriesMatrix& train_seg, const SeriesMatrix& val_ext,
              const ModelConfig& cfg, const TrainConfig& tc);

struct BlockSearchResult {
    std::size_t best_blocks = 1;
    std::array<double, 3> val_mse{}; // index b-1 for b blocks; NaN when that count failed
    FitResult fit;
};

/// Argmin over the candidate block counts, ties toward fewer blocks;
/// NaN entries mark failed candidates. Throws when every entry is NaN.
std::size_t pick_block_count(const std::array<double, 3>& val_mse);

/// Trains one model per block count in [1, 3]; picks the minimum validation
/// MSE, ties toward fewer blocks. Failed counts are excluded with a warning;
/// it is an error only if every count fails.
BlockSearchResult block_search(const SeriesMatrix& train_seg, const SeriesMatrix& val_ext,
                               const ModelConfig& base_cfg, const TrainConfig& tc);

} // namespace svtime

#endif // SVTIME_TRAINING_HPP
