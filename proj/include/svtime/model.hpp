#ifndef SVTIME_MODEL_HPP
#define SVTIME_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "svtime/imaging.hpp"
#include "svtime/matrix.hpp"

namespace svtime {

enum class Variant { SVTime, SVTimeT };

/// How an SVTime-t block reconstructs its lookback from the patch scalars.
/// ScaledMean: patch row k backcasts w_p[k] times the row's cross-period
/// mean, tiled over all N columns. ScaleIdentity: each historical column is
/// scaled by w_p[k] in place.
enum class SvtimeTBackcast { ScaledMean, ScaleIdentity };

struct Ablation {
    bool no_ib2 = false;        // single patch (K = 1)
    bool no_ib3 = false;        // uniform weights in place of the annealing function (SVTime-t)
    bool no_backcast = false;   // drop the trend/gate decomposition, forecast = period branch
    bool no_mean_center = false;// instance normalization divides by scale only
};

struct ModelConfig {
    Variant variant = Variant::SVTime;
    std::size_t lookback = 512;  // T
    std::size_t horizon = 96;    // H
    std::size_t period = 24;     // P
    std::size_t patch_count = 4; // K
    std::size_t num_blocks = 1;  // searched in [1, 3]
    Ablation ablation;
    SvtimeTBackcast svtimet_backcast = SvtimeTBackcast::ScaledMean;

    std::size_t history_periods() const { return lookback / period; }          // N
    std::size_t forecast_periods() const { return (horizon + period - 1) / period; } // M
    std::size_t remainder_len() const { return lookback % period; }
    std::size_t effective_patches() const { return ablation.no_ib2 ? 1 : patch_count; }

    void validate() const; // throws ConfigError
};

/// SVTime block: one fully learnable matrix per patch; N x (N+M) in the
/// final block (backcast columns then forecast columns), N x N in
/// intermediate blocks.
struct SvtimeBlockParams {
    std::vector<Matrix> patch_weights;
};

/// SVTime-t block: annealing-function scalers plus per-patch scalars;
/// exactly 2(T+1) + K parameters.
struct SvtimeTBlockParams {
    std::vector<double> w_alpha;
    double b_alpha = 0.0;
    std::vector<double> w_beta;
    double b_beta = 0.0;
    std::vector<double> w_p;
};

using BlockParams = std::variant<SvtimeBlockParams, SvtimeTBlockParams>;

/// Trend linear map, bias and gate wrapping the block stack.
struct FrameworkParams {
    Matrix trend_weights;            // W^B, T x H
    std::vector<double> trend_bias;  // b^B, length H
    double gate_raw = 0.0;           // w^g, g = sigmoid(w^g)
};

struct ModelParams {
    std::vector<BlockParams> blocks;
    std::optional<FrameworkParams> framework; // absent under NoBackcast
};

/// Gradients mirror the parameter layout exactly.
using GradientSet = ModelParams;

ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed);
GradientSet zeros_like(const ModelConfig& cfg);

/// Closed-form trainable-scalar count; matches the allocated store exactly.
std::size_t parameter_count(const ModelConfig& cfg);

/// Flat view over every parameter tensor, in a stable order shared by the
/// optimizer, the checkpoint format and gradient storage.
struct TensorRef {
    std::string name;
    double* data = nullptr;
    std::size_t size = 0;
    std::vector<std::size_t> shape;
};

std::vector<TensorRef> tensor_refs(ModelParams& params);

// --- numerics ---------------------------------------------------------

/// ln(1 + e^z) with the overflow-safe branch for large z.
double softplus(double z);
double sigmoid(double z);

/// Eq-style annealing weights: entry (n, j) proportional to
/// exp(alpha * (n+1-N) / (1 + beta*j)) for n in 0..N-1, j in 0..M-1,
/// normalized so each column sums to 1 (max-shift before exponentiation).
Matrix annealing_weights(std::size_t forecast_periods, std::size_t history_periods,
                         double alpha, double beta);

/// alpha = softplus(w_alpha . x + b_alpha), beta likewise; per variate.
std::pair<double, double> compute_scalers(std::span<const double> x,
                                          const SvtimeTBlockParams& params);

// --- block and framework forward --------------------------------------

/// SVTime block: patch rows of the output are the input patch rows times
/// that patch's weight matrix. Final blocks emit P x (N+M) (backcast then
/// forecast columns); intermediates emit the P x N re-parameterized history.
Matrix svtime_block_forward(const PeriodImage& img, const PatchLayout& layout,
                            const SvtimeBlockParams& params, bool is_final);

/// SVTime-t block: forecast patches use w_p[k] * annealing weights; the
/// backcast uses the patch scalars only. Returns (backcast P x N,
/// forecast P x M); the forecast is empty for intermediate blocks.
std::pair<Matrix, Matrix> svtime_t_block_forward(const PeriodImage& img,
                                                 const PatchLayout& layout,
                                                 std::span<const double> x,
                                                 const SvtimeTBlockParams& params,
                                                 bool is_final, const ModelConfig& cfg);

/// Everything the backward pass needs from one block's forward evaluation.
struct BlockTrace {
    std::vector<double> input;     // x_l, length T
    PeriodImage image;             // to_image(x_l)
    Matrix out;                    // P x (N+M) final, P x N intermediate
    // SVTime-t extras
    double z_alpha = 0.0, z_beta = 0.0, alpha = 0.0, beta = 0.0;
    Matrix weights;                // annealing W, N x M (final block)
    Matrix proj;                   // forecast projection before w_p, P x M (final block)
    std::vector<double> row_mean;  // per-row history mean, length P (ScaledMean)
};

struct ForwardTrace {
    std::vector<BlockTrace> blocks;
    std::vector<double> backcast;        // x_hat, length T (zero on remainder positions)
    std::vector<double> period_forecast; // y_hat, length H
    std::vector<double> residual;        // delta x = lookback - x_hat
    std::vector<double> trend_forecast;  // delta y
    std::vector<double> final;           // g * trend + (1-g) * period
    double gate = 0.0;
};

/// Full forward pass on one normalized lookback.
ForwardTrace framework_forward(std::span<const double> x, const ModelConfig& cfg,
                               const ModelParams& params);

/// Per-sample gradient contributions that expand into parameter gradients.
struct SampleGrads {
    struct Block {
        Matrix d_out;                 // gradient w.r.t. the block's output image
        double dz_alpha = 0.0, dz_beta = 0.0;
        std::vector<double> dw_p;     // per-patch scalar contributions
    };
    std::vector<Block> blocks;
    std::vector<double> d_trend;      // dL/d(delta y), length H
    double d_gate_raw = 0.0;          // dL/dw^g contribution
};

/// Backward through the block stack given dL/dy_hat and dL/dx_hat.
/// Fills per-block d_out / scaler contributions; parameter gradients are
/// expanded later from these plus the trace.
void blocks_backward(const ForwardTrace& trace, const ModelConfig& cfg,
                     const ModelParams& params, std::span<const double> d_period,
                     std::span<const double> d_backcast, SampleGrads& out);

/// Expand one sample's contributions into the gradient set (sample-major
/// fold; the serial reference path).
void accumulate_sample(GradientSet& grads, const ModelConfig& cfg, const ModelParams& params,
                       const ForwardTrace& trace, const SampleGrads& sg);

/// Forecast a D x T lookback: per variate instance-normalize, run the
/// framework, denormalize. Shared parameters across variates
/// (channel independence). `instance_norm=false` is an internal test hook.
Matrix forecast(const Matrix& lookback, const ModelConfig& cfg, const ModelParams& params,
                bool instance_norm = true);

} // namespace svtime

#endif // SVTIME_MODEL_HPP
