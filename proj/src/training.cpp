#include "svtime/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "svtime/errors.hpp"
#include "svtime/evaluation.hpp"
#include "svtime/kernels.hpp"

namespace svtime {

void TrainConfig::validate() const {
    if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
    if (patience < 1) throw ConfigError("patience must be >= 1");
    if (patience >= max_epochs) throw ConfigError("patience must be smaller than max_epochs");
}

double mse_loss(const Matrix& pred, const Matrix& target) {
    if (!pred.same_shape(target)) throw DataError("mse_loss: shape mismatch");
    double se = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred.v[i] - target.v[i];
        se += d * d;
    }
    return se / static_cast<double>(pred.size());
}

namespace {

/// Extract one (window, variate) sample and instance-normalize it.
void build_sample(const SampleSpec& spec, const ModelConfig& cfg,
                  std::vector<double>& x, std::vector<double>& ynorm) {
    const std::size_t T = cfg.lookback;
    const std::size_t H = cfg.horizon;
    const double* row = spec.segment->values.row(spec.variate);
    const double* look = row + spec.origin - T;
    const double* tgt = row + spec.origin;
    double mean = 0.0, stddev = 1.0;
    row_norm_stats({look, T}, !cfg.ablation.no_mean_center, mean, stddev);
    const double inv = 1.0 / stddev;
    x.resize(T);
    ynorm.resize(H);
    for (std::size_t t = 0; t < T; ++t) x[t] = (look[t] - mean) * inv;
    for (std::size_t h = 0; h < H; ++h) ynorm[h] = (tgt[h] - mean) * inv;
}

struct SampleWork {
    ForwardTrace trace;
    SampleGrads grads;
    std::vector<double> ynorm;
    double se = 0.0; // sum over horizon of squared error
};

/// Forward + per-sample backward; shared by the serial and parallel paths.
void process_sample(const SampleSpec& spec, const ModelConfig& cfg, const ModelParams& params,
                    std::size_t batch_size, SampleWork& work) {
    const std::size_t H = cfg.horizon;
    std::vector<double> x;
    build_sample(spec, cfg, x, work.ynorm);
    work.trace = framework_forward(x, cfg, params);

    const double scale = 2.0 / (static_cast<double>(batch_size) * static_cast<double>(H));
    std::vector<double> d_final(H);
    work.se = 0.0;
    for (std::size_t h = 0; h < H; ++h) {
        const double diff = work.trace.final[h] - work.ynorm[h];
        work.se += diff * diff;
        d_final[h] = scale * diff;
    }

    std::vector<double> d_period(H);
    std::vector<double> d_backcast;
    if (!cfg.ablation.no_backcast) {
        const FrameworkParams& fw = *params.framework;
        const double g = work.trace.gate;
        work.grads.d_trend.resize(H);
        work.grads.d_gate_raw = 0.0;
        for (std::size_t h = 0; h < H; ++h) {
            work.grads.d_gate_raw += d_final[h] *
                (work.trace.trend_forecast[h] - work.trace.period_forecast[h]) * g * (1.0 - g);
            work.grads.d_trend[h] = d_final[h] * g;
            d_period[h] = d_final[h] * (1.0 - g);
        }
        d_backcast.resize(cfg.lookback);
        trend_input_grad(fw.trend_weights, work.grads.d_trend.data(), d_backcast.data(), 1);
        for (double& v : d_backcast) v = -v;
    } else {
        d_period = d_final;
    }
    blocks_backward(work.trace, cfg, params, d_period, d_backcast, work.grads);
}

} // namespace

BatchResult batch_gradients_serial(std::span<const SampleSpec> batch, const ModelConfig& cfg,
                                   const ModelParams& params) {
    BatchResult res;
    res.grads = zeros_like(cfg);
    double se = 0.0;
    SampleWork work;
    for (const SampleSpec& spec : batch) {
        process_sample(spec, cfg, params, batch.size(), work);
        accumulate_sample(res.grads, cfg, params, work.trace, work.grads);
        se += work.se;
    }
    res.loss = se / (static_cast<double>(batch.size()) * static_cast<double>(cfg.horizon));
    return res;
}

BatchResult batch_gradients(std::span<const SampleSpec> batch, const ModelConfig& cfg,
                            const ModelParams& params, bool parallel) {
    const std::size_t B = batch.size();
    const std::size_t T = cfg.lookback;
    const std::size_t H = cfg.horizon;
    BatchResult res;
    res.grads = zeros_like(cfg);

    std::vector<SampleWork> works(B);
    const bool has_trend = !cfg.ablation.no_backcast;
    std::vector<double> residuals(has_trend ? B * T : 0);
    std::vector<double> d_trends(has_trend ? B * H : 0);

    // Phase 1: independent per-sample forward/backward.
#pragma omp parallel for schedule(static) if (parallel)
    for (std::size_t s = 0; s < B; ++s) {
        process_sample(batch[s], cfg, params, B, works[s]);
        if (has_trend) {
            std::copy(works[s].trace.residual.begin(), works[s].trace.residual.end(),
                      residuals.begin() + static_cast<std::ptrdiff_t>(s * T));
            std::copy(works[s].grads.d_trend.begin(), works[s].grads.d_trend.end(),
                      d_trends.begin() + static_cast<std::ptrdiff_t>(s * H));
        }
    }

    // Phase 2: parameter-major accumulation, samples folded in index order.
    const PatchLayout layout = patch_layout(cfg.period, cfg.effective_patches());
    const std::size_t N = cfg.history_periods();
    for (std::size_t l = 0; l < cfg.num_blocks; ++l) {
        if (auto* gb = std::get_if<SvtimeBlockParams>(&res.grads.blocks[l])) {
            for (std::size_t k = 0; k < layout.patch_count; ++k) {
                Matrix& gw = gb->patch_weights[k];
                const std::size_t p0 = layout.boundaries[k];
                const std::size_t p1 = layout.boundaries[k + 1];
#pragma omp parallel for schedule(static) if (parallel)
                for (std::size_t n = 0; n < N; ++n) {
                    double* grow = gw.row(n);
                    for (std::size_t s = 0; s < B; ++s) {
                        const Matrix& img = works[s].trace.blocks[l].image.values;
                        const Matrix& dout = works[s].grads.blocks[l].d_out;
                        for (std::size_t p = p0; p < p1; ++p) {
                            const double iv = img(p, n);
                            const double* drow = dout.row(p);
                            for (std::size_t c = 0; c < gw.cols; ++c) grow[c] += iv * drow[c];
                        }
                    }
                }
            }
        } else {
            auto& gb2 = std::get<SvtimeTBlockParams>(res.grads.blocks[l]);
            for (std::size_t k = 0; k < layout.patch_count; ++k)
                for (std::size_t s = 0; s < B; ++s) gb2.w_p[k] += works[s].grads.blocks[l].dw_p[k];
            for (std::size_t s = 0; s < B; ++s) {
                gb2.b_alpha += works[s].grads.blocks[l].dz_alpha;
                gb2.b_beta += works[s].grads.blocks[l].dz_beta;
            }
#pragma omp parallel for schedule(static) if (parallel)
            for (std::size_t t = 0; t < T; ++t) {
                double ga = 0.0, gbeta = 0.0;
                for (std::size_t s = 0; s < B; ++s) {
                    const double xt = works[s].trace.blocks[l].input[t];
                    ga += works[s].grads.blocks[l].dz_alpha * xt;
                    gbeta += works[s].grads.blocks[l].dz_beta * xt;
                }
                gb2.w_alpha[t] += ga;
                gb2.w_beta[t] += gbeta;
            }
        }
    }
    if (has_trend) {
        FrameworkParams& gfw = *res.grads.framework;
        trend_weight_grad(gfw.trend_weights, gfw.trend_bias, residuals.data(), d_trends.data(),
                          B, parallel);
        for (std::size_t s = 0; s < B; ++s) gfw.gate_raw += works[s].grads.d_gate_raw;
    }

    double se = 0.0;
    for (std::size_t s = 0; s < B; ++s) se += works[s].se;
    res.loss = se / (static_cast<double>(B) * static_cast<double>(H));
    return res;
}

double clip_global_norm(GradientSet& grads, double max_norm) {
    auto refs = tensor_refs(grads);
    double sq = 0.0;
    for (const TensorRef& r : refs)
        for (std::size_t i = 0; i < r.size; ++i) sq += r.data[i] * r.data[i];
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        const double scale = max_norm / norm;
        for (const TensorRef& r : refs)
            for (std::size_t i = 0; i < r.size; ++i) r.data[i] *= scale;
    }
    return norm;
}

void optimizer_step(ModelParams& params, GradientSet& grads, AdamState& state,
                    const TrainConfig& config, double lr_override) {
    const double lr = lr_override > 0.0 ? lr_override : config.learning_rate;
    auto prefs = tensor_refs(params);
    auto grefs = tensor_refs(grads);
    auto mrefs = tensor_refs(state.m);
    auto vrefs = tensor_refs(state.v);

    for (const TensorRef& g : grefs)
        for (std::size_t i = 0; i < g.size; ++i)
            if (!std::isfinite(g.data[i]))
                throw NumericError("non-finite gradient in " + g.name);

    state.step += 1;
    if (config.optimizer == TrainConfig::Optimizer::Sgd) {
        for (std::size_t r = 0; r < prefs.size(); ++r)
            for (std::size_t i = 0; i < prefs[r].size; ++i)
                prefs[r].data[i] -= lr * grefs[r].data[i];
        return;
    }
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
    for (std::size_t r = 0; r < prefs.size(); ++r) {
        double* p = prefs[r].data;
        double* g = grefs[r].data;
        double* m = mrefs[r].data;
        double* v = vrefs[r].data;
        for (std::size_t i = 0; i < prefs[r].size; ++i) {
            m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
            v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p[i] -= lr * mhat / (std::sqrt(vhat) + config.eps_opt);
        }
    }
}

std::string TrainingLog::to_jsonl() const {
    std::ostringstream out;
    for (const EpochRecord& e : epochs) {
        nlohmann::json j{{"epoch", e.epoch},
                         {"train_loss", e.train_loss},
                         {"val_mse", e.val_mse},
                         {"val_mae", e.val_mae},
                         {"seconds", e.seconds}};
        out << j.dump() << '\n';
    }
    return out.str();
}

FitResult fit(const SeriesMatrix& train_seg, const SeriesMatrix& val_ext,
              const ModelConfig& cfg, const TrainConfig& tc) {
    cfg.validate();
    tc.validate();
#ifdef _OPENMP
    if (tc.threads > 0) omp_set_num_threads(tc.threads);
#endif
    const bool parallel = tc.threads != 1;
    const std::size_t T = cfg.lookback;
    const std::size_t H = cfg.horizon;

    const std::vector<std::size_t> origins = window_origins(train_seg.length(), T, H);
    const std::size_t D = train_seg.variates();
    std::vector<SampleSpec> samples;
    samples.reserve(origins.size() * D);
    for (std::size_t o : origins)
        for (std::size_t d = 0; d < D; ++d)
            samples.push_back({&train_seg, static_cast<std::uint32_t>(o),
                               static_cast<std::uint32_t>(d)});

    ModelParams params = init_params(cfg, tc.seed);
    AdamState state{zeros_like(cfg), zeros_like(cfg), 0};
    Rng shuffler(tc.seed ^ 0x9e3779b97f4a7c15ULL);

    FitResult result;
    double lr = tc.learning_rate;
    std::size_t bad_epochs = 0;
    const auto run_start = std::chrono::steady_clock::now();

    for (std::size_t epoch = 1; epoch <= tc.max_epochs; ++epoch) {
        const auto epoch_start = std::chrono::steady_clock::now();
        shuffler.shuffle(samples);

        double epoch_se_over_h = 0.0;
        for (std::size_t start = 0; start < samples.size(); start += tc.batch_size) {
            const std::size_t len = std::min(tc.batch_size, samples.size() - start);
            std::span<const SampleSpec> batch(samples.data() + start, len);
            BatchResult br = batch_gradients(batch, cfg, params, parallel);
            epoch_se_over_h += br.loss * static_cast<double>(len);
            clip_global_norm(br.grads, tc.grad_clip);
            optimizer_step(params, br.grads, state, tc, lr);
        }
        const double train_loss = epoch_se_over_h / static_cast<double>(samples.size());

        const Metrics vm = metrics_on_segment(cfg, params, val_ext, parallel);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_start).count();
        result.log.epochs.push_back({epoch, train_loss, vm.mse, vm.mae, secs});

        if (!std::isfinite(vm.mse))
            throw NumericError("validation MSE diverged (non-finite) at epoch " +
                               std::to_string(epoch));

        if (vm.mse < result.best_val_mse) {
            result.best_val_mse = vm.mse;
            result.best_epoch = epoch;
            result.params = params;
            bad_epochs = 0;
        } else {
            ++bad_epochs;
            if (tc.halve_lr_on_plateau) lr *= 0.5;
        }
        if (bad_epochs >= tc.patience) break;
    }
    result.train_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start).count();
    return result;
}

std::size_t pick_block_count(const std::array<double, 3>& val_mse) {
    std::size_t best = 0;
    bool found = false;
    for (std::size_t b = 0; b < 3; ++b) {
        if (std::isnan(val_mse[b])) continue;
        if (!found || val_mse[b] < val_mse[best]) {
            best = b;
            found = true;
        }
    }
    if (!found) throw NumericError("block search failed for every block count in [1, 3]");
    return best + 1;
}

BlockSearchResult block_search(const SeriesMatrix& train_seg, const SeriesMatrix& val_ext,
                               const ModelConfig& base_cfg, const TrainConfig& tc) {
    BlockSearchResult out;
    out.val_mse.fill(std::numeric_limits<double>::quiet_NaN());
    std::array<std::optional<FitResult>, 3> fits;
    for (std::size_t blocks = 1; blocks <= 3; ++blocks) {
        ModelConfig cfg = base_cfg;
        cfg.num_blocks = blocks;
        try {
            FitResult fr = fit(train_seg, val_ext, cfg, tc);
            out.val_mse[blocks - 1] = fr.best_val_mse;
            fits[blocks - 1] = std::move(fr);
        } catch (const std::exception& e) {
            std::cerr << "warning: block count " << blocks << " failed: " << e.what() << '\n';
        }
    }
    out.best_blocks = pick_block_count(out.val_mse);
    out.fit = std::move(*fits[out.best_blocks - 1]);
    return out;
}

} // namespace svtime
