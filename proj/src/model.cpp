#include "svtime/model.hpp"

#include <algorithm>
#include <cmath>

#include "svtime/data.hpp"
#include "svtime/errors.hpp"
#include "svtime/kernels.hpp"

namespace svtime {

void ModelConfig::validate() const {
    if (lookback < 1 || horizon < 1) throw ConfigError("lookback and horizon must be >= 1");
    if (period < 1) throw ConfigError("period must be >= 1");
    if (period > lookback)
        throw ConfigError("lookback " + std::to_string(lookback) + " is shorter than period " +
                          std::to_string(period));
    if (patch_count < 1) throw ConfigError("patch count must be >= 1");
    if (patch_count > period) throw ConfigError("patch count exceeds period");
    if (num_blocks < 1 || num_blocks > 3)
        throw ConfigError("num_blocks must lie in [1, 3]");
    if (ablation.no_ib3 && variant != Variant::SVTimeT)
        throw ConfigError("no-ib3 applies to the svtime-t variant only");
}

double softplus(double z) {
    if (z > 20.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

Matrix annealing_weights(std::size_t forecast_periods, std::size_t history_periods,
                         double alpha, double beta) {
    const std::size_t M = forecast_periods;
    const std::size_t N = history_periods;
    Matrix w(N, M);
    for (std::size_t j = 0; j < M; ++j) {
        const double damp = 1.0 + beta * static_cast<double>(j);
        double emax = -1e300;
        for (std::size_t n = 0; n < N; ++n) {
            const double e = alpha * (static_cast<double>(n) + 1.0 - static_cast<double>(N)) / damp;
            w(n, j) = e;
            emax = std::max(emax, e);
        }
        double sum = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            w(n, j) = std::exp(w(n, j) - emax);
            sum += w(n, j);
        }
        for (std::size_t n = 0; n < N; ++n) w(n, j) /= sum;
    }
    return w;
}

std::pair<double, double> compute_scalers(std::span<const double> x,
                                          const SvtimeTBlockParams& params) {
    double za = params.b_alpha, zb = params.b_beta;
    for (std::size_t t = 0; t < x.size(); ++t) {
        za += params.w_alpha[t] * x[t];
        zb += params.w_beta[t] * x[t];
    }
    return {softplus(za), softplus(zb)};
}

// --- parameter store ----------------------------------------------------

namespace {

ModelParams make_params(const ModelConfig& cfg, Rng* rng) {
    cfg.validate();
    const std::size_t N = cfg.history_periods();
    const std::size_t M = cfg.forecast_periods();
    const std::size_t K = cfg.effective_patches();
    ModelParams p;
    p.blocks.reserve(cfg.num_blocks);
    for (std::size_t l = 0; l < cfg.num_blocks; ++l) {
        const bool is_final = (l + 1 == cfg.num_blocks);
        if (cfg.variant == Variant::SVTime) {
            SvtimeBlockParams b;
            const std::size_t cols = is_final ? N + M : N;
            b.patch_weights.reserve(K);
            for (std::size_t k = 0; k < K; ++k) {
                Matrix w(N, cols);
                if (rng) {
                    const double bound = 1.0 / static_cast<double>(N);
                    for (double& e : w.v) e = rng->uniform(-bound, bound);
                }
                b.patch_weights.push_back(std::move(w));
            }
            p.blocks.emplace_back(std::move(b));
        } else {
            SvtimeTBlockParams b;
            b.w_alpha.assign(cfg.lookback, 0.0);
            b.w_beta.assign(cfg.lookback, 0.0);
            // softplus(b_alpha) = 1.0, softplus(b_beta) = 0.5 at init
            b.b_alpha = rng ? std::log(std::exp(1.0) - 1.0) : 0.0;
            b.b_beta = rng ? std::log(std::exp(0.5) - 1.0) : 0.0;
            b.w_p.assign(K, rng ? 1.0 : 0.0);
            p.blocks.emplace_back(std::move(b));
        }
    }
    if (!cfg.ablation.no_backcast) {
        FrameworkParams fw;
        fw.trend_weights = Matrix(cfg.lookback, cfg.horizon);
        fw.trend_bias.assign(cfg.horizon, 0.0);
        fw.gate_raw = 0.0;
        p.framework = std::move(fw);
    }
    return p;
}

} // namespace

ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    return make_params(cfg, &rng);
}

GradientSet zeros_like(const ModelConfig& cfg) { return make_params(cfg, nullptr); }

std::size_t parameter_count(const ModelConfig& cfg) {
    cfg.validate();
    const std::size_t N = cfg.history_periods();
    const std::size_t M = cfg.forecast_periods();
    const std::size_t K = cfg.effective_patches();
    const std::size_t T = cfg.lookback;
    const std::size_t H = cfg.horizon;
    std::size_t count = 0;
    if (cfg.variant == Variant::SVTime)
        count = (cfg.num_blocks - 1) * K * N * N + K * N * (N + M);
    else
        count = cfg.num_blocks * (2 * (T + 1) + K);
    if (!cfg.ablation.no_backcast) count += T * H + H + 1;
    return count;
}

std::vector<TensorRef> tensor_refs(ModelParams& params) {
    std::vector<TensorRef> refs;
    for (std::size_t l = 0; l < params.blocks.size(); ++l) {
        const std::string prefix = "block" + std::to_string(l) + ".";
        if (auto* b = std::get_if<SvtimeBlockParams>(&params.blocks[l])) {
            for (std::size_t k = 0; k < b->patch_weights.size(); ++k) {
                Matrix& w = b->patch_weights[k];
                refs.push_back({prefix + "patch" + std::to_string(k) + ".W", w.v.data(),
                                w.size(), {w.rows, w.cols}});
            }
        } else {
            auto& bt = std::get<SvtimeTBlockParams>(params.blocks[l]);
            refs.push_back({prefix + "w_alpha", bt.w_alpha.data(), bt.w_alpha.size(), {bt.w_alpha.size()}});
            refs.push_back({prefix + "b_alpha", &bt.b_alpha, 1, {1}});
            refs.push_back({prefix + "w_beta", bt.w_beta.data(), bt.w_beta.size(), {bt.w_beta.size()}});
            refs.push_back({prefix + "b_beta", &bt.b_beta, 1, {1}});
            refs.push_back({prefix + "w_p", bt.w_p.data(), bt.w_p.size(), {bt.w_p.size()}});
        }
    }
    if (params.framework) {
        FrameworkParams& fw = *params.framework;
        refs.push_back({"trend.W_B", fw.trend_weights.v.data(), fw.trend_weights.size(),
                        {fw.trend_weights.rows, fw.trend_weights.cols}});
        refs.push_back({"trend.b_B", fw.trend_bias.data(), fw.trend_bias.size(), {fw.trend_bias.size()}});
        refs.push_back({"gate.w_g", &fw.gate_raw, 1, {1}});
    }
    return refs;
}

// --- block forward ------------------------------------------------------

Matrix svtime_block_forward(const PeriodImage& img, const PatchLayout& layout,
                            const SvtimeBlockParams& params, bool is_final) {
    const std::size_t P = img.values.rows;
    const std::size_t N = img.values.cols;
    if (params.patch_weights.size() != layout.patch_count)
        throw DataError("patch weight count does not match layout");
    const std::size_t cols = params.patch_weights[0].cols;
    if (params.patch_weights[0].rows != N)
        throw DataError("patch weight rows do not match history periods");
    (void)is_final;
    Matrix out(P, cols);
    for (std::size_t k = 0; k < layout.patch_count; ++k) {
        const Matrix& w = params.patch_weights[k];
        for (std::size_t p = layout.boundaries[k]; p < layout.boundaries[k + 1]; ++p) {
            const double* irow = img.values.row(p);
            double* orow = out.row(p);
            for (std::size_t c = 0; c < cols; ++c) {
                double acc = 0.0;
                for (std::size_t n = 0; n < N; ++n) acc += irow[n] * w(n, c);
                orow[c] = acc;
            }
        }
    }
    return out;
}

namespace {

/// Shared SVTime-t evaluation; optionally captures backward state.
std::pair<Matrix, Matrix> svtime_t_block_eval(const PeriodImage& img, const PatchLayout& layout,
                                              std::span<const double> x,
                                              const SvtimeTBlockParams& params, bool is_final,
                                              const ModelConfig& cfg, BlockTrace* trace) {
    const std::size_t P = img.values.rows;
    const std::size_t N = img.values.cols;
    const std::size_t M = cfg.forecast_periods();
    if (params.w_p.size() != layout.patch_count)
        throw DataError("patch scalar count does not match layout");

    std::vector<double> row_mean(P, 0.0);
    for (std::size_t p = 0; p < P; ++p) {
        const double* irow = img.values.row(p);
        double acc = 0.0;
        for (std::size_t n = 0; n < N; ++n) acc += irow[n];
        row_mean[p] = acc / static_cast<double>(N);
    }

    Matrix backcast(P, N);
    for (std::size_t k = 0; k < layout.patch_count; ++k) {
        const double wp = params.w_p[k];
        for (std::size_t p = layout.boundaries[k]; p < layout.boundaries[k + 1]; ++p) {
            double* brow = backcast.row(p);
            if (cfg.svtimet_backcast == SvtimeTBackcast::ScaledMean) {
                const double v = wp * row_mean[p];
                for (std::size_t n = 0; n < N; ++n) brow[n] = v;
            } else {
                const double* irow = img.values.row(p);
                for (std::size_t n = 0; n < N; ++n) brow[n] = wp * irow[n];
            }
        }
    }

    Matrix fc;
    if (is_final) {
        Matrix weights;
        double za = 0.0, zb = 0.0, alpha = 0.0, beta = 0.0;
        if (cfg.ablation.no_ib3) {
            weights = Matrix(N, M, 1.0 / static_cast<double>(N));
        } else {
            za = params.b_alpha;
            zb = params.b_beta;
            for (std::size_t t = 0; t < x.size(); ++t) {
                za += params.w_alpha[t] * x[t];
                zb += params.w_beta[t] * x[t];
            }
            alpha = softplus(za);
            beta = softplus(zb);
            weights = annealing_weights(M, N, alpha, beta);
        }
        Matrix proj(P, M);
        for (std::size_t p = 0; p < P; ++p) {
            const double* irow = img.values.row(p);
            double* prow = proj.row(p);
            for (std::size_t j = 0; j < M; ++j) {
                double acc = 0.0;
                for (std::size_t n = 0; n < N; ++n) acc += irow[n] * weights(n, j);
                prow[j] = acc;
            }
        }
        fc = Matrix(P, M);
        for (std::size_t k = 0; k < layout.patch_count; ++k) {
            const double wp = params.w_p[k];
            for (std::size_t p = layout.boundaries[k]; p < layout.boundaries[k + 1]; ++p)
                for (std::size_t j = 0; j < M; ++j) fc(p, j) = wp * proj(p, j);
        }
        if (trace) {
            trace->z_alpha = za;
            trace->z_beta = zb;
            trace->alpha = alpha;
            trace->beta = beta;
            trace->weights = std::move(weights);
            trace->proj = std::move(proj);
        }
    }
    if (trace) trace->row_mean = std::move(row_mean);
    return {std::move(backcast), std::move(fc)};
}

} // namespace

std::pair<Matrix, Matrix> svtime_t_block_forward(const PeriodImage& img,
                                                 const PatchLayout& layout,
                                                 std::span<const double> x,
                                                 const SvtimeTBlockParams& params,
                                                 bool is_final, const ModelConfig& cfg) {
    return svtime_t_block_eval(img, layout, x, params, is_final, cfg, nullptr);
}

// --- framework ----------------------------------------------------------

ForwardTrace framework_forward(std::span<const double> x, const ModelConfig& cfg,
                               const ModelParams& params) {
    if (x.size() != cfg.lookback) throw DataError("lookback length does not match config");
    if (params.blocks.size() != cfg.num_blocks)
        throw DataError("block parameter count does not match config");
    const std::size_t T = cfg.lookback;
    const std::size_t H = cfg.horizon;
    const std::size_t P = cfg.period;
    const std::size_t N = cfg.history_periods();
    const std::size_t rem = cfg.remainder_len();
    const PatchLayout layout = patch_layout(P, cfg.effective_patches());

    ForwardTrace trace;
    trace.blocks.resize(cfg.num_blocks);

    std::vector<double> xl(x.begin(), x.end());
    for (std::size_t l = 0; l < cfg.num_blocks; ++l) {
        const bool is_final = (l + 1 == cfg.num_blocks);
        BlockTrace& bt = trace.blocks[l];
        bt.input = xl;
        bt.image = to_image(bt.input, P);
        if (const auto* bp = std::get_if<SvtimeBlockParams>(&params.blocks[l])) {
            bt.out = svtime_block_forward(bt.image, layout, *bp, is_final);
        } else {
            const auto& bp2 = std::get<SvtimeTBlockParams>(params.blocks[l]);
            auto [backcast, fc] = svtime_t_block_eval(bt.image, layout, bt.input, bp2,
                                                      is_final, cfg, &bt);
            if (is_final) {
                bt.out = Matrix(P, N + fc.cols);
                for (std::size_t p = 0; p < P; ++p) {
                    for (std::size_t n = 0; n < N; ++n) bt.out(p, n) = backcast(p, n);
                    for (std::size_t j = 0; j < fc.cols; ++j) bt.out(p, N + j) = fc(p, j);
                }
            } else {
                bt.out = std::move(backcast);
            }
        }
        if (!is_final) {
            // re-parameterized history: imaged positions from the backcast,
            // remainder positions pass through unchanged
            for (std::size_t m = 0; m < N; ++m)
                for (std::size_t p = 0; p < P; ++p) xl[rem + m * P + p] = bt.out(p, m);
        }
    }

    const Matrix& final_out = trace.blocks.back().out;
    trace.backcast.assign(T, 0.0);
    for (std::size_t m = 0; m < N; ++m)
        for (std::size_t p = 0; p < P; ++p) trace.backcast[rem + m * P + p] = final_out(p, m);

    trace.period_forecast.resize(H);
    for (std::size_t h = 0; h < H; ++h)
        trace.period_forecast[h] = final_out(h % P, N + h / P);

    if (cfg.ablation.no_backcast) {
        trace.final = trace.period_forecast;
        return trace;
    }

    const FrameworkParams& fw = *params.framework;
    trace.residual.resize(T);
    for (std::size_t t = 0; t < T; ++t) trace.residual[t] = x[t] - trace.backcast[t];
    trace.trend_forecast.resize(H);
    trend_forward(fw.trend_weights, fw.trend_bias, trace.residual.data(),
                  trace.trend_forecast.data(), 1);
    trace.gate = sigmoid(fw.gate_raw);
    trace.final.resize(H);
    for (std::size_t h = 0; h < H; ++h)
        trace.final[h] = trace.gate * trace.trend_forecast[h] +
                         (1.0 - trace.gate) * trace.period_forecast[h];
    return trace;
}

// --- backward -----------------------------------------------------------

namespace {

/// Backward through one block: given d_out, produce d_input (optional) and
/// per-sample scaler/patch contributions.
void block_backward(const BlockTrace& bt, const PatchLayout& layout, const ModelConfig& cfg,
                    const BlockParams& params, bool is_final, SampleGrads::Block& sg,
                    std::vector<double>* d_input) {
    const std::size_t P = bt.image.values.rows;
    const std::size_t N = bt.image.values.cols;
    const std::size_t rem = cfg.remainder_len();
    const Matrix& d_out = sg.d_out;

    if (d_input) std::fill(d_input->begin(), d_input->end(), 0.0);

    if (const auto* bp = std::get_if<SvtimeBlockParams>(&params)) {
        if (!d_input) return;
        for (std::size_t k = 0; k < layout.patch_count; ++k) {
            const Matrix& w = bp->patch_weights[k];
            for (std::size_t p = layout.boundaries[k]; p < layout.boundaries[k + 1]; ++p) {
                const double* dout = d_out.row(p);
                for (std::size_t n = 0; n < N; ++n) {
                    double acc = 0.0;
                    for (std::size_t c = 0; c < w.cols; ++c) acc += w(n, c) * dout[c];
                    (*d_input)[rem + n * P + p] = acc;
                }
            }
        }
        return;
    }

    const auto& bp = std::get<SvtimeTBlockParams>(params);
    const std::size_t M = is_final ? bt.proj.cols : 0;
    sg.dw_p.assign(layout.patch_count, 0.0);

    // dI accumulates the gradient w.r.t. this block's image
    Matrix d_img(P, N);

    // backcast path: columns 0..N-1 of d_out
    for (std::size_t k = 0; k < layout.patch_count; ++k) {
        const double wp = bp.w_p[k];
        for (std::size_t p = layout.boundaries[k]; p < layout.boundaries[k + 1]; ++p) {
            const double* dout = d_out.row(p);
            if (cfg.svtimet_backcast == SvtimeTBackcast::ScaledMean) {
                double srow = 0.0;
                for (std::size_t n = 0; n < N; ++n) srow += dout[n];
                sg.dw_p[k] += srow * bt.row_mean[p];
                const double spread = wp * srow / static_cast<double>(N);
                for (std::size_t n = 0; n < N; ++n) d_img(p, n) += spread;
            } else {
                const double* irow = bt.image.values.row(p);
                for (std::size_t n = 0; n < N; ++n) {
                    sg.dw_p[k] += dout[n] * irow[n];
                    d_img(p, n) += wp * dout[n];
                }
            }
        }
    }

    sg.dz_alpha = 0.0;
    sg.dz_beta = 0.0;
    if (is_final && M > 0) {
        // forecast path: columns N .. N+M-1
        Matrix d_weights(N, bt.proj.cols);
        for (std::size_t k = 0; k < layout.patch_count; ++k) {
            const double wp = bp.w_p[k];
            for (std::size_t p = layout.boundaries[k]; p < layout.boundaries[k + 1]; ++p) {
                const double* dout = d_out.row(p) + N;
                const double* irow = bt.image.values.row(p);
                for (std::size_t j = 0; j < M; ++j) {
                    sg.dw_p[k] += dout[j] * bt.proj(p, j);
                    const double dproj = wp * dout[j];
                    for (std::size_t n = 0; n < N; ++n) {
                        d_weights(n, j) += irow[n] * dproj;
                        d_img(p, n) += bt.weights(n, j) * dproj;
                    }
                }
            }
        }
        if (!cfg.ablation.no_ib3) {
            // softmax backward per column, then chain into alpha / beta
            double d_alpha = 0.0, d_beta = 0.0;
            for (std::size_t j = 0; j < M; ++j) {
                double dot = 0.0;
                for (std::size_t n = 0; n < N; ++n) dot += d_weights(n, j) * bt.weights(n, j);
                const double damp = 1.0 + bt.beta * static_cast<double>(j);
                for (std::size_t n = 0; n < N; ++n) {
                    const double d_logit = bt.weights(n, j) * (d_weights(n, j) - dot);
                    const double offset = static_cast<double>(n) + 1.0 - static_cast<double>(N);
                    d_alpha += d_logit * offset / damp;
                    d_beta += d_logit * bt.alpha * offset *
                              (-static_cast<double>(j)) / (damp * damp);
                }
            }
            sg.dz_alpha = d_alpha * sigmoid(bt.z_alpha);
            sg.dz_beta = d_beta * sigmoid(bt.z_beta);
        }
    }

    if (!d_input) return;
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t p = 0; p < P; ++p) (*d_input)[rem + n * P + p] = d_img(p, n);
    if (sg.dz_alpha != 0.0 || sg.dz_beta != 0.0) {
        for (std::size_t t = 0; t < d_input->size(); ++t)
            (*d_input)[t] += sg.dz_alpha * bp.w_alpha[t] + sg.dz_beta * bp.w_beta[t];
    }
}

} // namespace

void blocks_backward(const ForwardTrace& trace, const ModelConfig& cfg,
                     const ModelParams& params, std::span<const double> d_period,
                     std::span<const double> d_backcast, SampleGrads& out) {
    const std::size_t T = cfg.lookback;
    const std::size_t P = cfg.period;
    const std::size_t N = cfg.history_periods();
    const std::size_t rem = cfg.remainder_len();
    const PatchLayout layout = patch_layout(P, cfg.effective_patches());
    const std::size_t L = cfg.num_blocks;
    out.blocks.resize(L);

    // seed the final block's output gradient
    {
        Matrix& d_out = out.blocks[L - 1].d_out;
        d_out = Matrix(P, trace.blocks[L - 1].out.cols);
        for (std::size_t h = 0; h < d_period.size(); ++h)
            d_out(h % P, N + h / P) += d_period[h];
        if (!d_backcast.empty()) {
            for (std::size_t m = 0; m < N; ++m)
                for (std::size_t p = 0; p < P; ++p) d_out(p, m) += d_backcast[rem + m * P + p];
        }
    }

    std::vector<double> d_next(T);
    for (std::size_t li = L; li-- > 0;) {
        const bool is_final = (li + 1 == L);
        if (!is_final) {
            Matrix& d_out = out.blocks[li].d_out;
            d_out = Matrix(P, N);
            for (std::size_t m = 0; m < N; ++m)
                for (std::size_t p = 0; p < P; ++p) d_out(p, m) = d_next[rem + m * P + p];
        }
        std::vector<double> d_input(li > 0 ? T : 0);
        block_backward(trace.blocks[li], layout, cfg, params.blocks[li], is_final,
                       out.blocks[li], li > 0 ? &d_input : nullptr);
        if (li > 0) {
            // remainder positions pass straight through the block stack
            if (!is_final)
                for (std::size_t t = 0; t < rem; ++t) d_input[t] += d_next[t];
            d_next = std::move(d_input);
        }
    }
}

void accumulate_sample(GradientSet& grads, const ModelConfig& cfg, const ModelParams& params,
                       const ForwardTrace& trace, const SampleGrads& sg) {
    (void)params;
    const PatchLayout layout = patch_layout(cfg.period, cfg.effective_patches());
    const std::size_t N = cfg.history_periods();
    for (std::size_t l = 0; l < cfg.num_blocks; ++l) {
        const BlockTrace& bt = trace.blocks[l];
        const Matrix& d_out = sg.blocks[l].d_out;
        if (auto* gb = std::get_if<SvtimeBlockParams>(&grads.blocks[l])) {
            for (std::size_t k = 0; k < layout.patch_count; ++k) {
                Matrix& gw = gb->patch_weights[k];
                for (std::size_t p = layout.boundaries[k]; p < layout.boundaries[k + 1]; ++p) {
                    const double* irow = bt.image.values.row(p);
                    const double* dout = d_out.row(p);
                    for (std::size_t n = 0; n < N; ++n) {
                        double* grow = gw.row(n);
                        const double iv = irow[n];
                        for (std::size_t c = 0; c < gw.cols; ++c) grow[c] += iv * dout[c];
                    }
                }
            }
        } else {
            auto& gb2 = std::get<SvtimeTBlockParams>(grads.blocks[l]);
            const SampleGrads::Block& sb = sg.blocks[l];
            for (std::size_t k = 0; k < layout.patch_count; ++k) gb2.w_p[k] += sb.dw_p[k];
            if (sb.dz_alpha != 0.0 || sb.dz_beta != 0.0) {
                gb2.b_alpha += sb.dz_alpha;
                gb2.b_beta += sb.dz_beta;
                for (std::size_t t = 0; t < cfg.lookback; ++t) {
                    gb2.w_alpha[t] += sb.dz_alpha * bt.input[t];
                    gb2.w_beta[t] += sb.dz_beta * bt.input[t];
                }
            }
        }
    }
    if (grads.framework) {
        FrameworkParams& gfw = *grads.framework;
        trend_weight_grad(gfw.trend_weights, gfw.trend_bias, trace.residual.data(),
                          sg.d_trend.data(), 1, false);
        gfw.gate_raw += sg.d_gate_raw;
    }
}

Matrix forecast(const Matrix& lookback, const ModelConfig& cfg, const ModelParams& params,
                bool instance_norm) {
    if (lookback.cols != cfg.lookback) throw DataError("lookback width does not match config");
    Matrix out(lookback.rows, cfg.horizon);
    std::vector<double> x(cfg.lookback);
    for (std::size_t i = 0; i < lookback.rows; ++i) {
        double mean = 0.0, stddev = 1.0;
        if (instance_norm)
            row_norm_stats(lookback.row_span(i), !cfg.ablation.no_mean_center, mean, stddev);
        const double inv = 1.0 / stddev;
        for (std::size_t t = 0; t < cfg.lookback; ++t)
            x[t] = (lookback(i, t) - mean) * inv;
        const ForwardTrace trace = framework_forward(x, cfg, params);
        for (std::size_t h = 0; h < cfg.horizon; ++h)
            out(i, h) = trace.final[h] * stddev + mean;
    }
    return out;
}

} // namespace svtime
