// Microbenchmark: serial reference vs OpenMP paths for the training and
// evaluation hot loops, at benchmark-like sizes.
#include <chrono>
#include <cstdio>
#include <numbers>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "svtime/evaluation.hpp"
#include "svtime/matrix.hpp"
#include "svtime/training.hpp"

using namespace svtime;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SeriesMatrix synthetic(std::size_t variates, std::size_t length, std::uint64_t seed) {
    Rng rng(seed);
    SeriesMatrix s;
    s.values = Matrix(variates, length);
    for (std::size_t i = 0; i < variates; ++i) {
        s.variate_names.push_back("v" + std::to_string(i));
        double level = rng.uniform(-1.0, 1.0);
        for (std::size_t t = 0; t < length; ++t) {
            level += rng.uniform(-0.05, 0.05);
            s.values(i, t) = level + std::sin(2.0 * std::numbers::pi *
                                              static_cast<double>(t) / 24.0);
        }
    }
    for (std::size_t t = 0; t < length; ++t) s.timestamps.push_back(std::to_string(t));
    return s;
}

} // namespace

int main() {
    ModelConfig cfg;
    cfg.variant = Variant::SVTime;
    cfg.lookback = 512;
    cfg.horizon = 96;
    cfg.period = 24;
    cfg.patch_count = 4;

    const SeriesMatrix segment = synthetic(7, 4096, 1);
    const ModelParams params = init_params(cfg, 2);

    const auto origins = window_origins(segment.length(), cfg.lookback, cfg.horizon);
    std::vector<SampleSpec> batch;
    for (std::size_t i = 0; i < origins.size() && batch.size() < 512; i += 3)
        for (std::uint32_t d = 0; d < 7 && batch.size() < 512; ++d)
            batch.push_back({&segment, static_cast<std::uint32_t>(origins[i]), d});

    std::printf("batch gradients: %zu samples, T=%zu H=%zu P=%zu K=%zu\n", batch.size(),
                cfg.lookback, cfg.horizon, cfg.period, cfg.patch_count);

    const int reps = 3;
    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) (void)batch_gradients_serial(batch, cfg, params);
    const double serial_s = seconds_since(t0) / reps;

    t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) (void)batch_gradients(batch, cfg, params, true);
    const double parallel_s = seconds_since(t0) / reps;

#ifdef _OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    std::printf("  serial reference : %8.1f ms/batch\n", serial_s * 1e3);
    std::printf("  openmp (%d threads): %8.1f ms/batch  (%.2fx)\n", threads, parallel_s * 1e3,
                serial_s / parallel_s);

    // evaluation loop
    const SeriesMatrix eval_seg = synthetic(7, 1536, 3);
    t0 = std::chrono::steady_clock::now();
    const Metrics ms = metrics_on_segment(cfg, params, eval_seg, false);
    const double eval_serial = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const Metrics mp = metrics_on_segment(cfg, params, eval_seg, true);
    const double eval_parallel = seconds_since(t0);
    std::printf("evaluation: %zu windows x 7 variates\n", ms.n_windows);
    std::printf("  serial           : %8.1f ms\n", eval_serial * 1e3);
    std::printf("  openmp           : %8.1f ms  (%.2fx)\n", eval_parallel * 1e3,
                eval_serial / eval_parallel);
    std::printf("  results identical: %s\n", (ms.mse == mp.mse && ms.mae == mp.mae) ? "yes" : "NO");
    return 0;
}
