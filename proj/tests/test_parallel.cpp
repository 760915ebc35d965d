// Serial reference vs OpenMP path. The parallel implementation folds every
// accumulator in a fixed order, so its results must not depend on the thread
// count at all; the independent sample-major reference must agree to
// near-machine precision.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "oracles.hpp"
#include "svtime/evaluation.hpp"
#include "svtime/training.hpp"

using namespace svtime;

namespace {

struct Instance {
    ModelConfig cfg;
    SeriesMatrix segment;
    std::vector<SampleSpec> batch;
    ModelParams params;
};

Instance make_instance(Variant variant, std::size_t blocks, std::uint64_t seed) {
    Instance inst;
    inst.cfg.variant = variant;
    inst.cfg.lookback = 24;
    inst.cfg.horizon = 12;
    inst.cfg.period = 6;
    inst.cfg.patch_count = 2;
    inst.cfg.num_blocks = blocks;
    inst.segment = oracles::random_walk_series(3, 120, seed, 6.0);
    const auto origins = window_origins(inst.segment.length(), 24, 12);
    for (std::size_t i = 0; i < origins.size(); i += 7)
        for (std::uint32_t d = 0; d < 3; ++d)
            inst.batch.push_back({&inst.segment, static_cast<std::uint32_t>(origins[i]), d});
    inst.params = init_params(inst.cfg, seed + 1);
    Rng rng(seed + 2);
    for (const TensorRef& r : tensor_refs(inst.params))
        for (std::size_t i = 0; i < r.size; ++i) r.data[i] += rng.uniform(-0.2, 0.2);
    return inst;
}

void compare_grads(GradientSet& a, GradientSet& b, double tol) {
    auto ra = tensor_refs(a);
    auto rb = tensor_refs(b);
    REQUIRE(ra.size() == rb.size());
    for (std::size_t r = 0; r < ra.size(); ++r) {
        for (std::size_t i = 0; i < ra[r].size; ++i) {
            if (tol == 0.0) {
                CHECK(ra[r].data[i] == rb[r].data[i]);
            } else {
                const double scale =
                    std::max({1.0, std::fabs(ra[r].data[i]), std::fabs(rb[r].data[i])});
                CHECK(std::fabs(ra[r].data[i] - rb[r].data[i]) / scale <= tol);
            }
        }
    }
}

} // namespace

TEST_CASE("parallel batch gradients agree with the serial reference") {
    for (const Variant variant : {Variant::SVTime, Variant::SVTimeT}) {
        for (std::size_t blocks : {1u, 2u}) {
            Instance inst = make_instance(variant, blocks, 500 + blocks);
            BatchResult serial = batch_gradients_serial(inst.batch, inst.cfg, inst.params);
            BatchResult parallel = batch_gradients(inst.batch, inst.cfg, inst.params, true);
            CHECK(std::fabs(serial.loss - parallel.loss) <= 1e-14 * std::max(1.0, serial.loss));
            compare_grads(serial.grads, parallel.grads, 1e-12);
        }
    }
}

#ifdef _OPENMP
TEST_CASE("batch gradients are bit-identical across thread counts") {
    Instance inst = make_instance(Variant::SVTime, 2, 900);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    BatchResult one = batch_gradients(inst.batch, inst.cfg, inst.params, true);
    omp_set_num_threads(4);
    BatchResult four = batch_gradients(inst.batch, inst.cfg, inst.params, true);
    omp_set_num_threads(saved);
    CHECK(one.loss == four.loss);
    compare_grads(one.grads, four.grads, 0.0);
}

TEST_CASE("segment metrics are bit-identical across thread counts") {
    Instance inst = make_instance(Variant::SVTimeT, 1, 901);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const Metrics a = metrics_on_segment(inst.cfg, inst.params, inst.segment, true);
    omp_set_num_threads(4);
    const Metrics b = metrics_on_segment(inst.cfg, inst.params, inst.segment, true);
    omp_set_num_threads(saved);
    CHECK(a.mse == b.mse);
    CHECK(a.mae == b.mae);
    CHECK(a.n_windows == b.n_windows);
}

TEST_CASE("training end-to-end is bit-identical for 1 vs 4 threads") {
    ModelConfig cfg;
    cfg.variant = Variant::SVTime;
    cfg.lookback = 24;
    cfg.horizon = 6;
    cfg.period = 6;
    cfg.patch_count = 2;
    SeriesMatrix series = oracles::random_walk_series(2, 260, 77, 6.0);
    const SplitResult sr = split(series, SplitSpec::ratio(0.7, 0.15, 0.15), 24, 6);
    TrainConfig tc;
    tc.batch_size = 32;
    tc.max_epochs = 3;
    tc.patience = 2;
    tc.seed = 13;

    tc.threads = 1;
    const FitResult a = fit(sr.train, sr.val_ext, cfg, tc);
    tc.threads = 4;
    const FitResult b = fit(sr.train, sr.val_ext, cfg, tc);

    REQUIRE(a.log.epochs.size() == b.log.epochs.size());
    for (std::size_t i = 0; i < a.log.epochs.size(); ++i) {
        CHECK(a.log.epochs[i].train_loss == b.log.epochs[i].train_loss);
        CHECK(a.log.epochs[i].val_mse == b.log.epochs[i].val_mse);
    }
    ModelParams pa = a.params, pb = b.params;
    auto ra = tensor_refs(pa), rb = tensor_refs(pb);
    for (std::size_t r = 0; r < ra.size(); ++r)
        for (std::size_t i = 0; i < ra[r].size; ++i) CHECK(ra[r].data[i] == rb[r].data[i]);
}
#endif
