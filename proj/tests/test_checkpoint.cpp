#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "svtime/checkpoint.hpp"
#include "svtime/errors.hpp"

using namespace svtime;

namespace {

ModelConfig small_cfg(Variant variant, std::size_t lookback, std::size_t horizon) {
    ModelConfig cfg;
    cfg.variant = variant;
    cfg.lookback = lookback;
    cfg.horizon = horizon;
    cfg.period = 6;
    cfg.patch_count = 2;
    return cfg;
}

Checkpoint make_checkpoint(const ModelConfig& cfg, std::uint64_t seed) {
    Checkpoint c;
    c.config = cfg;
    c.params = init_params(cfg, seed);
    Rng rng(seed + 1);
    for (const TensorRef& r : tensor_refs(c.params))
        for (std::size_t i = 0; i < r.size; ++i) r.data[i] += rng.uniform(-0.5, 0.5);
    c.standardization.mean = {0.5, -2.0};
    c.standardization.stddev = {1.5, 0.75};
    c.variate_names = {"a", "b"};
    c.training_digest = "epochs=3;best_epoch=2;best_val_mse=0.5;fnv1a64=abc";
    return c;
}

void check_roundtrip(const ModelConfig& cfg, const std::string& path) {
    Checkpoint saved = make_checkpoint(cfg, 99);
    save_checkpoint(saved, path);
    Checkpoint loaded = load_checkpoint(path);

    auto ra = tensor_refs(saved.params);
    auto rb = tensor_refs(loaded.params);
    REQUIRE(ra.size() == rb.size());
    for (std::size_t r = 0; r < ra.size(); ++r) {
        REQUIRE(ra[r].name == rb[r].name);
        REQUIRE(ra[r].shape == rb[r].shape);
        for (std::size_t i = 0; i < ra[r].size; ++i) CHECK(ra[r].data[i] == rb[r].data[i]);
    }
    CHECK(loaded.standardization.mean == saved.standardization.mean);
    CHECK(loaded.standardization.stddev == saved.standardization.stddev);
    CHECK(loaded.variate_names == saved.variate_names);
    CHECK(loaded.training_digest == saved.training_digest);

    // forecasts agree bit-exactly on identical input
    Rng rng(1);
    Matrix lookback(2, cfg.lookback);
    for (double& v : lookback.v) v = rng.uniform(-3.0, 3.0);
    const Matrix a = forecast(lookback, cfg, saved.params);
    const Matrix b = forecast(lookback, cfg, loaded.params);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.v[i] == b.v[i]);
}

} // namespace

TEST_CASE("round trip is bit-exact in both payload modes") {
    SUBCASE("inline JSON payload for small models") {
        const ModelConfig cfg = small_cfg(Variant::SVTimeT, 24, 12);
        REQUIRE(parameter_count(cfg) <= 1024);
        check_roundtrip(cfg, "/tmp/svtime_ckpt_inline.bin");
    }
    SUBCASE("binary float64 payload for larger models") {
        const ModelConfig cfg = small_cfg(Variant::SVTime, 48, 24);
        REQUIRE(parameter_count(cfg) > 1024);
        check_roundtrip(cfg, "/tmp/svtime_ckpt_binary.bin");
    }
}

TEST_CASE("loading rejects damaged files") {
    const ModelConfig cfg = small_cfg(Variant::SVTime, 48, 24);
    const std::string path = "/tmp/svtime_ckpt_victim.bin";
    save_checkpoint(make_checkpoint(cfg, 7), path);

    SUBCASE("bad magic") {
        std::ofstream out("/tmp/svtime_ckpt_magic.bin", std::ios::binary);
        out << "SOMETHING ELSE\n{}\n";
        out.close();
        CHECK_THROWS_AS(load_checkpoint("/tmp/svtime_ckpt_magic.bin"), DataError);
    }
    SUBCASE("unknown format version") {
        std::ifstream in(path, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        std::string content = buf.str();
        const auto pos = content.find("\"format_version\":1");
        REQUIRE(pos != std::string::npos);
        content.replace(pos, 18, "\"format_version\":9");
        std::ofstream out("/tmp/svtime_ckpt_v9.bin", std::ios::binary);
        out << content;
        out.close();
        CHECK_THROWS_WITH_AS(load_checkpoint("/tmp/svtime_ckpt_v9.bin"),
                             doctest::Contains("format_version"), DataError);
    }
    SUBCASE("tampered tensor shape") {
        std::ifstream in(path, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        std::string content = buf.str();
        const auto pos = content.find("\"shape\":[");
        REQUIRE(pos != std::string::npos);
        content.replace(pos, 9, "\"shape\":[9,");
        std::ofstream out("/tmp/svtime_ckpt_shape.bin", std::ios::binary);
        out << content;
        out.close();
        CHECK_THROWS_AS(load_checkpoint("/tmp/svtime_ckpt_shape.bin"), DataError);
    }
    SUBCASE("truncated payload") {
        const auto size = std::filesystem::file_size(path);
        std::ifstream in(path, std::ios::binary);
        std::vector<char> bytes(size - 64);
        in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        std::ofstream out("/tmp/svtime_ckpt_trunc.bin", std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        CHECK_THROWS_WITH_AS(load_checkpoint("/tmp/svtime_ckpt_trunc.bin"),
                             doctest::Contains("truncated"), DataError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_checkpoint("/tmp/svtime_ckpt_nowhere.bin"), DataError);
    }
}

TEST_CASE("saving rejects non-finite parameters") {
    const ModelConfig cfg = small_cfg(Variant::SVTime, 24, 12);
    Checkpoint c = make_checkpoint(cfg, 4);
    tensor_refs(c.params)[0].data[0] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(save_checkpoint(c, "/tmp/svtime_ckpt_inf.bin"), NumericError);
}

TEST_CASE("training digest is stable and content-sensitive") {
    TrainingLog log;
    log.epochs.push_back({1, 0.5, 0.4, 0.3, 1.0});
    const std::string a = training_digest(log, 1, 0.4);
    const std::string b = training_digest(log, 1, 0.4);
    CHECK(a == b);
    log.epochs.push_back({2, 0.45, 0.41, 0.31, 1.0});
    CHECK(training_digest(log, 1, 0.4) != a);
}
