#include "svtime/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "svtime/errors.hpp"
#include "svtime/imaging.hpp"

namespace svtime {

namespace {

struct WindowErrors {
    double se = 0.0;
    double ae = 0.0;
};

WindowErrors window_errors(const ModelConfig& cfg, const ModelParams& params,
                           const SeriesMatrix& segment, std::size_t origin,
                           bool instance_norm = true) {
    const WindowPair w = window_at(segment, origin, cfg.lookback, cfg.horizon);
    const Matrix pred = forecast(w.lookback, cfg, params, instance_norm);
    WindowErrors e;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred.v[i] - w.target.v[i];
        e.se += d * d;
        e.ae += std::fabs(d);
    }
    return e;
}

} // namespace

Metrics metrics_on_segment(const ModelConfig& cfg, const ModelParams& params,
                           const SeriesMatrix& segment, bool parallel, bool instance_norm) {
    const std::vector<std::size_t> origins =
        window_origins(segment.length(), cfg.lookback, cfg.horizon);
    const std::size_t n = origins.size();
    std::vector<WindowErrors> partial(n);
#pragma omp parallel for schedule(static) if (parallel)
    for (std::size_t i = 0; i < n; ++i)
        partial[i] = window_errors(cfg, params, segment, origins[i], instance_norm);

    double se = 0.0, ae = 0.0;
    for (const WindowErrors& e : partial) {
        se += e.se;
        ae += e.ae;
    }
    const double cells = static_cast<double>(n) * static_cast<double>(segment.variates()) *
                         static_cast<double>(cfg.horizon);
    return {se / cells, ae / cells, n};
}

namespace {

nlohmann::json config_to_json(const ModelConfig& cfg) {
    nlohmann::json j;
    j["variant"] = cfg.variant == Variant::SVTime ? "svtime" : "svtime-t";
    j["T"] = cfg.lookback;
    j["H"] = cfg.horizon;
    j["period"] = cfg.period;
    j["K"] = cfg.patch_count;
    j["num_blocks"] = cfg.num_blocks;
    std::vector<std::string> flags;
    if (cfg.ablation.no_ib2) flags.push_back("no-ib2");
    if (cfg.ablation.no_ib3) flags.push_back("no-ib3");
    if (cfg.ablation.no_backcast) flags.push_back("no-backcast");
    if (cfg.ablation.no_mean_center) flags.push_back("no-mean-center");
    j["ablation"] = flags;
    j["svtimet_backcast"] =
        cfg.svtimet_backcast == SvtimeTBackcast::ScaledMean ? "scaled-mean" : "scale-identity";
    return j;
}

} // namespace

std::string EvalReport::to_json() const {
    nlohmann::json j;
    j["dataset"] = dataset;
    j["variant"] = variant;
    j["horizon"] = horizon;
    j["mse"] = mse;
    j["mae"] = mae;
    j["n_windows"] = n_windows;
    j["param_count"] = param_count;
    j["train_seconds"] = train_seconds;
    j["inference_ms_per_window"] = inference_ms_per_window;
    j["seed"] = seed;
    j["metric_space"] = metric_space;
    if (!config_json.empty()) j["config"] = nlohmann::json::parse(config_json);
    return j.dump(2);
}

std::string EvalReport::csv_header() {
    return "dataset,variant,horizon,seed,mse,mae,params,train_s,infer_ms";
}

std::string EvalReport::to_csv_row() const {
    std::ostringstream out;
    out.precision(9);
    out << dataset << ',' << variant << ',' << horizon << ',' << seed << ',' << mse << ','
        << mae << ',' << param_count << ',' << train_seconds << ',' << inference_ms_per_window;
    return out.str();
}

EvalReport evaluate(const ModelConfig& cfg, const ModelParams& params,
                    const SeriesMatrix& test_segment, const std::string& dataset_name,
                    std::uint64_t seed, double train_seconds) {
    const Metrics m = metrics_on_segment(cfg, params, test_segment, true);

    // single-thread timing over a prefix of the inference loop
    const std::vector<std::size_t> origins =
        window_origins(test_segment.length(), cfg.lookback, cfg.horizon);
    const std::size_t timed = std::min<std::size_t>(origins.size(), 256);
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < timed; ++i)
        (void)window_errors(cfg, params, test_segment, origins[i]);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    EvalReport r;
    r.dataset = dataset_name;
    r.variant = cfg.variant == Variant::SVTime ? "svtime" : "svtime-t";
    r.horizon = cfg.horizon;
    r.mse = m.mse;
    r.mae = m.mae;
    r.n_windows = m.n_windows;
    r.param_count = parameter_count(cfg);
    r.train_seconds = train_seconds;
    r.inference_ms_per_window = ms / static_cast<double>(timed);
    r.seed = seed;
    r.config_json = config_to_json(cfg).dump();
    return r;
}

namespace {

ModelConfig suite_model_config(const SuiteConfig& sc, const DatasetSpec& ds, std::size_t horizon) {
    ModelConfig cfg;
    cfg.variant = sc.variant;
    cfg.lookback = sc.lookback;
    cfg.horizon = horizon;
    cfg.period = ds.period ? ds.period : default_period(ds.frequency);
    cfg.patch_count = sc.patch_count ? sc.patch_count : std::max<std::size_t>(cfg.period / 6, 1);
    cfg.num_blocks = sc.num_blocks ? sc.num_blocks : 1;
    cfg.ablation = sc.ablation;
    cfg.svtimet_backcast = sc.svtimet_backcast;
    return cfg;
}

struct PreparedDataset {
    Standardization scaler;
    SplitResult splits; // standardized
};

PreparedDataset prepare_dataset(const DatasetSpec& ds, std::size_t lookback, std::size_t horizon) {
    const SeriesMatrix raw = load_csv(ds.path);
    const SplitSpec spec = ds.split_mode == SplitMode::EttBorder
                               ? SplitSpec::ett_border(ds.frequency)
                               : SplitSpec::ratio(ds.ratios[0], ds.ratios[1], ds.ratios[2]);
    PreparedDataset out;
    SplitResult raw_splits = split(raw, spec, lookback, horizon);
    out.scaler = fit_standardization(raw_splits.train);
    out.splits.train = standardize(raw_splits.train, out.scaler);
    out.splits.val = standardize(raw_splits.val, out.scaler);
    out.splits.test = standardize(raw_splits.test, out.scaler);
    out.splits.val_ext = standardize(raw_splits.val_ext, out.scaler);
    out.splits.test_ext = standardize(raw_splits.test_ext, out.scaler);
    out.splits.val_overhang = raw_splits.val_overhang;
    out.splits.test_overhang = raw_splits.test_overhang;
    return out;
}

EvalReport run_one(const SuiteConfig& sc, const DatasetSpec& ds, const PreparedDataset& prep,
                   std::size_t horizon, std::uint64_t seed) {
    ModelConfig cfg = suite_model_config(sc, ds, horizon);
    TrainConfig tc = sc.train;
    tc.seed = seed;
    FitResult fr;
    if (sc.num_blocks == 0) {
        BlockSearchResult bs = block_search(prep.splits.train, prep.splits.val_ext, cfg, tc);
        cfg.num_blocks = bs.best_blocks;
        fr = std::move(bs.fit);
    } else {
        fr = fit(prep.splits.train, prep.splits.val_ext, cfg, tc);
    }
    return evaluate(cfg, fr.params, prep.splits.test_ext, ds.name, seed, fr.train_seconds);
}

} // namespace

SuiteResult benchmark_suite(const SuiteConfig& sc) {
    if (sc.datasets.empty()) throw ConfigError("benchmark suite has no datasets");
    SuiteResult out;
    std::size_t usable = 0;
    for (const DatasetSpec& ds : sc.datasets) {
        if (!std::filesystem::exists(ds.path)) {
            std::cerr << "warning: dataset file missing, skipping " << ds.name << " (" << ds.path
                      << ")\n";
            continue;
        }
        ++usable;
        // horizon-averaged metrics, one entry per seed
        std::vector<double> seed_mse, seed_mae;
        for (std::uint64_t seed : sc.seeds) {
            double mse_sum = 0.0, mae_sum = 0.0;
            for (std::size_t h : sc.horizons) {
                PreparedDataset prep = prepare_dataset(ds, sc.lookback, h);
                EvalReport r = run_one(sc, ds, prep, h, seed);
                mse_sum += r.mse;
                mae_sum += r.mae;
                out.reports.push_back(std::move(r));
            }
            seed_mse.push_back(mse_sum / static_cast<double>(sc.horizons.size()));
            seed_mae.push_back(mae_sum / static_cast<double>(sc.horizons.size()));
        }
        DatasetAverage avg;
        avg.dataset = ds.name;
        const auto mean_std = [](const std::vector<double>& xs, double& mean, double& stddev) {
            mean = 0.0;
            for (double x : xs) mean += x;
            mean /= static_cast<double>(xs.size());
            double ss = 0.0;
            for (double x : xs) ss += (x - mean) * (x - mean);
            stddev = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
        };
        mean_std(seed_mse, avg.mse_mean, avg.mse_std);
        mean_std(seed_mae, avg.mae_mean, avg.mae_std);
        out.averages.push_back(std::move(avg));
    }
    if (usable == 0) throw DataError("benchmark suite: no dataset file could be found");
    return out;
}

AblationResult ablation_suite(const DatasetSpec& dataset, const SuiteConfig& base,
                              const Ablation& flags) {
    AblationResult out;
    double full_mse = 0.0, full_mae = 0.0, abl_mse = 0.0, abl_mae = 0.0;
    for (std::size_t h : base.horizons) {
        PreparedDataset prep = prepare_dataset(dataset, base.lookback, h);
        AblationDelta delta;
        delta.horizon = h;
        double fm = 0.0, fa = 0.0, am = 0.0, aa = 0.0;
        for (std::uint64_t seed : base.seeds) {
            SuiteConfig full = base;
            EvalReport fr = run_one(full, dataset, prep, h, seed);
            SuiteConfig abl = base;
            abl.ablation = flags;
            EvalReport ar = run_one(abl, dataset, prep, h, seed);
            fm += fr.mse;
            fa += fr.mae;
            am += ar.mse;
            aa += ar.mae;
        }
        const double ns = static_cast<double>(base.seeds.size());
        delta.full_mse = fm / ns;
        delta.full_mae = fa / ns;
        delta.ablated_mse = am / ns;
        delta.ablated_mae = aa / ns;
        out.per_horizon.push_back(delta);
        full_mse += delta.full_mse;
        full_mae += delta.full_mae;
        abl_mse += delta.ablated_mse;
        abl_mae += delta.ablated_mae;
    }
    const double nh = static_cast<double>(base.horizons.size());
    out.full_avg_mse = full_mse / nh;
    out.full_avg_mae = full_mae / nh;
    out.ablated_avg_mse = abl_mse / nh;
    out.ablated_avg_mae = abl_mae / nh;
    out.mse_change_percent = 100.0 * (out.ablated_avg_mse - out.full_avg_mse) / out.full_avg_mse;
    out.mae_change_percent = 100.0 * (out.ablated_avg_mae - out.full_avg_mae) / out.full_avg_mae;
    return out;
}

std::string suite_csv(const SuiteResult& r) {
    std::ostringstream out;
    out << EvalReport::csv_header() << '\n';
    for (const EvalReport& e : r.reports) out << e.to_csv_row() << '\n';
    return out.str();
}

std::string suite_json(const SuiteResult& r) {
    nlohmann::json j;
    j["metric_space"] = "dataset-standardized";
    j["reports"] = nlohmann::json::array();
    for (const EvalReport& e : r.reports) j["reports"].push_back(nlohmann::json::parse(e.to_json()));
    j["averages"] = nlohmann::json::array();
    for (const DatasetAverage& a : r.averages) {
        j["averages"].push_back({{"dataset", a.dataset},
                                 {"mse_mean", a.mse_mean},
                                 {"mse_std", a.mse_std},
                                 {"mae_mean", a.mae_mean},
                                 {"mae_std", a.mae_std}});
    }
    return j.dump(2);
}

} // namespace svtime
