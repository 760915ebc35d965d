// svtime command-line tool: train / evaluate / predict / inspect / bench.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "svtime/checkpoint.hpp"
#include "svtime/config_json.hpp"
#include "svtime/errors.hpp"
#include "svtime/evaluation.hpp"
#include "svtime/training.hpp"

using namespace svtime;
using nlohmann::json;

namespace {

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            throw ConfigError("unknown config key in " + where + ": '" + item.key() + "'");
}

SamplingFrequency parse_frequency(const std::string& s) {
    if (s == "hourly") return SamplingFrequency::Hourly;
    if (s == "15min") return SamplingFrequency::Min15;
    if (s == "10min") return SamplingFrequency::Min10;
    throw ConfigError("unknown frequency: '" + s + "' (hourly|15min|10min)");
}

Variant parse_variant(const std::string& s) {
    if (s == "svtime") return Variant::SVTime;
    if (s == "svtime-t") return Variant::SVTimeT;
    throw ConfigError("unknown variant: '" + s + "' (svtime|svtime-t)");
}

TrainConfig train_config_from_json(const json& j) {
    TrainConfig tc;
    tc.learning_rate = j.value("learning_rate", tc.learning_rate);
    tc.batch_size = j.value("batch_size", tc.batch_size);
    tc.max_epochs = j.value("max_epochs", tc.max_epochs);
    tc.patience = j.value("patience", tc.patience);
    tc.seed = j.value("seed", tc.seed);
    tc.beta1 = j.value("beta1", tc.beta1);
    tc.beta2 = j.value("beta2", tc.beta2);
    tc.eps_opt = j.value("eps_opt", tc.eps_opt);
    tc.grad_clip = j.value("grad_clip", tc.grad_clip);
    tc.halve_lr_on_plateau = j.value("halve_lr_on_plateau", false);
    tc.threads = j.value("threads", 0);
    const std::string opt = j.value("optimizer", "adam");
    if (opt == "adam") tc.optimizer = TrainConfig::Optimizer::Adam;
    else if (opt == "sgd") tc.optimizer = TrainConfig::Optimizer::Sgd;
    else throw ConfigError("unknown optimizer: '" + opt + "' (adam|sgd)");
    return tc;
}

struct TrainJob {
    std::string dataset;
    ModelConfig model;
    TrainConfig train;
    bool block_search = false;
    SplitSpec split_spec;
    bool has_frequency = false;
    SamplingFrequency frequency = SamplingFrequency::Hourly;
    std::size_t explicit_period = 0;
    std::size_t explicit_patches = 0;
    std::string checkpoint_out = "model.ckpt";
    std::string log_out;
};

TrainJob parse_train_config(const json& j) {
    reject_unknown_keys(
        j,
        {"dataset", "variant", "T", "H", "period", "frequency", "K", "num_blocks",
         "block_search", "split", "ratios", "ablation", "svtimet_backcast", "learning_rate",
         "batch_size", "max_epochs", "patience", "seed", "beta1", "beta2", "eps_opt",
         "optimizer", "grad_clip", "halve_lr_on_plateau", "threads", "checkpoint_out",
         "log_out"},
        "train config");

    TrainJob job;
    job.dataset = j.at("dataset").get<std::string>();
    job.model.variant = parse_variant(j.at("variant").get<std::string>());
    job.model.lookback = j.at("T").get<std::size_t>();
    job.model.horizon = j.at("H").get<std::size_t>();
    job.explicit_period = j.value("period", 0);
    job.explicit_patches = j.value("K", 0);
    job.model.num_blocks = j.value("num_blocks", 1);
    job.block_search = j.value("block_search", false);
    if (j.contains("frequency")) {
        job.has_frequency = true;
        job.frequency = parse_frequency(j.at("frequency").get<std::string>());
    }
    if (j.contains("ablation"))
        job.model.ablation = ablation_from_flags(j.at("ablation").get<std::vector<std::string>>());
    const std::string bc = j.value("svtimet_backcast", "scaled-mean");
    if (bc == "scaled-mean") job.model.svtimet_backcast = SvtimeTBackcast::ScaledMean;
    else if (bc == "scale-identity") job.model.svtimet_backcast = SvtimeTBackcast::ScaleIdentity;
    else throw ConfigError("unknown svtimet_backcast: '" + bc + "'");

    const std::string split_kind = j.value("split", "ratio");
    if (split_kind == "ratio") {
        auto ratios = j.value("ratios", std::vector<double>{0.7, 0.1, 0.2});
        if (ratios.size() != 3) throw ConfigError("ratios must have exactly 3 entries");
        job.split_spec = SplitSpec::ratio(ratios[0], ratios[1], ratios[2]);
    } else if (split_kind == "ett-border") {
        if (!job.has_frequency)
            throw ConfigError("split 'ett-border' requires the 'frequency' key");
        job.split_spec = SplitSpec::ett_border(job.frequency);
    } else {
        throw ConfigError("unknown split: '" + split_kind + "' (ratio|ett-border)");
    }

    job.train = train_config_from_json(j);
    job.checkpoint_out = j.value("checkpoint_out", std::string("model.ckpt"));
    job.log_out = j.value("log_out", std::string());
    return job;
}

void resolve_period_and_patches(TrainJob& job, const SeriesMatrix& train_split) {
    if (job.explicit_period > 0) {
        job.model.period = job.explicit_period;
    } else if (job.has_frequency) {
        job.model.period = default_period(job.frequency);
    } else {
        job.model.period = detect_period(train_split.values.row_span(0));
        std::cerr << "detected period " << job.model.period << " via FFT\n";
    }
    job.model.patch_count = job.explicit_patches > 0
                                ? job.explicit_patches
                                : std::max<std::size_t>(job.model.period / 6, 1);
}

int cmd_train(const std::string& config_path, std::uint64_t seed_override, int threads_override) {
    TrainJob job = parse_train_config(load_json_file(config_path));
    if (seed_override != 0) job.train.seed = seed_override;
    if (threads_override >= 0) job.train.threads = threads_override;

    const SeriesMatrix raw = load_csv(job.dataset);
    const SplitResult raw_splits = split(raw, job.split_spec, job.model.lookback,
                                         job.model.horizon);
    resolve_period_and_patches(job, raw_splits.train);
    job.model.validate();

    const Standardization scaler = fit_standardization(raw_splits.train);
    const SeriesMatrix train_seg = standardize(raw_splits.train, scaler);
    const SeriesMatrix val_ext = standardize(raw_splits.val_ext, scaler);

    FitResult fr;
    if (job.block_search) {
        BlockSearchResult bs = block_search(train_seg, val_ext, job.model, job.train);
        std::cerr << "block search picked " << bs.best_blocks << " block(s); val MSE per count:";
        for (double v : bs.val_mse) std::cerr << ' ' << v;
        std::cerr << '\n';
        job.model.num_blocks = bs.best_blocks;
        fr = std::move(bs.fit);
    } else {
        fr = fit(train_seg, val_ext, job.model, job.train);
    }

    const Checkpoint ckpt =
        Checkpoint::from_training(job.model, scaler, raw.variate_names, fr);
    save_checkpoint(ckpt, job.checkpoint_out);

    if (!job.log_out.empty()) {
        std::ofstream out(job.log_out);
        out << fr.log.to_jsonl();
    } else {
        std::cout << fr.log.to_jsonl();
    }
    std::cout << "final validation MSE: " << fr.best_val_mse << " (epoch " << fr.best_epoch
              << ")\nparameters: " << parameter_count(job.model) << "\ncheckpoint: "
              << job.checkpoint_out << '\n';
    return 0;
}

int cmd_evaluate(const std::string& ckpt_path, const std::string& data_path,
                 std::size_t horizon, const std::string& csv_out) {
    const Checkpoint ckpt = load_checkpoint(ckpt_path);
    if (horizon != 0 && horizon != ckpt.config.horizon)
        throw ConfigError("horizon " + std::to_string(horizon) +
                          " does not match the checkpoint's horizon " +
                          std::to_string(ckpt.config.horizon) +
                          "; the trend map is horizon-specific, re-train instead");
    const SeriesMatrix raw = load_csv(data_path);
    if (raw.variates() != ckpt.standardization.mean.size())
        throw DataError("checkpoint has D=" + std::to_string(ckpt.standardization.mean.size()) +
                        " variates, dataset has D=" + std::to_string(raw.variates()));
    const SeriesMatrix z = standardize(raw, ckpt.standardization);
    const EvalReport rep = evaluate(ckpt.config, ckpt.params, z,
                                    std::filesystem::path(data_path).stem().string(),
                                    /*seed=*/0, /*train_seconds=*/0.0);
    std::cout << rep.to_json() << '\n';
    if (!csv_out.empty()) {
        std::ofstream out(csv_out);
        out << EvalReport::csv_header() << '\n' << rep.to_csv_row() << '\n';
    }
    return 0;
}

int cmd_predict(const std::string& ckpt_path, const std::string& data_path,
                const std::string& out_path) {
    const Checkpoint ckpt = load_checkpoint(ckpt_path);
    const SeriesMatrix raw = load_csv(data_path);
    if (raw.variates() != ckpt.standardization.mean.size())
        throw DataError("checkpoint has D=" + std::to_string(ckpt.standardization.mean.size()) +
                        " variates, dataset has D=" + std::to_string(raw.variates()));
    const std::size_t T = ckpt.config.lookback;
    if (raw.length() < T)
        throw DataError("input has " + std::to_string(raw.length()) + " rows, need at least " +
                        std::to_string(T));

    const SeriesMatrix z = standardize(raw, ckpt.standardization);
    Matrix lookback(z.variates(), T);
    for (std::size_t i = 0; i < z.variates(); ++i)
        for (std::size_t t = 0; t < T; ++t)
            lookback(i, t) = z.values(i, z.length() - T + t);

    Matrix pred = forecast(lookback, ckpt.config, ckpt.params);
    destandardize_rows(pred, ckpt.standardization);

    std::ofstream out(out_path);
    if (!out) throw DataError("cannot write forecast CSV: " + out_path);
    out << "date";
    for (const auto& name : raw.variate_names) out << ',' << name;
    out << '\n';
    for (std::size_t h = 0; h < ckpt.config.horizon; ++h) {
        out << raw.length() + h + 1; // timestamps extrapolated by position index
        for (std::size_t i = 0; i < pred.rows; ++i) out << ',' << pred(i, h);
        out << '\n';
    }
    std::cout << "wrote " << ckpt.config.horizon << " forecast rows to " << out_path << '\n';
    return 0;
}

int cmd_inspect(const std::string& ckpt_path) {
    Checkpoint ckpt = load_checkpoint(ckpt_path);
    const ModelConfig& cfg = ckpt.config;
    std::cout << "variant: " << (cfg.variant == Variant::SVTime ? "svtime" : "svtime-t") << '\n'
              << "T=" << cfg.lookback << " H=" << cfg.horizon << " P=" << cfg.period
              << " K=" << cfg.patch_count << " blocks=" << cfg.num_blocks << '\n'
              << "N=" << cfg.history_periods() << " M=" << cfg.forecast_periods()
              << " remainder=" << cfg.remainder_len() << '\n';
    const auto flags = ablation_to_flags(cfg.ablation);
    if (!flags.empty()) {
        std::cout << "ablation:";
        for (const auto& f : flags) std::cout << ' ' << f;
        std::cout << '\n';
    }
    std::size_t total = 0;
    for (const TensorRef& r : tensor_refs(ckpt.params)) {
        std::cout << "  " << r.name << " [";
        for (std::size_t i = 0; i < r.shape.size(); ++i)
            std::cout << (i ? "x" : "") << r.shape[i];
        std::cout << "] = " << r.size << '\n';
        total += r.size;
    }
    std::cout << "parameters: " << total << " (formula: " << parameter_count(cfg) << ")\n";
    if (ckpt.params.framework)
        std::cout << "gate g = " << sigmoid(ckpt.params.framework->gate_raw) << '\n';
    if (cfg.variant == Variant::SVTimeT) {
        const std::vector<double> zeros(cfg.lookback, 0.0);
        for (std::size_t l = 0; l < ckpt.params.blocks.size(); ++l) {
            const auto& b = std::get<SvtimeTBlockParams>(ckpt.params.blocks[l]);
            auto [alpha, beta] = compute_scalers(zeros, b);
            std::cout << "block " << l << " scalers on zero input: alpha=" << alpha
                      << " beta=" << beta << '\n';
        }
    }
    std::cout << "training: " << ckpt.training_digest << '\n';
    return 0;
}

int cmd_bench(const std::string& suite_path) {
    const json j = load_json_file(suite_path);
    reject_unknown_keys(j,
                        {"datasets", "variant", "T", "horizons", "seeds", "K", "num_blocks",
                         "ablation", "ablation_compare", "out_dir", "learning_rate",
                         "batch_size", "max_epochs", "patience", "beta1", "beta2", "eps_opt",
                         "optimizer", "grad_clip", "halve_lr_on_plateau", "threads",
                         "svtimet_backcast"},
                        "bench suite");

    SuiteConfig sc;
    sc.variant = parse_variant(j.value("variant", "svtime"));
    sc.lookback = j.value("T", 512);
    if (j.contains("horizons")) sc.horizons = j.at("horizons").get<std::vector<std::size_t>>();
    if (j.contains("seeds")) sc.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    sc.patch_count = j.value("K", 0);
    sc.num_blocks = j.value("num_blocks", 1);
    if (j.contains("ablation"))
        sc.ablation = ablation_from_flags(j.at("ablation").get<std::vector<std::string>>());
    const std::string bc = j.value("svtimet_backcast", "scaled-mean");
    sc.svtimet_backcast =
        bc == "scale-identity" ? SvtimeTBackcast::ScaleIdentity : SvtimeTBackcast::ScaledMean;
    sc.train = train_config_from_json(j);

    if (!j.contains("datasets")) throw ConfigError("bench suite needs a 'datasets' array");
    for (const auto& dj : j.at("datasets")) {
        reject_unknown_keys(dj, {"name", "path", "frequency", "split", "ratios", "period"},
                            "dataset entry");
        DatasetSpec ds;
        ds.name = dj.at("name").get<std::string>();
        ds.path = dj.at("path").get<std::string>();
        if (dj.contains("frequency"))
            ds.frequency = parse_frequency(dj.at("frequency").get<std::string>());
        const std::string split_kind = dj.value("split", "ratio");
        if (split_kind == "ett-border") ds.split_mode = SplitMode::EttBorder;
        else if (split_kind == "ratio") ds.split_mode = SplitMode::Ratio;
        else throw ConfigError("unknown split: '" + split_kind + "'");
        if (dj.contains("ratios")) {
            const auto r = dj.at("ratios").get<std::vector<double>>();
            if (r.size() != 3) throw ConfigError("ratios must have exactly 3 entries");
            ds.ratios = {r[0], r[1], r[2]};
        }
        ds.period = dj.value("period", 0);
        sc.datasets.push_back(std::move(ds));
    }

    const std::string out_dir = j.value("out_dir", "reports");
    std::filesystem::create_directories(out_dir);

    const SuiteResult result = benchmark_suite(sc);
    {
        std::ofstream csv(out_dir + "/results.csv");
        csv << suite_csv(result);
        std::ofstream js(out_dir + "/results.json");
        js << suite_json(result);
    }
    std::cout << suite_csv(result);
    for (const DatasetAverage& a : result.averages)
        std::cout << a.dataset << " horizon-average: MSE " << a.mse_mean << " +- " << a.mse_std
                  << ", MAE " << a.mae_mean << " +- " << a.mae_std << '\n';

    if (j.contains("ablation_compare")) {
        const Ablation flags =
            ablation_from_flags(j.at("ablation_compare").get<std::vector<std::string>>());
        for (const DatasetSpec& ds : sc.datasets) {
            if (!std::filesystem::exists(ds.path)) continue;
            const AblationResult ar = ablation_suite(ds, sc, flags);
            json aj{{"dataset", ds.name},
                    {"full_avg_mse", ar.full_avg_mse},
                    {"ablated_avg_mse", ar.ablated_avg_mse},
                    {"full_avg_mae", ar.full_avg_mae},
                    {"ablated_avg_mae", ar.ablated_avg_mae},
                    {"mse_change_percent", ar.mse_change_percent},
                    {"mae_change_percent", ar.mae_change_percent}};
            std::ofstream out(out_dir + "/ablation_" + ds.name + ".json");
            out << aj.dump(2);
            std::cout << ds.name << " ablation: MSE " << ar.full_avg_mse << " -> "
                      << ar.ablated_avg_mse << " (" << ar.mse_change_percent << "%)\n";
        }
    }
    std::cout << "reports written to " << out_dir << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"SVTime / SVTime-t lightweight long-term time-series forecasters"};
    app.require_subcommand(1);

    int threads = -1;
    app.add_option("--threads", threads,
                   "worker thread count (1 = fully serial, bit-reproducible)");

    std::string config_path, ckpt_path, data_path, out_path, csv_out, suite_path;
    std::uint64_t seed = 0;
    std::size_t horizon = 0;

    auto* train = app.add_subcommand("train", "train a model from a JSON config");
    train->add_option("--config", config_path, "JSON config path")->required();
    train->add_option("--seed", seed, "override the config seed");

    auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint on a CSV");
    evaluate->add_option("--checkpoint", ckpt_path)->required();
    evaluate->add_option("--data", data_path)->required();
    evaluate->add_option("--horizon", horizon, "must match the checkpoint horizon");
    evaluate->add_option("--csv", csv_out, "also write a one-row CSV report");

    auto* predict = app.add_subcommand("predict", "forecast H steps past the end of a CSV");
    predict->add_option("--checkpoint", ckpt_path)->required();
    predict->add_option("--data", data_path)->required();
    predict->add_option("--out", out_path, "output CSV path")->required();

    auto* inspect = app.add_subcommand("inspect", "print a checkpoint summary");
    inspect->add_option("--checkpoint", ckpt_path)->required();

    auto* bench = app.add_subcommand("bench", "run a benchmark suite config");
    bench->add_option("--suite", suite_path, "suite JSON path")->required();

    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    try {
        if (app.got_subcommand(train)) return cmd_train(config_path, seed, threads);
        if (app.got_subcommand(evaluate))
            return cmd_evaluate(ckpt_path, data_path, horizon, csv_out);
        if (app.got_subcommand(predict)) return cmd_predict(ckpt_path, data_path, out_path);
        if (app.got_subcommand(inspect)) return cmd_inspect(ckpt_path);
        if (app.got_subcommand(bench)) return cmd_bench(suite_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return ConfigError::exit_code;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return DataError::exit_code;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return NumericError::exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
