#include "svtime/config_json.hpp"

#include "svtime/errors.hpp"

namespace svtime {

std::vector<std::string> ablation_to_flags(const Ablation& a) {
    std::vector<std::string> flags;
    if (a.no_ib2) flags.push_back("no-ib2");
    if (a.no_ib3) flags.push_back("no-ib3");
    if (a.no_backcast) flags.push_back("no-backcast");
    if (a.no_mean_center) flags.push_back("no-mean-center");
    return flags;
}

Ablation ablation_from_flags(const std::vector<std::string>& flags) {
    Ablation a;
    for (const std::string& f : flags) {
        if (f == "no-ib2") a.no_ib2 = true;
        else if (f == "no-ib3") a.no_ib3 = true;
        else if (f == "no-backcast") a.no_backcast = true;
        else if (f == "no-mean-center") a.no_mean_center = true;
        else throw ConfigError("unknown ablation flag: '" + f + "'");
    }
    return a;
}

nlohmann::json model_config_to_json(const ModelConfig& cfg) {
    nlohmann::json j;
    j["variant"] = cfg.variant == Variant::SVTime ? "svtime" : "svtime-t";
    j["T"] = cfg.lookback;
    j["H"] = cfg.horizon;
    j["period"] = cfg.period;
    j["K"] = cfg.patch_count;
    j["num_blocks"] = cfg.num_blocks;
    j["ablation"] = ablation_to_flags(cfg.ablation);
    j["svtimet_backcast"] =
        cfg.svtimet_backcast == SvtimeTBackcast::ScaledMean ? "scaled-mean" : "scale-identity";
    return j;
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
    ModelConfig cfg;
    const std::string variant = j.at("variant").get<std::string>();
    if (variant == "svtime") cfg.variant = Variant::SVTime;
    else if (variant == "svtime-t") cfg.variant = Variant::SVTimeT;
    else throw ConfigError("unknown variant: '" + variant + "'");
    cfg.lookback = j.at("T").get<std::size_t>();
    cfg.horizon = j.at("H").get<std::size_t>();
    cfg.period = j.at("period").get<std::size_t>();
    cfg.patch_count = j.at("K").get<std::size_t>();
    cfg.num_blocks = j.at("num_blocks").get<std::size_t>();
    cfg.ablation = ablation_from_flags(j.at("ablation").get<std::vector<std::string>>());
    const std::string bc = j.at("svtimet_backcast").get<std::string>();
    if (bc == "scaled-mean") cfg.svtimet_backcast = SvtimeTBackcast::ScaledMean;
    else if (bc == "scale-identity") cfg.svtimet_backcast = SvtimeTBackcast::ScaleIdentity;
    else throw ConfigError("unknown svtimet_backcast mode: '" + bc + "'");
    return cfg;
}

} // namespace svtime
