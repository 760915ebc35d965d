#ifndef SVTIME_CONFIG_JSON_HPP
#define SVTIME_CONFIG_JSON_HPP

#include <json.hpp>

#include "svtime/model.hpp"

namespace svtime {

nlohmann::json model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);

Ablation ablation_from_flags(const std::vector<std::string>& flags);
std::vector<std::string> ablation_to_flags(const Ablation& a);

} // namespace svtime

#endif // SVTIME_CONFIG_JSON_HPP
