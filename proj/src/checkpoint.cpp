#include "svtime/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "svtime/config_json.hpp"
#include "svtime/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload is little-endian float64");

namespace svtime {

namespace {

constexpr const char* kMagic = "SVTIME-CKPT";
constexpr std::size_t kInlineLimit = 1024; // tensors at or below this go into the JSON header

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

std::string training_digest(const TrainingLog& log, std::size_t best_epoch, double best_val_mse) {
    std::ostringstream out;
    out << "epochs=" << log.epochs.size() << ";best_epoch=" << best_epoch
        << ";best_val_mse=" << best_val_mse << ";fnv1a64=" << std::hex
        << fnv1a64(log.to_jsonl());
    return out.str();
}

Checkpoint Checkpoint::from_training(const ModelConfig& cfg, const Standardization& st,
                                     const std::vector<std::string>& names, const FitResult& fr) {
    Checkpoint c;
    c.config = cfg;
    c.standardization = st;
    c.variate_names = names;
    c.params = fr.params;
    c.training_digest = svtime::training_digest(fr.log, fr.best_epoch, fr.best_val_mse);
    return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    ModelParams params = ckpt.params; // tensor_refs needs mutable storage
    auto refs = tensor_refs(params);

    std::size_t total = 0;
    for (const TensorRef& r : refs) {
        for (std::size_t i = 0; i < r.size; ++i)
            if (!std::isfinite(r.data[i]))
                throw NumericError("refusing to save non-finite parameter in " + r.name);
        total += r.size;
    }
    const bool inline_payload = total <= kInlineLimit;

    nlohmann::json header;
    header["format_version"] = ckpt.format_version;
    header["payload"] = inline_payload ? "inline" : "binary-f64-le";
    header["model_config"] = model_config_to_json(ckpt.config);
    header["dataset_standardization"] = {{"mean", ckpt.standardization.mean},
                                         {"std", ckpt.standardization.stddev},
                                         {"variate_names", ckpt.variate_names}};
    header["training_digest"] = ckpt.training_digest;

    nlohmann::json tensors = nlohmann::json::array();
    std::size_t offset = 0;
    for (const TensorRef& r : refs) {
        nlohmann::json t{{"name", r.name}, {"shape", r.shape}, {"count", r.size}};
        if (inline_payload) {
            t["data"] = std::vector<double>(r.data, r.data + r.size);
        } else {
            t["offset"] = offset;
            offset += r.size;
        }
        tensors.push_back(std::move(t));
    }
    header["tensors"] = std::move(tensors);
    if (!inline_payload) header["payload_count"] = total;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint: " + path);
    out << kMagic << '\n' << header.dump() << '\n';
    if (!inline_payload) {
        for (const TensorRef& r : refs)
            out.write(reinterpret_cast<const char*>(r.data),
                      static_cast<std::streamsize>(r.size * sizeof(double)));
    }
    if (!out) throw DataError("write failure on checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path);

    std::string magic;
    if (!std::getline(in, magic) || magic != kMagic)
        throw DataError("not a svtime checkpoint: " + path);
    std::string header_line;
    if (!std::getline(in, header_line)) throw DataError("truncated checkpoint header: " + path);

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_line);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("corrupt checkpoint header: " + std::string(e.what()));
    }

    Checkpoint c;
    try {
        c.format_version = header.at("format_version").get<int>();
        if (c.format_version != 1)
            throw DataError("unsupported checkpoint format_version " +
                            std::to_string(c.format_version));
        c.config = model_config_from_json(header.at("model_config"));
        c.config.validate();
        const auto& st = header.at("dataset_standardization");
        c.standardization.mean = st.at("mean").get<std::vector<double>>();
        c.standardization.stddev = st.at("std").get<std::vector<double>>();
        c.variate_names = st.at("variate_names").get<std::vector<std::string>>();
        c.training_digest = header.value("training_digest", "");

        c.params = zeros_like(c.config);
        auto refs = tensor_refs(c.params);
        const auto& tensors = header.at("tensors");
        if (tensors.size() != refs.size())
            throw DataError("tensor manifest size mismatch against model_config");

        const std::string payload = header.at("payload").get<std::string>();
        if (payload == "inline") {
            for (std::size_t i = 0; i < refs.size(); ++i) {
                const auto& t = tensors[i];
                if (t.at("name").get<std::string>() != refs[i].name ||
                    t.at("shape").get<std::vector<std::size_t>>() != refs[i].shape)
                    throw DataError("tensor mismatch at '" + refs[i].name + "'");
                const auto data = t.at("data").get<std::vector<double>>();
                if (data.size() != refs[i].size)
                    throw DataError("tensor size mismatch at '" + refs[i].name + "'");
                std::memcpy(refs[i].data, data.data(), data.size() * sizeof(double));
            }
        } else if (payload == "binary-f64-le") {
            const std::size_t total = header.at("payload_count").get<std::size_t>();
            std::vector<double> buffer(total);
            in.read(reinterpret_cast<char*>(buffer.data()),
                    static_cast<std::streamsize>(total * sizeof(double)));
            if (static_cast<std::size_t>(in.gcount()) != total * sizeof(double))
                throw DataError("truncated checkpoint payload");
            for (std::size_t i = 0; i < refs.size(); ++i) {
                const auto& t = tensors[i];
                if (t.at("name").get<std::string>() != refs[i].name ||
                    t.at("shape").get<std::vector<std::size_t>>() != refs[i].shape ||
                    t.at("count").get<std::size_t>() != refs[i].size)
                    throw DataError("tensor mismatch at '" + refs[i].name + "'");
                const std::size_t off = t.at("offset").get<std::size_t>();
                if (off + refs[i].size > total) throw DataError("tensor offset out of range");
                std::memcpy(refs[i].data, buffer.data() + off, refs[i].size * sizeof(double));
            }
        } else {
            throw DataError("unknown payload kind: '" + payload + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed checkpoint: " + std::string(e.what()));
    }
    return c;
}

} // namespace svtime
