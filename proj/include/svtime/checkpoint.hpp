#ifndef SVTIME_CHECKPOINT_HPP
#define SVTIME_CHECKPOINT_HPP

#include <string>

#include "svtime/data.hpp"
#include "svtime/model.hpp"
#include "svtime/training.hpp"

namespace svtime {

/// Self-describing model file: a magic line, a one-line JSON header
/// (format version, resolved config, dataset standardization, tensor
/// manifest, training-log digest) and a little-endian float64 payload.
/// Small models fall back to JSON-inlined tensors; both round-trip
/// parameters bit-exactly.
struct Checkpoint {
    int format_version = 1;
    ModelConfig config;
    Standardization standardization; // train-split per-variate mean/std
    std::vector<std::string> variate_names;
    ModelParams params;
    std::string training_digest; // summary of the training log

    static Checkpoint from_training(const ModelConfig& cfg, const Standardization& st,
                                    const std::vector<std::string>& names, const FitResult& fr);
};

/// FNV-1a over the line-delimited training log plus a short summary.
std::string training_digest(const TrainingLog& log, std::size_t best_epoch, double best_val_mse);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);

/// Rejects unknown format versions, bad magic, and any shape mismatch
/// against the embedded config.
Checkpoint load_checkpoint(const std::string& path);

} // namespace svtime

#endif // SVTIME_CHECKPOINT_HPP
