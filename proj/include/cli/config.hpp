#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "competency/competency.hpp"
#include "pusherenv/env.hpp"
#include "seqvae/train.hpp"

namespace cli {

/// Bad user input: malformed config, unknown flag values, missing input
/// files. Mapped to exit code 2; everything else that throws is a runtime
/// failure and exits 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataConfig {
    std::size_t episodes = 300;
    std::size_t horizon = 60;
};

struct EnsembleConfig {
    std::size_t members = 5;
    std::size_t rollouts_per_member = 200;
    bool bootstrap = false;
};

/// The whole experiment in one human-editable JSON document. Every knob is
/// explicit; all randomness derives from the single master seed, so each
/// stage is independently re-runnable.
struct ExperimentConfig {
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    pusherenv::EnvConfig env;
    DataConfig data;
    seqvae::TrainConfig train; // seed and angular_dims are derived, not knobs
    EnsembleConfig ensemble;
    competency::SuccessSpec success;
    std::vector<std::string> report_dims = pusherenv::moving_labels();

    void validate() const; // throws ConfigError naming the offending field
};

/// Canonical JSON (sorted keys, lossless doubles). Parsing rejects unknown
/// keys at every level, so config_json(config_from_json(x)) == canonical x.
std::string config_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// FNV-1a over the canonical JSON. Stamped into every artifact this config
/// produces; mismatched stamps make later stages refuse the artifact.
std::uint64_t config_hash(const ExperimentConfig& cfg);

/// Materialized training config: the document's knobs plus the derived
/// seed (master seed + dataset fingerprint) and the env's angular dims.
seqvae::TrainConfig train_config(const ExperimentConfig& cfg, std::uint64_t dataset_fingerprint);

} // namespace cli
