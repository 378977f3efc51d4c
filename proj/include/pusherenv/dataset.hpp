#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pusherenv/env.hpp"
#include "seqvae/trajectory.hpp"

namespace pusherenv {

struct DatasetMeta {
    EnvConfig env;
    std::size_t n = 0;
    std::size_t T = 0;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0; // experiment-config stamp; 0 = unstamped
};

struct Dataset {
    std::vector<seqvae::Trajectory> trajectories;
    DatasetMeta meta;
    std::uint64_t content_hash = 0;
};

/// n episodes of length T: sample_initial + scripted controller, with 20%
/// of episodes driven by uniform random actions for coverage. Stored
/// actions are the commanded (pre-noise) ones; injected noise stays inside
/// the environment and is therefore aleatoric from the model's viewpoint.
Dataset generate_dataset(const EnvConfig& cfg, std::size_t n, std::size_t T, std::uint64_t seed);

/// Binary container: fixed header (version, dims, T, n, mode, EnvConfig
/// values, seed, content hash) followed by flat 64-bit-float records.
void save_dataset(const std::string& path, const Dataset& ds);

/// Verifies the stored content hash against the loaded records.
Dataset load_dataset(const std::string& path);

/// Human-readable per-trajectory CSV (states plus commanded actions).
std::string trajectory_csv(const seqvae::Trajectory& tr);

} // namespace pusherenv
