#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seqvae/model.hpp"
#include "seqvae/rollout.hpp"
#include "seqvae/train.hpp"
#include "seqvae/trajectory.hpp"

namespace ensemble {

struct MemberInfo {
    std::size_t id = 0;
    std::uint64_t train_seed = 0;
};

/// M independently trained models approximating the parameter posterior as a
/// uniform mixture. Members share the dataset and architecture; seeds are
/// pairwise distinct.
struct Ensemble {
    std::vector<seqvae::SeqVaeParams> members;
    std::vector<MemberInfo> info;
    std::vector<seqvae::TrainLog> logs;
    std::uint64_t dataset_fingerprint = 0;
};

/// Trains M members, member seed = derive(cfg.seed, "member", id). Data
/// order is reshuffled per member via that seed. With bootstrap=true each
/// member resamples the dataset with replacement (off by default; random
/// init plus reshuffling is the standard recipe). A member failure aborts
/// the build and names the member.
Ensemble train_ensemble(const std::vector<seqvae::Trajectory>& dataset, const seqvae::TrainConfig& cfg,
                        std::size_t M, bool bootstrap = false);

/// One RolloutBatch per member, K_per_member samples each, member identity
/// preserved on the batch. Member m rolls with derive(seed, "rollout", m).
std::vector<seqvae::RolloutBatch> ensemble_rollout(const Ensemble& ens, const std::vector<double>& s0,
                                                   const std::vector<std::vector<double>>& actions,
                                                   std::size_t K_per_member, std::uint64_t seed);

struct ManifestEntry {
    std::size_t id = 0;
    std::uint64_t train_seed = 0;
    std::string checkpoint_path;
};

struct Manifest {
    std::uint64_t dataset_fingerprint = 0;
    std::uint64_t config_hash = 0; // resolved experiment-config stamp; 0 = unstamped
    std::vector<ManifestEntry> members;
};

void save_manifest(const std::string& path, const Manifest& m);
Manifest load_manifest(const std::string& path);

} // namespace ensemble
