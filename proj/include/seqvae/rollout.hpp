#pragma once

#include <cstdint>
#include <vector>

#include "seqvae/model.hpp"

namespace seqvae {

/// K sampled trajectories generated under shared conditioning (s0, actions).
/// Samples that ever produced a non-finite state are listed in `excluded`
/// (their rows are frozen at the last finite state) and must not be used.
struct RolloutBatch {
    std::size_t model_id = 0;
    std::uint64_t seed = 0;
    std::size_t K = 0;
    std::size_t T = 0;
    std::size_t Ds = 0;
    std::vector<double> states; // K x (T+1) x Ds, row-major
    std::vector<std::size_t> excluded;
    std::vector<double> s0;
    std::vector<std::vector<double>> actions;

    double at(std::size_t k, std::size_t t, std::size_t d) const {
        return states[(k * (T + 1) + t) * Ds + d];
    }
    bool is_excluded(std::size_t k) const;
};

/// Autoregressive Monte-Carlo generation: per step, draw z from the
/// standard-normal prior, sample the decoder Gaussian, feed the sample
/// forward. Deterministic per (seed, K); never reads true future states.
RolloutBatch rollout(const SeqVaeParams& params, const std::vector<double>& s0,
                     const std::vector<std::vector<double>>& actions, std::size_t K, std::uint64_t seed,
                     std::size_t model_id = 0);

} // namespace seqvae
