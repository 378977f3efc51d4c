#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace seqvae {

/// One episode: T+1 states, T actions, in simulator units, tagged with the
/// environment mode that produced it.
struct Trajectory {
    std::vector<std::vector<double>> states;  // (T+1) x D_s
    std::vector<std::vector<double>> actions; // T x D_a
    std::string mode;

    std::size_t horizon() const { return actions.size(); }
    std::size_t state_dim() const { return states.empty() ? 0 : states[0].size(); }
    std::size_t action_dim() const { return actions.empty() ? 0 : actions[0].size(); }
};

/// Throws std::invalid_argument unless |states| == |actions|+1, T >= 1,
/// rows are rectangular, and every entry is finite.
void validate(const Trajectory& traj);

/// Content hash over dims and raw values; identical datasets hash equal
/// regardless of mode tags' memory layout.
std::uint64_t fingerprint(const std::vector<Trajectory>& dataset);

} // namespace seqvae
