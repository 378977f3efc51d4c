#pragma once

#include <cstdint>
#include <string>

#include "seqvae/model.hpp"
#include "seqvae/train.hpp"

namespace seqvae {

struct Checkpoint {
    SeqVaeParams params;
    TrainConfig config;
    TrainLog log;
};

/// Versioned JSON container with named arrays. Doubles round-trip
/// losslessly; keys are emitted sorted, so equal checkpoints are
/// byte-identical. Written atomically.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);

/// Rejects unknown format markers, bad versions, and shape mismatches.
Checkpoint load_checkpoint(const std::string& path);

} // namespace seqvae
