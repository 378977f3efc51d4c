#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "numkit/rng.hpp"
#include "seqvae/model.hpp"
#include "seqvae/trajectory.hpp"

namespace seqvae {

struct TrainConfig {
    std::size_t epochs = 60;
    std::size_t batch_size = 16;
    double lr = 2e-3;
    double beta_max = 1.0; // KL weight after warm-up, in (0, 1]
    std::size_t latent = 8;
    std::size_t hidden = 64;
    // When nonzero, each epoch trains on a freshly drawn random contiguous
    // window of this many steps per trajectory instead of the full sequence.
    // Rollouts start the recurrence cold at an arbitrary query state, but
    // full-sequence training only ever starts it at episode initial states;
    // random windows make mid-episode states appear in that position too.
    std::size_t window = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> angular_dims; // state dims treated as angles

    void validate() const;
};

struct EpochStats {
    double loss = 0.0;  // recon + beta*kl, nats, averaged over batches
    double recon = 0.0; // Gaussian NLL per step (summed over dims)
    double kl = 0.0;    // KL to the standard-normal prior per step
    double beta = 0.0;
    std::size_t rejected_steps = 0; // minibatches skipped for non-finite loss
};

struct TrainLog {
    std::vector<EpochStats> epochs;
    std::uint64_t dataset_fingerprint = 0;
};

struct TrainResult {
    SeqVaeParams params;
    TrainLog log;
};

/// Raised when the loss goes non-finite on two consecutive minibatches.
struct TrainDiverged : std::runtime_error {
    TrainLog partial;
    explicit TrainDiverged(TrainLog log)
        : std::runtime_error("seqvae: training diverged (non-finite loss twice in a row)"),
          partial(std::move(log)) {}
};

struct ElboParts {
    double loss = 0.0;
    double recon_nll = 0.0;
    double kl = 0.0;
};

/// Teacher-forced ELBO terms for one trajectory, in nats, averaged per
/// timestep; recon is summed over state dims, kl over latent dims. Noise for
/// the reparameterized latents comes from rng.
ElboParts elbo_loss(const Trajectory& traj, const SeqVaeParams& params, double beta, numkit::Rng& rng);

/// KL warm-up weight for a 0-based epoch index: linear 0 -> beta_max over
/// the first half of training, flat afterwards.
double beta_at_epoch(const TrainConfig& cfg, std::size_t epoch);

/// Minibatch Adam on the ELBO. Fully determined by cfg.seed.
TrainResult train(const std::vector<Trajectory>& dataset, const TrainConfig& cfg);

/// Per-step prediction targets with angular dims unwrapped: each target is
/// reachable from the previous state by the shortest angular displacement,
/// so residuals never see a 2*pi jump at the boundary.
std::vector<std::vector<double>> unwrapped_targets(const Trajectory& traj,
                                                   const std::vector<std::size_t>& angular_dims);

} // namespace seqvae
