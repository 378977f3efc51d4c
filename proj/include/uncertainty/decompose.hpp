#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seqvae/rollout.hpp"
#include "uncertainty/entropy.hpp"

namespace uncertainty {

/// Per-timestep, per-dimension differential entropies in bits over the
/// forecast horizon. Row ti covers rollout step ti+1 (step 0 is the shared
/// initial state and carries no uncertainty).
struct EntropyCurve {
    std::size_t T = 0;
    std::size_t Ds = 0;
    std::vector<std::string> labels;  // size Ds
    std::vector<double> values;       // T x Ds

    double at(std::size_t ti, std::size_t d) const { return values[ti * Ds + d]; }
    double& at(std::size_t ti, std::size_t d) { return values[ti * Ds + d]; }
};

struct Provenance {
    std::uint64_t manifest_hash = 0;     // supplied by the caller, 0 if unknown
    std::uint64_t conditioning_hash = 0; // hash of (s0, actions)
    std::size_t m_members = 0;
    std::size_t k_per_member = 0;
    std::size_t excluded = 0;            // non-finite samples dropped
    std::size_t clamped_cells = 0;       // small negative epistemic set to 0
    std::string estimator;
};

/// Total/aleatoric/epistemic split. epistemic == total - aleatoric holds
/// exactly per cell by construction, and epistemic >= 0: cells where
/// sampling noise produced a small negative gap (> -0.02 bits) are clamped
/// by setting aleatoric := total there; the count is recorded.
struct UncertaintyReport {
    EntropyCurve total, aleatoric, epistemic;
    Provenance provenance;
};

/// Mean of per-member entropy curves; the expectation over the parameter
/// posterior of the predictive entropy (the aleatoric term).
EntropyCurve member_entropy(const std::vector<seqvae::RolloutBatch>& batches,
                            const std::vector<std::string>& labels = {},
                            Estimator est = Estimator::Gaussian);

/// Entropy of the pooled M*K sample set per cell (the total predictive
/// uncertainty under the posterior-mixture distribution).
EntropyCurve total_entropy(const std::vector<seqvae::RolloutBatch>& batches,
                           const std::vector<std::string>& labels = {},
                           Estimator est = Estimator::Gaussian);

UncertaintyReport decompose(const std::vector<seqvae::RolloutBatch>& batches,
                            const std::vector<std::string>& labels = {},
                            Estimator est = Estimator::Gaussian, std::uint64_t manifest_hash = 0);

struct AggregateSummary {
    double total_bits = 0.0;
    double aleatoric_bits = 0.0;
    double epistemic_bits = 0.0; // always total_bits - aleatoric_bits exactly
};

/// Mean over time and the selected dimension labels. Empty or unknown
/// selections are rejected.
AggregateSummary aggregate(const UncertaintyReport& report, const std::vector<std::string>& dims);

/// CSV with columns (t, dimension_label, total_bits, aleatoric_bits,
/// epistemic_bits); t counts from 1. Byte-stable for equal inputs.
std::string to_csv(const UncertaintyReport& report);

} // namespace uncertainty
