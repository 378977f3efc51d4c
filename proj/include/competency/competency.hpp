#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ensemble/ensemble.hpp"
#include "uncertainty/decompose.hpp"

namespace competency {

/// User-specified success-failure boundary: the ball must come within
/// `radius` of the target (closed boundary) by step `deadline`.
struct SuccessSpec {
    double radius = 0.12;      // meters
    std::size_t deadline = 60; // steps; 30 s at dt = 0.5

    void validate() const;
};

/// One Table-1 row: entropy aggregates, forecasted success probability with
/// its Wilson 95% interval, and sample accounting.
struct CompetencyReport {
    std::string mode;
    double total_bits = 0.0;
    double aleatoric_bits = 0.0;
    double epistemic_bits = 0.0; // == total_bits - aleatoric_bits exactly
    double p_success = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t m_members = 0;
    std::size_t k_per_member = 0;
    std::size_t excluded = 0;
    std::vector<double> per_member_p; // disagreement view; -1 marks a member
                                      // with no usable samples
    uncertainty::Provenance provenance;
};

/// True iff the ball (state dims 2,3) comes within spec.radius of the task
/// target (dims 6,7 of the *initial* state, so a model hallucinating target
/// drift cannot move its own goalposts) at any step t <= deadline, t = 0
/// included. Rejects trajectories shorter than the deadline.
bool evaluate_success(const std::vector<std::vector<double>>& states, const SuccessSpec& spec);

/// Wilson score interval at 95% for `successes` out of `n` Bernoulli trials.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n);

struct ForecastResult {
    double p_success = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t successes = 0;
    std::size_t usable = 0;
    std::size_t excluded = 0;
    std::vector<double> per_member_p;
};

/// Success statistics over the pooled M*K rollout samples (posterior
/// predictive under the uniform member mixture).
ForecastResult forecast_from_batches(const std::vector<seqvae::RolloutBatch>& batches, const SuccessSpec& spec);

/// Convenience wrapper: roll out, then count.
ForecastResult forecast(const ensemble::Ensemble& ens, const std::vector<double>& s0,
                        const std::vector<std::vector<double>>& actions, const SuccessSpec& spec,
                        std::size_t k_per_member, std::uint64_t seed);

/// Full Table-1 row. One shared rollout set feeds both the entropy
/// decomposition (aggregated over `dims`) and the success forecast, so both
/// halves of the report carry the same provenance.
CompetencyReport assess(const ensemble::Ensemble& ens, const std::vector<double>& s0,
                        const std::vector<std::vector<double>>& actions, const SuccessSpec& spec,
                        const std::vector<std::string>& dims, std::size_t k_per_member, std::uint64_t seed,
                        const std::string& mode_label, std::uint64_t manifest_hash = 0,
                        uncertainty::Estimator est = uncertainty::Estimator::Gaussian);

/// assess() plus the per-cell entropy curves behind the aggregates, for CSV
/// export; both views come from the same rollout set and share provenance.
struct Assessment {
    CompetencyReport report;
    uncertainty::UncertaintyReport cells;
};
Assessment assess_full(const ensemble::Ensemble& ens, const std::vector<double>& s0,
                       const std::vector<std::vector<double>>& actions, const SuccessSpec& spec,
                       const std::vector<std::string>& dims, std::size_t k_per_member, std::uint64_t seed,
                       const std::string& mode_label, std::uint64_t manifest_hash = 0,
                       uncertainty::Estimator est = uncertainty::Estimator::Gaussian);

/// Fixed-schema JSON (keys: mode, total_bits, aleatoric_bits,
/// epistemic_bits, p_success, ci_low, ci_high, m_members, k_per_member,
/// excluded, provenance). Byte-stable for equal reports.
std::string report_json(const CompetencyReport& report);

/// Strict parse of report_json output; unknown or missing keys rejected.
CompetencyReport report_from_json(const std::string& text);

} // namespace competency
