#include "competency/competency.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"
#include "pusherenv/env.hpp"

namespace competency {
namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr std::size_t kBallX = 2, kBallY = 3, kTargetX = 6, kTargetY = 7;

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
    if (s.size() != 16) throw std::runtime_error("competency report: bad hash field");
    return std::stoull(s, nullptr, 16);
}

void require_keys(const nlohmann::json& j, const std::vector<std::string>& keys, const std::string& where) {
    for (const auto& k : keys)
        if (!j.contains(k)) throw std::runtime_error("competency report: missing key '" + k + "' in " + where);
    for (const auto& item : j.items()) {
        bool known = false;
        for (const auto& k : keys)
            if (item.key() == k) known = true;
        if (!known) throw std::runtime_error("competency report: unknown key '" + item.key() + "' in " + where);
    }
}

} // namespace

void SuccessSpec::validate() const {
    if (!(radius > 0.0)) throw std::invalid_argument("success spec: radius must be positive");
    if (deadline < 1) throw std::invalid_argument("success spec: deadline must be >= 1 step");
}

bool evaluate_success(const std::vector<std::vector<double>>& states, const SuccessSpec& spec) {
    spec.validate();
    if (states.empty() || states.size() < spec.deadline + 1)
        throw std::invalid_argument("evaluate_success: trajectory has " +
                                    std::to_string(states.empty() ? 0 : states.size() - 1) +
                                    " steps, deadline needs " + std::to_string(spec.deadline));
    for (const auto& row : states)
        if (row.size() != pusherenv::kStateDim)
            throw std::invalid_argument("evaluate_success: state rows must have 8 dimensions");

    const double tx = states[0][kTargetX], ty = states[0][kTargetY];
    for (std::size_t t = 0; t <= spec.deadline; ++t) {
        const double dx = states[t][kBallX] - tx;
        const double dy = states[t][kBallY] - ty;
        if (std::sqrt(dx * dx + dy * dy) <= spec.radius) return true;
    }
    return false;
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n) {
    if (n == 0) throw std::invalid_argument("wilson_interval: no trials");
    if (successes > n) throw std::invalid_argument("wilson_interval: successes exceed trials");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = kZ95 * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

ForecastResult forecast_from_batches(const std::vector<seqvae::RolloutBatch>& batches, const SuccessSpec& spec) {
    spec.validate();
    if (batches.empty()) throw std::invalid_argument("forecast: no rollout batches");

    ForecastResult out;
    std::vector<std::vector<double>> states;
    for (const auto& b : batches) {
        if (b.T < spec.deadline)
            throw std::invalid_argument("forecast: rollout horizon " + std::to_string(b.T) +
                                        " shorter than deadline " + std::to_string(spec.deadline));
        std::size_t member_succ = 0, member_usable = 0;
        for (std::size_t k = 0; k < b.K; ++k) {
            if (b.is_excluded(k)) {
                ++out.excluded;
                continue;
            }
            states.assign(b.T + 1, std::vector<double>(b.Ds));
            for (std::size_t t = 0; t <= b.T; ++t)
                for (std::size_t d = 0; d < b.Ds; ++d) states[t][d] = b.at(k, t, d);
            const bool ok = evaluate_success(states, spec);
            ++member_usable;
            ++out.usable;
            if (ok) {
                ++member_succ;
                ++out.successes;
            }
        }
        out.per_member_p.push_back(member_usable == 0
                                       ? -1.0
                                       : static_cast<double>(member_succ) / static_cast<double>(member_usable));
    }
    if (out.usable == 0) throw std::runtime_error("forecast: every rollout sample was excluded as non-finite");
    out.p_success = static_cast<double>(out.successes) / static_cast<double>(out.usable);
    const auto ci = wilson_interval(out.successes, out.usable);
    out.ci_low = ci.first;
    out.ci_high = ci.second;
    return out;
}

ForecastResult forecast(const ensemble::Ensemble& ens, const std::vector<double>& s0,
                        const std::vector<std::vector<double>>& actions, const SuccessSpec& spec,
                        std::size_t k_per_member, std::uint64_t seed) {
    spec.validate();
    if (actions.size() < spec.deadline)
        throw std::invalid_argument("forecast: plan provides " + std::to_string(actions.size()) +
                                    " steps, deadline needs " + std::to_string(spec.deadline));
    return forecast_from_batches(ensemble::ensemble_rollout(ens, s0, actions, k_per_member, seed), spec);
}

Assessment assess_full(const ensemble::Ensemble& ens, const std::vector<double>& s0,
                       const std::vector<std::vector<double>>& actions, const SuccessSpec& spec,
                       const std::vector<std::string>& dims, std::size_t k_per_member, std::uint64_t seed,
                       const std::string& mode_label, std::uint64_t manifest_hash,
                       uncertainty::Estimator est) {
    spec.validate();
    if (actions.size() < spec.deadline)
        throw std::invalid_argument("assess: plan provides " + std::to_string(actions.size()) +
                                    " steps, deadline needs " + std::to_string(spec.deadline));

    const auto batches = ensemble::ensemble_rollout(ens, s0, actions, k_per_member, seed);
    const std::vector<std::string> labels =
        s0.size() == pusherenv::kStateDim ? pusherenv::state_labels() : std::vector<std::string>{};
    auto unc = uncertainty::decompose(batches, labels, est, manifest_hash);
    const auto agg = uncertainty::aggregate(unc, dims);
    const auto fc = forecast_from_batches(batches, spec);

    Assessment out;
    CompetencyReport& rep = out.report;
    rep.mode = mode_label;
    rep.total_bits = agg.total_bits;
    rep.aleatoric_bits = agg.aleatoric_bits;
    rep.epistemic_bits = agg.epistemic_bits;
    rep.p_success = fc.p_success;
    rep.ci_low = fc.ci_low;
    rep.ci_high = fc.ci_high;
    rep.m_members = batches.size();
    rep.k_per_member = k_per_member;
    rep.excluded = fc.excluded;
    rep.per_member_p = fc.per_member_p;
    rep.provenance = unc.provenance;
    out.cells = std::move(unc);
    return out;
}

CompetencyReport assess(const ensemble::Ensemble& ens, const std::vector<double>& s0,
                        const std::vector<std::vector<double>>& actions, const SuccessSpec& spec,
                        const std::vector<std::string>& dims, std::size_t k_per_member, std::uint64_t seed,
                        const std::string& mode_label, std::uint64_t manifest_hash,
                        uncertainty::Estimator est) {
    return assess_full(ens, s0, actions, spec, dims, k_per_member, seed, mode_label, manifest_hash, est)
        .report;
}

std::string report_json(const CompetencyReport& report) {
    nlohmann::json j;
    j["mode"] = report.mode;
    j["total_bits"] = report.total_bits;
    j["aleatoric_bits"] = report.aleatoric_bits;
    j["epistemic_bits"] = report.epistemic_bits;
    j["p_success"] = report.p_success;
    j["ci_low"] = report.ci_low;
    j["ci_high"] = report.ci_high;
    j["m_members"] = report.m_members;
    j["k_per_member"] = report.k_per_member;
    j["excluded"] = report.excluded;
    j["provenance"] = {{"manifest_hash", hex64(report.provenance.manifest_hash)},
                       {"conditioning_hash", hex64(report.provenance.conditioning_hash)},
                       {"estimator", report.provenance.estimator},
                       {"clamped_cells", report.provenance.clamped_cells}};
    return j.dump(1) + "\n";
}

CompetencyReport report_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("competency report: not valid JSON: ") + e.what());
    }
    require_keys(j,
                 {"mode", "total_bits", "aleatoric_bits", "epistemic_bits", "p_success", "ci_low", "ci_high",
                  "m_members", "k_per_member", "excluded", "provenance"},
                 "report");
    require_keys(j.at("provenance"), {"manifest_hash", "conditioning_hash", "estimator", "clamped_cells"},
                 "provenance");

    CompetencyReport rep;
    rep.mode = j.at("mode").get<std::string>();
    rep.total_bits = j.at("total_bits").get<double>();
    rep.aleatoric_bits = j.at("aleatoric_bits").get<double>();
    rep.epistemic_bits = j.at("epistemic_bits").get<double>();
    rep.p_success = j.at("p_success").get<double>();
    rep.ci_low = j.at("ci_low").get<double>();
    rep.ci_high = j.at("ci_high").get<double>();
    rep.m_members = j.at("m_members").get<std::size_t>();
    rep.k_per_member = j.at("k_per_member").get<std::size_t>();
    rep.excluded = j.at("excluded").get<std::size_t>();
    const auto& prov = j.at("provenance");
    rep.provenance.manifest_hash = parse_hex64(prov.at("manifest_hash").get<std::string>());
    rep.provenance.conditioning_hash = parse_hex64(prov.at("conditioning_hash").get<std::string>());
    rep.provenance.estimator = prov.at("estimator").get<std::string>();
    rep.provenance.clamped_cells = prov.at("clamped_cells").get<std::size_t>();
    rep.provenance.m_members = rep.m_members;
    rep.provenance.k_per_member = rep.k_per_member;
    rep.provenance.excluded = rep.excluded;

    if (!(rep.p_success >= rep.ci_low && rep.p_success <= rep.ci_high))
        throw std::runtime_error("competency report: probability outside its interval");
    if (std::abs(rep.total_bits - (rep.aleatoric_bits + rep.epistemic_bits)) > 1e-9)
        throw std::runtime_error("competency report: entropy additivity violated");
    return rep;
}

} // namespace competency
