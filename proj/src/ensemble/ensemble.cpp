#include "ensemble/ensemble.hpp"

#include <set>
#include <stdexcept>

#include <json.hpp>

#include "numkit/rng.hpp"
#include "uqio/fileio.hpp"

namespace ensemble {

Ensemble train_ensemble(const std::vector<seqvae::Trajectory>& dataset, const seqvae::TrainConfig& cfg,
                        std::size_t M, bool bootstrap) {
    if (M == 0) throw std::invalid_argument("ensemble: M must be >= 1");

    Ensemble ens;
    ens.dataset_fingerprint = seqvae::fingerprint(dataset);

    std::set<std::uint64_t> seen;
    for (std::size_t id = 0; id < M; ++id) {
        seqvae::TrainConfig member_cfg = cfg;
        member_cfg.seed = numkit::derive_seed(cfg.seed, "member", id);
        if (!seen.insert(member_cfg.seed).second)
            throw std::runtime_error("ensemble: member seed collision at member " + std::to_string(id));

        const std::vector<seqvae::Trajectory>* data = &dataset;
        std::vector<seqvae::Trajectory> resampled;
        if (bootstrap) {
            numkit::Rng rng(numkit::derive_seed(cfg.seed, "bootstrap", id));
            resampled.reserve(dataset.size());
            for (std::size_t i = 0; i < dataset.size(); ++i)
                resampled.push_back(dataset[rng.below(dataset.size())]);
            data = &resampled;
        }

        try {
            seqvae::TrainResult r = seqvae::train(*data, member_cfg);
            ens.members.push_back(std::move(r.params));
            ens.logs.push_back(std::move(r.log));
            ens.info.push_back({id, member_cfg.seed});
        } catch (const std::exception& e) {
            throw std::runtime_error("ensemble: member " + std::to_string(id) + " failed: " + e.what());
        }
    }
    return ens;
}

std::vector<seqvae::RolloutBatch> ensemble_rollout(const Ensemble& ens, const std::vector<double>& s0,
                                                   const std::vector<std::vector<double>>& actions,
                                                   std::size_t K_per_member, std::uint64_t seed) {
    if (ens.members.empty()) throw std::invalid_argument("ensemble_rollout: empty ensemble");
    std::vector<seqvae::RolloutBatch> out;
    out.reserve(ens.members.size());
    for (std::size_t m = 0; m < ens.members.size(); ++m)
        out.push_back(seqvae::rollout(ens.members[m], s0, actions, K_per_member,
                                      numkit::derive_seed(seed, "rollout", m), ens.info[m].id));
    return out;
}

void save_manifest(const std::string& path, const Manifest& m) {
    nlohmann::json j;
    j["format"] = "ensemble-manifest";
    j["version"] = 1;
    j["dataset_fingerprint"] = m.dataset_fingerprint;
    j["config_hash"] = m.config_hash;
    nlohmann::json members = nlohmann::json::array();
    for (const ManifestEntry& e : m.members)
        members.push_back({{"id", e.id}, {"train_seed", e.train_seed}, {"checkpoint", e.checkpoint_path}});
    j["members"] = std::move(members);
    uqio::write_file_atomic(path, j.dump(1) + "\n");
}

Manifest load_manifest(const std::string& path) {
    nlohmann::json j = nlohmann::json::parse(uqio::read_file_text(path));
    if (j.at("format").get<std::string>() != "ensemble-manifest")
        throw std::runtime_error("manifest: unrecognized format marker in " + path);
    if (j.at("version").get<int>() != 1) throw std::runtime_error("manifest: unsupported version in " + path);
    Manifest m;
    m.dataset_fingerprint = j.at("dataset_fingerprint").get<std::uint64_t>();
    m.config_hash = j.at("config_hash").get<std::uint64_t>();
    for (const auto& je : j.at("members"))
        m.members.push_back({je.at("id").get<std::size_t>(), je.at("train_seed").get<std::uint64_t>(),
                             je.at("checkpoint").get<std::string>()});
    return m;
}

} // namespace ensemble
