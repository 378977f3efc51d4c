#include "cli/config.hpp"

#include <algorithm>

#include "json.hpp"
#include "numkit/hash.hpp"
#include "numkit/rng.hpp"
#include "uqio/fileio.hpp"

namespace cli {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::vector<std::string>& keys, const std::string& where) {
    for (const auto& item : j.items())
        if (std::find(keys.begin(), keys.end(), item.key()) == keys.end())
            throw ConfigError("config: unknown key '" + item.key() + "' in " + where);
    for (const auto& k : keys)
        if (!j.contains(k)) throw ConfigError("config: missing key '" + k + "' in " + where);
}

template <typename T>
T field(const json& j, const std::string& key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: bad value for '" + key + "' in " + where);
    }
}

} // namespace

void ExperimentConfig::validate() const {
    try {
        env.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: env: ") + e.what());
    }
    if (data.episodes == 0) throw ConfigError("config: data.episodes must be positive");
    if (data.horizon == 0) throw ConfigError("config: data.horizon must be positive");
    seqvae::TrainConfig tc = train;
    tc.angular_dims = pusherenv::angular_dims();
    try {
        tc.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: train: ") + e.what());
    }
    if (ensemble.members == 0) throw ConfigError("config: ensemble.members must be positive");
    if (ensemble.rollouts_per_member == 0)
        throw ConfigError("config: ensemble.rollouts_per_member must be positive");
    try {
        success.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: success: ") + e.what());
    }
    if (success.deadline > data.horizon)
        throw ConfigError("config: success.deadline " + std::to_string(success.deadline) +
                          " exceeds data.horizon " + std::to_string(data.horizon));
    if (report_dims.empty()) throw ConfigError("config: report_dims must not be empty");
    const auto& labels = pusherenv::state_labels();
    for (const auto& d : report_dims)
        if (std::find(labels.begin(), labels.end(), d) == labels.end())
            throw ConfigError("config: report_dims: unknown state dimension '" + d + "'");
    if (output_dir.empty()) throw ConfigError("config: output_dir must not be empty");
}

std::string config_json(const ExperimentConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir;
    j["env"] = {{"mode", pusherenv::mode_name(cfg.env.mode)},
                {"dt", cfg.env.dt},
                {"l1", cfg.env.l1},
                {"l2", cfg.env.l2},
                {"fingertip_radius", cfg.env.fingertip_radius},
                {"ball_radius", cfg.env.ball_radius},
                {"drag", cfg.env.drag},
                {"sigma_a", cfg.env.sigma_a}};
    j["data"] = {{"episodes", cfg.data.episodes}, {"horizon", cfg.data.horizon}};
    j["train"] = {{"epochs", cfg.train.epochs},   {"batch_size", cfg.train.batch_size},
                  {"lr", cfg.train.lr},           {"beta_max", cfg.train.beta_max},
                  {"latent", cfg.train.latent},   {"hidden", cfg.train.hidden},
                  {"window", cfg.train.window}};
    j["ensemble"] = {{"members", cfg.ensemble.members},
                     {"rollouts_per_member", cfg.ensemble.rollouts_per_member},
                     {"bootstrap", cfg.ensemble.bootstrap}};
    j["success"] = {{"radius", cfg.success.radius}, {"deadline", cfg.success.deadline}};
    j["report_dims"] = cfg.report_dims;
    return j.dump(1) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: not valid JSON: ") + e.what());
    }
    reject_unknown(j, {"seed", "output_dir", "env", "data", "train", "ensemble", "success", "report_dims"},
                   "config");

    ExperimentConfig cfg;
    cfg.seed = field<std::uint64_t>(j, "seed", "config");
    cfg.output_dir = field<std::string>(j, "output_dir", "config");

    const json& je = j.at("env");
    reject_unknown(je, {"mode", "dt", "l1", "l2", "fingertip_radius", "ball_radius", "drag", "sigma_a"},
                   "env");
    try {
        cfg.env.mode = pusherenv::mode_from_name(field<std::string>(je, "mode", "env"));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: env: ") + e.what());
    }
    cfg.env.dt = field<double>(je, "dt", "env");
    cfg.env.l1 = field<double>(je, "l1", "env");
    cfg.env.l2 = field<double>(je, "l2", "env");
    cfg.env.fingertip_radius = field<double>(je, "fingertip_radius", "env");
    cfg.env.ball_radius = field<double>(je, "ball_radius", "env");
    cfg.env.drag = field<double>(je, "drag", "env");
    cfg.env.sigma_a = field<double>(je, "sigma_a", "env");

    const json& jd = j.at("data");
    reject_unknown(jd, {"episodes", "horizon"}, "data");
    cfg.data.episodes = field<std::size_t>(jd, "episodes", "data");
    cfg.data.horizon = field<std::size_t>(jd, "horizon", "data");

    const json& jt = j.at("train");
    reject_unknown(jt, {"epochs", "batch_size", "lr", "beta_max", "latent", "hidden", "window"}, "train");
    cfg.train.epochs = field<std::size_t>(jt, "epochs", "train");
    cfg.train.batch_size = field<std::size_t>(jt, "batch_size", "train");
    cfg.train.lr = field<double>(jt, "lr", "train");
    cfg.train.beta_max = field<double>(jt, "beta_max", "train");
    cfg.train.latent = field<std::size_t>(jt, "latent", "train");
    cfg.train.hidden = field<std::size_t>(jt, "hidden", "train");
    cfg.train.window = field<std::size_t>(jt, "window", "train");

    const json& jn = j.at("ensemble");
    reject_unknown(jn, {"members", "rollouts_per_member", "bootstrap"}, "ensemble");
    cfg.ensemble.members = field<std::size_t>(jn, "members", "ensemble");
    cfg.ensemble.rollouts_per_member = field<std::size_t>(jn, "rollouts_per_member", "ensemble");
    cfg.ensemble.bootstrap = field<bool>(jn, "bootstrap", "ensemble");

    const json& js = j.at("success");
    reject_unknown(js, {"radius", "deadline"}, "success");
    cfg.success.radius = field<double>(js, "radius", "success");
    cfg.success.deadline = field<std::size_t>(js, "deadline", "success");

    cfg.report_dims = field<std::vector<std::string>>(j, "report_dims", "config");
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::string text;
    try {
        text = uqio::read_file_text(path);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return config_from_json(text);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    return numkit::Fnv1a64().update(config_json(cfg)).digest();
}

seqvae::TrainConfig train_config(const ExperimentConfig& cfg, std::uint64_t dataset_fingerprint) {
    seqvae::TrainConfig tc = cfg.train;
    tc.angular_dims = pusherenv::angular_dims();
    tc.seed = numkit::derive_seed(cfg.seed, "train", dataset_fingerprint);
    return tc;
}

} // namespace cli
