#include "seqvae/checkpoint.hpp"

#include <json.hpp>

#include "uqio/fileio.hpp"

namespace seqvae {

using nlohmann::json;

namespace {

json array_to_json(const numkit::NDArray& a) {
    json j;
    j["shape"] = a.shape();
    j["data"] = std::vector<double>(a.data(), a.data() + a.size());
    return j;
}

numkit::NDArray array_from_json(const json& j) {
    std::vector<std::size_t> shape = j.at("shape").get<std::vector<std::size_t>>();
    std::vector<double> data = j.at("data").get<std::vector<double>>();
    return numkit::NDArray(std::move(shape), std::move(data));
}

} // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    const SeqVaeParams& p = ckpt.params;
    json j;
    j["format"] = "seqvae-checkpoint";
    j["version"] = 1;
    j["arch"] = {{"Ds", p.arch.Ds}, {"Da", p.arch.Da}, {"H", p.arch.H},
                 {"L", p.arch.L},   {"E", p.arch.E},   {"Dd", p.arch.Dd}};
    j["angular_dims"] = p.angular;
    json arrays;
    for (std::size_t i = 0; i < SeqVaeParams::Count; ++i) arrays[SeqVaeParams::name(i)] = array_to_json(p.w[i]);
    arrays["whiten.mu_s"] = array_to_json(p.mu_s);
    arrays["whiten.sd_s"] = array_to_json(p.sd_s);
    arrays["whiten.mu_a"] = array_to_json(p.mu_a);
    arrays["whiten.sd_a"] = array_to_json(p.sd_a);
    j["arrays"] = std::move(arrays);
    j["train_config"] = {{"epochs", ckpt.config.epochs},   {"batch_size", ckpt.config.batch_size},
                         {"lr", ckpt.config.lr},           {"beta_max", ckpt.config.beta_max},
                         {"latent", ckpt.config.latent},   {"hidden", ckpt.config.hidden},
                         {"seed", ckpt.config.seed},       {"angular_dims", ckpt.config.angular_dims}};
    j["dataset_fingerprint"] = ckpt.log.dataset_fingerprint;
    json epochs = json::array();
    for (const EpochStats& e : ckpt.log.epochs)
        epochs.push_back({{"loss", e.loss},
                          {"recon", e.recon},
                          {"kl", e.kl},
                          {"beta", e.beta},
                          {"rejected_steps", e.rejected_steps}});
    j["log"] = {{"epochs", std::move(epochs)}};
    uqio::write_file_atomic(path, j.dump(1) + "\n");
}

Checkpoint load_checkpoint(const std::string& path) {
    json j = json::parse(uqio::read_file_text(path));
    if (j.at("format").get<std::string>() != "seqvae-checkpoint")
        throw std::runtime_error("checkpoint: unrecognized format marker in " + path);
    if (j.at("version").get<int>() != 1)
        throw std::runtime_error("checkpoint: unsupported version in " + path);

    Checkpoint c;
    const json& ja = j.at("arch");
    c.params.arch = {ja.at("Ds").get<std::size_t>(), ja.at("Da").get<std::size_t>(),
                     ja.at("H").get<std::size_t>(),  ja.at("L").get<std::size_t>(),
                     ja.at("E").get<std::size_t>(),  ja.at("Dd").get<std::size_t>()};
    c.params.angular = j.at("angular_dims").get<std::vector<std::size_t>>();
    const json& arrays = j.at("arrays");
    c.params.w.resize(SeqVaeParams::Count);
    for (std::size_t i = 0; i < SeqVaeParams::Count; ++i)
        c.params.w[i] = array_from_json(arrays.at(SeqVaeParams::name(i)));
    c.params.mu_s = array_from_json(arrays.at("whiten.mu_s"));
    c.params.sd_s = array_from_json(arrays.at("whiten.sd_s"));
    c.params.mu_a = array_from_json(arrays.at("whiten.mu_a"));
    c.params.sd_a = array_from_json(arrays.at("whiten.sd_a"));

    const json& jc = j.at("train_config");
    c.config.epochs = jc.at("epochs").get<std::size_t>();
    c.config.batch_size = jc.at("batch_size").get<std::size_t>();
    c.config.lr = jc.at("lr").get<double>();
    c.config.beta_max = jc.at("beta_max").get<double>();
    c.config.latent = jc.at("latent").get<std::size_t>();
    c.config.hidden = jc.at("hidden").get<std::size_t>();
    c.config.seed = jc.at("seed").get<std::uint64_t>();
    c.config.angular_dims = jc.at("angular_dims").get<std::vector<std::size_t>>();

    c.log.dataset_fingerprint = j.at("dataset_fingerprint").get<std::uint64_t>();
    for (const json& je : j.at("log").at("epochs")) {
        EpochStats e;
        e.loss = je.at("loss").get<double>();
        e.recon = je.at("recon").get<double>();
        e.kl = je.at("kl").get<double>();
        e.beta = je.at("beta").get<double>();
        e.rejected_steps = je.at("rejected_steps").get<std::size_t>();
        c.log.epochs.push_back(e);
    }

    // shape sanity against the declared architecture
    const Arch& a = c.params.arch;
    const std::size_t din = a.Ds + a.Da + a.L;
    if (c.params.w[SeqVaeParams::Wxr].shape() != std::vector<std::size_t>{din, a.H} ||
        c.params.w[SeqVaeParams::Wdm].shape() != std::vector<std::size_t>{a.Dd, a.Ds} ||
        c.params.mu_s.size() != a.Ds || c.params.mu_a.size() != a.Da)
        throw std::runtime_error("checkpoint: array shapes disagree with architecture in " + path);
    if (!c.params.all_finite()) throw std::runtime_error("checkpoint: non-finite parameters in " + path);
    return c;
}

} // namespace seqvae
