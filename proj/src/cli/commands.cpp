#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "cli/config.hpp"
#include "competency/competency.hpp"
#include "ensemble/ensemble.hpp"
#include "numkit/hash.hpp"
#include "numkit/rng.hpp"
#include "pusherenv/dataset.hpp"
#include "pusherenv/env.hpp"
#include "seqvae/checkpoint.hpp"
#include "uncertainty/decompose.hpp"
#include "uqio/fileio.hpp"

namespace fs = std::filesystem;

namespace cli {
namespace {

unsigned long long ull(std::uint64_t v) { return static_cast<unsigned long long>(v); }

void require_input_file(const std::string& path, const std::string& what) {
    if (path.empty()) throw ConfigError(what + ": no path given");
    if (!fs::exists(path)) throw ConfigError(what + ": no such file: " + path);
}

/// Scripted-controller action sequence from `s0` in the deterministic
/// simulator: the open-loop plan every report conditions on.
std::vector<std::vector<double>> det_plan(const pusherenv::EnvState& s0, std::size_t T) {
    const auto cfg = pusherenv::make_config(pusherenv::Mode::Deterministic);
    numkit::Rng rng(0); // never consumed at sigma_a = 0
    std::vector<std::vector<double>> plan;
    plan.reserve(T);
    pusherenv::EnvState s = s0;
    for (std::size_t t = 0; t < T; ++t) {
        const auto a = pusherenv::scripted_policy(s, cfg);
        plan.push_back({a[0], a[1]});
        s = pusherenv::step(s, a, cfg, rng);
    }
    return plan;
}

struct LoadedEnsemble {
    ensemble::Ensemble ens;
    std::uint64_t manifest_file_hash = 0;
    ensemble::Manifest manifest;
};

LoadedEnsemble load_ensemble(const std::string& manifest_path, std::uint64_t expected_config_hash) {
    require_input_file(manifest_path, "manifest");
    const std::string text = uqio::read_file_text(manifest_path);
    const ensemble::Manifest m = ensemble::load_manifest(manifest_path);
    if (m.config_hash != 0 && m.config_hash != expected_config_hash) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "manifest was produced under config %016llx, this config is %016llx",
                      ull(m.config_hash), ull(expected_config_hash));
        throw std::runtime_error(msg);
    }
    LoadedEnsemble out;
    out.manifest = m;
    out.manifest_file_hash = numkit::Fnv1a64().update(text).digest();
    out.ens.dataset_fingerprint = m.dataset_fingerprint;
    const fs::path base = fs::path(manifest_path).parent_path();
    for (const auto& e : m.members) {
        fs::path p = e.checkpoint_path;
        if (p.is_relative()) p = base / p;
        seqvae::Checkpoint ck;
        try {
            ck = seqvae::load_checkpoint(p.string());
        } catch (const std::exception& ex) {
            throw std::runtime_error("member " + std::to_string(e.id) + ": " + ex.what());
        }
        if (ck.params.arch.Ds != pusherenv::kStateDim)
            throw std::runtime_error("member " + std::to_string(e.id) + " models " +
                                     std::to_string(ck.params.arch.Ds) + "-dim states, the pusher task has " +
                                     std::to_string(pusherenv::kStateDim));
        out.ens.members.push_back(std::move(ck.params));
        out.ens.info.push_back({e.id, e.train_seed});
        out.ens.logs.push_back(std::move(ck.log));
    }
    if (out.ens.members.empty()) throw std::runtime_error("manifest lists no members: " + manifest_path);
    return out;
}

std::vector<double> parse_s0(const std::string& text) {
    if (text == "canonical") return pusherenv::canonical_start().to_vector();
    if (text == "canonical-ood") return pusherenv::canonical_ood_start().to_vector();
    std::vector<double> v;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(tok, &used));
            while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("--s0: not a number: '" + tok + "'");
        }
    }
    if (v.size() != pusherenv::kStateDim)
        throw ConfigError("--s0: expected " + std::to_string(pusherenv::kStateDim) +
                          " comma-separated numbers, got " + std::to_string(v.size()));
    return v;
}

std::vector<std::vector<double>> parse_actions(const std::string& path) {
    require_input_file(path, "actions file");
    const std::string text = uqio::read_file_text(path);
    std::vector<std::vector<double>> actions;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::stringstream ls(line);
        double a0, a1;
        if (!(ls >> a0)) {
            std::string probe;
            if (!(std::stringstream(line) >> probe)) continue; // blank line
            throw ConfigError("actions file line " + std::to_string(lineno) + ": expected two numbers");
        }
        if (!(ls >> a1))
            throw ConfigError("actions file line " + std::to_string(lineno) + ": expected two numbers");
        std::string extra;
        if (ls >> extra)
            throw ConfigError("actions file line " + std::to_string(lineno) + ": trailing content '" +
                              extra + "'");
        actions.push_back({a0, a1});
    }
    if (actions.empty()) throw ConfigError("actions file " + path + " contains no steps");
    return actions;
}

void print_table(const std::vector<competency::CompetencyReport>& rows) {
    std::printf("%-15s %10s %10s %10s   %s\n", "condition", "Total", "Aleatoric", "Epistemic",
                "Forecasted Probability of Success");
    for (const auto& r : rows)
        std::printf("%-15s %10.3f %10.3f %10.3f   %.3f [%.3f, %.3f]\n", r.mode.c_str(), r.total_bits,
                    r.aleatoric_bits, r.epistemic_bits, r.p_success, r.ci_low, r.ci_high);
}

} // namespace

int cmd_gen_data(const GenDataOpts& opts) {
    const ExperimentConfig cfg = load_config(opts.config_path);
    const std::uint64_t stamp = config_hash(cfg);

    pusherenv::EnvConfig env = cfg.env;
    if (!opts.mode.empty()) {
        pusherenv::Mode m;
        try {
            m = pusherenv::mode_from_name(opts.mode);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("--mode: ") + e.what());
        }
        // Mode override keeps the document's physics but takes the mode's
        // default noise level, so --mode deterministic really means sigma 0.
        env.mode = m;
        env.sigma_a = pusherenv::make_config(m).sigma_a;
        env.validate();
    }

    const std::uint64_t seed =
        numkit::derive_seed(cfg.seed, "gen-data", static_cast<std::uint64_t>(env.mode));
    pusherenv::Dataset ds = pusherenv::generate_dataset(env, cfg.data.episodes, cfg.data.horizon, seed);
    ds.meta.config_hash = stamp;

    std::string out = opts.out_path;
    if (out.empty()) {
        fs::create_directories(cfg.output_dir);
        out = (fs::path(cfg.output_dir) / ("dataset_" + pusherenv::mode_name(env.mode) + ".bin")).string();
    } else if (fs::path(out).has_parent_path()) {
        fs::create_directories(fs::path(out).parent_path());
    }
    pusherenv::save_dataset(out, ds);
    std::printf("dataset: n=%zu T=%zu mode=%s sigma_a=%.3g hash=%016llx config=%016llx -> %s\n",
                ds.meta.n, ds.meta.T, pusherenv::mode_name(env.mode).c_str(), env.sigma_a,
                ull(ds.content_hash), ull(stamp), out.c_str());
    return 0;
}

int cmd_train(const TrainOpts& opts) {
    const ExperimentConfig cfg = load_config(opts.config_path);
    const std::uint64_t stamp = config_hash(cfg);

    require_input_file(opts.dataset_path, "dataset");
    const pusherenv::Dataset ds = pusherenv::load_dataset(opts.dataset_path);
    if (ds.meta.config_hash != 0 && ds.meta.config_hash != stamp) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "dataset was generated under config %016llx, this config is %016llx",
                      ull(ds.meta.config_hash), ull(stamp));
        throw std::runtime_error(msg);
    }

    const std::size_t M = opts.members ? opts.members : cfg.ensemble.members;
    const seqvae::TrainConfig tc = train_config(cfg, ds.content_hash);
    const ensemble::Ensemble ens = ensemble::train_ensemble(ds.trajectories, tc, M, cfg.ensemble.bootstrap);

    fs::path dir = opts.out_dir.empty()
                       ? fs::path(cfg.output_dir) / ("ensemble_" + pusherenv::mode_name(ds.meta.env.mode))
                       : fs::path(opts.out_dir);
    fs::create_directories(dir);

    ensemble::Manifest manifest;
    manifest.dataset_fingerprint = ds.content_hash;
    manifest.config_hash = stamp;
    for (std::size_t m = 0; m < M; ++m) {
        const std::string name = "member_" + std::to_string(ens.info[m].id) + ".json";
        seqvae::save_checkpoint((dir / name).string(), {ens.members[m], tc, ens.logs[m]});
        manifest.members.push_back({ens.info[m].id, ens.info[m].train_seed, name});
        const auto& last = ens.logs[m].epochs.back();
        std::printf("member %zu: final ELBO %.4f nats/step (recon %.4f, kl %.4f)\n", ens.info[m].id,
                    -(last.recon + last.kl), last.recon, last.kl);
    }
    const std::string mpath = (dir / "manifest.json").string();
    ensemble::save_manifest(mpath, manifest);
    std::printf("ensemble: M=%zu dataset=%016llx config=%016llx -> %s\n", M, ull(ds.content_hash),
                ull(stamp), mpath.c_str());
    return 0;
}

int cmd_report(const ReportOpts& opts) {
    const ExperimentConfig cfg = load_config(opts.config_path);
    const std::uint64_t stamp = config_hash(cfg);

    std::vector<std::string> conditions = opts.conditions;
    if (conditions.empty()) conditions = {"deterministic", "stochastic", "ood"};
    for (const auto& c : conditions)
        if (c != "deterministic" && c != "stochastic" && c != "ood")
            throw ConfigError("--conditions: unknown condition '" + c + "'");

    const auto wants = [&](const char* c) {
        return std::find(conditions.begin(), conditions.end(), c) != conditions.end();
    };
    const bool wants_stoch = wants("stochastic");
    const bool wants_det = wants("deterministic") || wants("ood");
    if (opts.manifest_det.empty() && wants_det)
        throw ConfigError("--manifest-det is required for the deterministic and ood conditions");
    if (opts.manifest_stoch.empty() && wants_stoch)
        throw ConfigError("--manifest-stoch is required for the stochastic condition");

    LoadedEnsemble det, sto;
    bool det_loaded = false, sto_loaded = false;
    const fs::path out_dir = opts.out_dir.empty() ? fs::path(cfg.output_dir) : fs::path(opts.out_dir);
    fs::create_directories(out_dir);

    const std::size_t T = cfg.data.horizon;
    const auto plan_nominal = det_plan(pusherenv::canonical_start(), T);
    const auto plan_ood = det_plan(pusherenv::canonical_ood_start(), T);

    std::vector<competency::CompetencyReport> rows;
    for (const std::string& cond : conditions) {
        const bool is_stoch = cond == "stochastic";
        if (is_stoch && !sto_loaded) {
            sto = load_ensemble(opts.manifest_stoch, stamp);
            sto_loaded = true;
        }
        if (!is_stoch && !det_loaded) {
            det = load_ensemble(opts.manifest_det, stamp);
            det_loaded = true;
        }
        const LoadedEnsemble& le = is_stoch ? sto : det;
        const bool is_ood = cond == "ood";
        const auto s0 =
            (is_ood ? pusherenv::canonical_ood_start() : pusherenv::canonical_start()).to_vector();
        const auto& plan = is_ood ? plan_ood : plan_nominal;
        const std::uint64_t cond_index = is_ood ? 2 : (is_stoch ? 1 : 0);
        const std::uint64_t seed = numkit::derive_seed(cfg.seed, "report", cond_index);

        const auto a = competency::assess_full(le.ens, s0, plan, cfg.success, cfg.report_dims,
                                               cfg.ensemble.rollouts_per_member, seed, cond,
                                               le.manifest_file_hash);
        const std::string jpath = (out_dir / ("report_" + cond + ".json")).string();
        const std::string cpath = (out_dir / ("entropy_" + cond + ".csv")).string();
        uqio::write_file_atomic(jpath, competency::report_json(a.report));
        uqio::write_file_atomic(cpath, uncertainty::to_csv(a.cells));
        std::printf("%s: wrote %s and %s\n", cond.c_str(), jpath.c_str(), cpath.c_str());
        if (opts.verbose)
            for (std::size_t m = 0; m < a.report.per_member_p.size(); ++m)
                std::printf("  member %zu: p_success %.3f\n", m, a.report.per_member_p[m]);
        rows.push_back(a.report);
    }
    print_table(rows);
    return 0;
}

int cmd_forecast(const ForecastOpts& opts) {
    const ExperimentConfig cfg = load_config(opts.config_path);
    const std::uint64_t stamp = config_hash(cfg);

    const LoadedEnsemble le = load_ensemble(opts.manifest, stamp);
    const std::vector<double> s0 = parse_s0(opts.s0);
    const auto actions = parse_actions(opts.actions_path);

    competency::SuccessSpec spec = cfg.success;
    if (opts.radius > 0.0) spec.radius = opts.radius;
    if (opts.deadline > 0) spec.deadline = opts.deadline;
    try {
        spec.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("success spec: ") + e.what());
    }
    if (actions.size() < spec.deadline)
        throw ConfigError("actions file provides " + std::to_string(actions.size()) +
                          " steps, the deadline needs " + std::to_string(spec.deadline));

    const std::uint64_t seed = numkit::derive_seed(cfg.seed, "forecast", 0);
    const auto rep = competency::assess(le.ens, s0, actions, spec, cfg.report_dims,
                                        cfg.ensemble.rollouts_per_member, seed, opts.label,
                                        le.manifest_file_hash);
    const std::string text = competency::report_json(rep);
    if (opts.out_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        if (fs::path(opts.out_path).has_parent_path())
            fs::create_directories(fs::path(opts.out_path).parent_path());
        uqio::write_file_atomic(opts.out_path, text);
        std::printf("forecast: p_success %.3f [%.3f, %.3f] -> %s\n", rep.p_success, rep.ci_low,
                    rep.ci_high, opts.out_path.c_str());
    }
    return 0;
}

} // namespace cli
