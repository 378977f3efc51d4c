#include "seqvae/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "numkit/adam.hpp"
#include "numkit/tape.hpp"

namespace seqvae {

namespace {
constexpr double kLn2Pi = 1.8378770664093453; // ln(2*pi)
}

void TrainConfig::validate() const {
    if (epochs == 0 || batch_size == 0 || latent == 0 || hidden == 0)
        throw std::invalid_argument("train config: counts and sizes must be positive");
    if (!(lr > 0.0)) throw std::invalid_argument("train config: lr must be positive");
    if (!(beta_max > 0.0 && beta_max <= 1.0))
        throw std::invalid_argument("train config: beta_max must lie in (0, 1]");
}

double beta_at_epoch(const TrainConfig& cfg, std::size_t epoch) {
    const double half = static_cast<double>(std::max<std::size_t>(1, cfg.epochs / 2));
    return cfg.beta_max * std::min(1.0, static_cast<double>(epoch) / half);
}

std::vector<std::vector<double>> unwrapped_targets(const Trajectory& traj,
                                                   const std::vector<std::size_t>& angular_dims) {
    std::vector<std::vector<double>> tgt(traj.horizon());
    for (std::size_t t = 0; t < traj.horizon(); ++t) {
        tgt[t] = traj.states[t + 1];
        for (std::size_t d : angular_dims)
            tgt[t][d] = traj.states[t][d] + wrap_angle(traj.states[t + 1][d] - traj.states[t][d]);
    }
    return tgt;
}

namespace {

struct ElboGraph {
    numkit::Var loss, recon, kl;
};

// A contiguous training view into one trajectory: steps [off, off + len).
struct Slice {
    const Trajectory* tr = nullptr;
    const std::vector<std::vector<double>>* tgt = nullptr;
    std::size_t off = 0, len = 0;
};

numkit::NDArray stack_states(const std::vector<Slice>& batch, std::size_t t, std::size_t Ds) {
    numkit::NDArray a({batch.size(), Ds});
    for (std::size_t i = 0; i < batch.size(); ++i)
        for (std::size_t d = 0; d < Ds; ++d) a[i * Ds + d] = batch[i].tr->states[batch[i].off + t][d];
    return a;
}

numkit::NDArray stack_actions(const std::vector<Slice>& batch, std::size_t t, std::size_t Da) {
    numkit::NDArray a({batch.size(), Da});
    for (std::size_t i = 0; i < batch.size(); ++i)
        for (std::size_t d = 0; d < Da; ++d) a[i * Da + d] = batch[i].tr->actions[batch[i].off + t][d];
    return a;
}

numkit::NDArray stack_targets(const std::vector<Slice>& batch, std::size_t t, std::size_t Ds) {
    numkit::NDArray a({batch.size(), Ds});
    for (std::size_t i = 0; i < batch.size(); ++i)
        for (std::size_t d = 0; d < Ds; ++d) a[i * Ds + d] = (*batch[i].tgt)[batch[i].off + t][d];
    return a;
}

numkit::NDArray draw_noise(std::size_t rows, std::size_t cols, numkit::Rng& rng) {
    numkit::NDArray a({rows, cols});
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = rng.normal();
    return a;
}

// Teacher-forced ELBO over a same-length batch of slices. Values in nats;
// recon is summed over state dims, kl over latent dims, both averaged over
// batch and timesteps.
ElboGraph build_elbo(numkit::Tape& tape, const BoundParams& b, const std::vector<Slice>& batch, double beta,
                     numkit::Rng& rng) {
    using namespace numkit;
    const Arch& arch = b.p->arch;
    const std::size_t B = batch.size();
    const std::size_t T = batch[0].len;
    const double inv_b = 1.0 / static_cast<double>(B);

    Var h = initial_hidden(b, tape.leaf(stack_states(batch, 0, arch.Ds)));
    Var recon_acc, kl_acc;
    for (std::size_t t = 0; t < T; ++t) {
        Var s = tape.leaf(stack_states(batch, t, arch.Ds));
        Var a = tape.leaf(stack_actions(batch, t, arch.Da));
        Var tgt = tape.leaf(stack_targets(batch, t, arch.Ds));
        Var eps = tape.leaf(draw_noise(B, arch.L, rng));

        auto [mu, lv] = encode(b, h, whiten_state(b, tgt));
        Var z = reparameterize(mu, lv, eps);
        DecodeOut dec = decode(b, h, z, s, a);
        h = dec.hidden;

        Var err = sub(tgt, dec.mean);
        Var nll = scale(add(add_const(dec.logvar, kLn2Pi), mul(square(err), exp(scale(dec.logvar, -1.0)))), 0.5);
        Var recon_t = scale(reduce_sum(nll), inv_b);
        Var kl_t = scale(reduce_sum(sub(add(square(mu), exp(lv)), add_const(lv, 1.0))), 0.5 * inv_b);
        recon_acc = t == 0 ? recon_t : add(recon_acc, recon_t);
        kl_acc = t == 0 ? kl_t : add(kl_acc, kl_t);
    }
    const double inv_t = 1.0 / static_cast<double>(T);
    ElboGraph g;
    g.recon = scale(recon_acc, inv_t);
    g.kl = scale(kl_acc, inv_t);
    g.loss = add(g.recon, scale(g.kl, beta));
    return g;
}

void fit_whitening(const std::vector<Trajectory>& dataset, SeqVaeParams& p) {
    const std::size_t Ds = p.arch.Ds, Da = p.arch.Da;
    std::vector<double> s_sum(Ds), s_sq(Ds), a_sum(Da), a_sq(Da);
    std::size_t ns = 0, na = 0;
    for (const auto& tr : dataset) {
        for (const auto& s : tr.states) {
            for (std::size_t d = 0; d < Ds; ++d) {
                s_sum[d] += s[d];
                s_sq[d] += s[d] * s[d];
            }
            ++ns;
        }
        for (const auto& a : tr.actions) {
            for (std::size_t d = 0; d < Da; ++d) {
                a_sum[d] += a[d];
                a_sq[d] += a[d] * a[d];
            }
            ++na;
        }
    }
    for (std::size_t d = 0; d < Ds; ++d) {
        const double m = s_sum[d] / static_cast<double>(ns);
        const double var = std::max(0.0, s_sq[d] / static_cast<double>(ns) - m * m);
        p.mu_s[d] = m;
        p.sd_s[d] = std::max(1e-3, std::sqrt(var)); // floor keeps whitening sane on near-constant dims
    }
    for (std::size_t d = 0; d < Da; ++d) {
        const double m = a_sum[d] / static_cast<double>(na);
        const double var = std::max(0.0, a_sq[d] / static_cast<double>(na) - m * m);
        p.mu_a[d] = m;
        p.sd_a[d] = std::max(1e-3, std::sqrt(var));
    }
}

} // namespace

ElboParts elbo_loss(const Trajectory& traj, const SeqVaeParams& params, double beta, numkit::Rng& rng) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("elbo_loss: beta must lie in [0, 1]");
    validate(traj);
    if (traj.state_dim() != params.arch.Ds || traj.action_dim() != params.arch.Da)
        throw std::invalid_argument("elbo_loss: trajectory dims do not match model");
    numkit::Tape tape;
    BoundParams b = bind(tape, params);
    const std::vector<std::vector<double>> targets = unwrapped_targets(traj, params.angular);
    std::vector<Slice> batch{{&traj, &targets, 0, traj.horizon()}};
    ElboGraph g = build_elbo(tape, b, batch, beta, rng);
    return {tape.value(g.loss)[0], tape.value(g.recon)[0], tape.value(g.kl)[0]};
}

TrainResult train(const std::vector<Trajectory>& dataset, const TrainConfig& cfg) {
    cfg.validate();
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
    for (const auto& tr : dataset) validate(tr);
    const std::size_t Ds = dataset[0].state_dim();
    const std::size_t Da = dataset[0].action_dim();
    for (const auto& tr : dataset)
        if (tr.state_dim() != Ds || tr.action_dim() != Da)
            throw std::invalid_argument("train: trajectories disagree on state/action dims");

    Arch arch;
    arch.Ds = Ds;
    arch.Da = Da;
    arch.H = cfg.hidden;
    arch.L = cfg.latent;
    arch.E = cfg.hidden;
    arch.Dd = cfg.hidden;

    numkit::Rng init_rng(numkit::derive_seed(cfg.seed, "seqvae.init", 0));
    numkit::Rng noise_rng(numkit::derive_seed(cfg.seed, "seqvae.noise", 0));
    numkit::Rng shuffle_rng(numkit::derive_seed(cfg.seed, "seqvae.shuffle", 0));
    numkit::Rng crop_rng(numkit::derive_seed(cfg.seed, "seqvae.crop", 0));

    SeqVaeParams params = SeqVaeParams::init(arch, cfg.angular_dims, init_rng);
    fit_whitening(dataset, params);

    // Residual targets are fixed by the data; compute once.
    std::vector<std::vector<std::vector<double>>> all_targets(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i)
        all_targets[i] = unwrapped_targets(dataset[i], params.angular);

    numkit::AdamConfig acfg;
    acfg.lr = cfg.lr;
    numkit::AdamState opt = numkit::AdamState::init(params.w, acfg);

    TrainLog log;
    log.dataset_fingerprint = fingerprint(dataset);
    std::size_t consecutive_bad = 0;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double beta = beta_at_epoch(cfg, epoch);
        // anneal to lr/10 by the last epoch; reduces endgame parameter jitter
        const double frac = cfg.epochs > 1 ? static_cast<double>(epoch) / static_cast<double>(cfg.epochs - 1) : 0.0;
        opt.cfg.lr = cfg.lr * (1.0 - 0.9 * frac);

        // Draw this epoch's slice per trajectory, then stack same-length
        // slices into minibatches of {B, dim} arrays.
        std::vector<Slice> slices(dataset.size());
        std::map<std::size_t, std::vector<std::size_t>> by_len;
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            const std::size_t T = dataset[i].horizon();
            const std::size_t len = (cfg.window == 0 || cfg.window >= T) ? T : cfg.window;
            const std::size_t off = len == T ? 0 : crop_rng.below(T - len + 1);
            slices[i] = {&dataset[i], &all_targets[i], off, len};
            by_len[len].push_back(i);
        }
        std::vector<std::vector<std::size_t>> batches;
        for (auto& [len, idxs] : by_len) {
            shuffle_rng.shuffle(idxs);
            for (std::size_t at = 0; at < idxs.size(); at += cfg.batch_size) {
                const std::size_t end = std::min(idxs.size(), at + cfg.batch_size);
                batches.emplace_back(idxs.begin() + at, idxs.begin() + end);
            }
        }
        shuffle_rng.shuffle(batches);

        EpochStats stats;
        stats.beta = beta;
        std::size_t accepted = 0;
        for (const auto& idxs : batches) {
            std::vector<Slice> batch;
            batch.reserve(idxs.size());
            for (std::size_t i : idxs) batch.push_back(slices[i]);

            numkit::Tape tape;
            BoundParams b = bind(tape, params);
            ElboGraph g = build_elbo(tape, b, batch, beta, noise_rng);
            const double loss = tape.value(g.loss)[0];
            if (!std::isfinite(loss)) {
                stats.rejected_steps += 1;
                if (++consecutive_bad >= 2) {
                    log.epochs.push_back(stats);
                    throw TrainDiverged(log);
                }
                continue;
            }
            consecutive_bad = 0;

            numkit::Gradients grads = numkit::backward(tape, g.loss);
            std::vector<numkit::NDArray> gvec(params.w.size());
            for (std::size_t i = 0; i < params.w.size(); ++i) {
                const numkit::NDArray& ga = grads.at(b.w[i]);
                gvec[i] = ga.size() == params.w[i].size() ? ga : numkit::NDArray(params.w[i].shape());
            }
            numkit::adam_step(params.w, gvec, opt);

            stats.loss += loss;
            stats.recon += tape.value(g.recon)[0];
            stats.kl += tape.value(g.kl)[0];
            ++accepted;
        }
        if (accepted > 0) {
            stats.loss /= static_cast<double>(accepted);
            stats.recon /= static_cast<double>(accepted);
            stats.kl /= static_cast<double>(accepted);
        }
        log.epochs.push_back(stats);
    }
    return {std::move(params), std::move(log)};
}

} // namespace seqvae
