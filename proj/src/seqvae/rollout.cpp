#include "seqvae/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "numkit/rng.hpp"
#include "numkit/tape.hpp"

namespace seqvae {

bool RolloutBatch::is_excluded(std::size_t k) const {
    return std::binary_search(excluded.begin(), excluded.end(), k);
}

namespace {

numkit::NDArray replicate_row(const std::vector<double>& row, std::size_t K) {
    numkit::NDArray a({K, row.size()});
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t d = 0; d < row.size(); ++d) a[k * row.size() + d] = row[d];
    return a;
}

bool row_finite(const numkit::NDArray& a, std::size_t k, std::size_t dim) {
    for (std::size_t d = 0; d < dim; ++d)
        if (!std::isfinite(a[k * dim + d])) return false;
    return true;
}

} // namespace

RolloutBatch rollout(const SeqVaeParams& params, const std::vector<double>& s0,
                     const std::vector<std::vector<double>>& actions, std::size_t K, std::uint64_t seed,
                     std::size_t model_id) {
    const Arch& arch = params.arch;
    if (K == 0) throw std::invalid_argument("rollout: K must be >= 1");
    if (actions.empty()) throw std::invalid_argument("rollout: need at least one action");
    if (s0.size() != arch.Ds) throw std::invalid_argument("rollout: s0 dim mismatch");
    for (const auto& a : actions)
        if (a.size() != arch.Da) throw std::invalid_argument("rollout: action dim mismatch");
    if (!params.all_finite()) throw std::invalid_argument("rollout: non-finite parameters");

    const std::size_t T = actions.size();
    const std::size_t Ds = arch.Ds;
    RolloutBatch out;
    out.model_id = model_id;
    out.seed = seed;
    out.K = K;
    out.T = T;
    out.Ds = Ds;
    out.s0 = s0;
    out.actions = actions;
    out.states.assign(K * (T + 1) * Ds, 0.0);

    numkit::Rng rng(seed);
    std::vector<bool> alive(K, true);

    numkit::NDArray cur = replicate_row(s0, K); // {K, Ds}
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t d = 0; d < Ds; ++d) out.states[(k * (T + 1)) * Ds + d] = s0[d];

    numkit::NDArray h; // {K, H}
    {
        numkit::Tape tape;
        BoundParams b = bind(tape, params);
        h = tape.value(initial_hidden(b, tape.leaf(cur)));
    }

    for (std::size_t t = 0; t < T; ++t) {
        numkit::NDArray z({K, arch.L});
        for (std::size_t i = 0; i < z.size(); ++i) z[i] = rng.normal();
        numkit::NDArray eps({K, Ds});
        for (std::size_t i = 0; i < eps.size(); ++i) eps[i] = rng.normal();

        numkit::NDArray mean, logvar, h_next;
        {
            // throwaway tape: values only, no backward pass
            numkit::Tape tape;
            BoundParams b = bind(tape, params);
            DecodeOut dec = decode(b, tape.leaf(h), tape.leaf(z), tape.leaf(cur), tape.leaf(replicate_row(actions[t], K)));
            mean = tape.value(dec.mean);
            logvar = tape.value(dec.logvar);
            h_next = tape.value(dec.hidden);
        }

        numkit::NDArray next({K, Ds});
        for (std::size_t k = 0; k < K; ++k) {
            if (alive[k]) {
                for (std::size_t d = 0; d < Ds; ++d) {
                    const std::size_t i = k * Ds + d;
                    next[i] = mean[i] + std::exp(0.5 * logvar[i]) * eps[i];
                }
                for (std::size_t d : params.angular) next[k * Ds + d] = wrap_angle(next[k * Ds + d]);
                if (!row_finite(next, k, Ds) || !row_finite(h_next, k, arch.H)) {
                    alive[k] = false;
                    out.excluded.push_back(k);
                }
            }
            if (!alive[k]) { // freeze at last finite state
                for (std::size_t d = 0; d < Ds; ++d) next[k * Ds + d] = cur[k * Ds + d];
                for (std::size_t d = 0; d < arch.H; ++d) h_next[k * arch.H + d] = h[k * arch.H + d];
            }
            for (std::size_t d = 0; d < Ds; ++d)
                out.states[(k * (T + 1) + t + 1) * Ds + d] = next[k * Ds + d];
        }
        cur = std::move(next);
        h = std::move(h_next);
    }
    std::sort(out.excluded.begin(), out.excluded.end());
    return out;
}

} // namespace seqvae
