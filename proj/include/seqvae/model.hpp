#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "numkit/ndarray.hpp"
#include "numkit/rng.hpp"
#include "numkit/tape.hpp"

namespace seqvae {

struct Arch {
    std::size_t Ds = 0; // state dim
    std::size_t Da = 0; // action dim
    std::size_t H = 64; // recurrent hidden size
    std::size_t L = 8;  // latent dim
    std::size_t E = 64; // encoder MLP hidden
    std::size_t Dd = 64; // decoder head hidden
};

constexpr double kLogvarLo = -10.0;
constexpr double kLogvarHi = 4.0;

/// Weights of the recurrent conditional VAE plus frozen whitening stats.
/// Learnable arrays live in `w`, indexed by Idx; whitening arrays are fit
/// once from the training set and are not updated by the optimizer.
struct SeqVaeParams {
    enum Idx : std::size_t {
        Winit, Binit,                    // s0 -> initial hidden
        Wxr, Whr, Br, Wxu, Whu, Bu, Wxc, Whc, Bc, // gated recurrent cell
        We1, Be1, Wemu, Bemu, Welv, Belv,          // posterior head
        Wd1, Bd1, Wdm, Bdm, Wdv, Bdv, Wskip,       // decoder head + linear skip
        Count
    };
    static const char* name(std::size_t idx);

    Arch arch;
    std::vector<std::size_t> angular; // state dims that live on the circle
    std::vector<numkit::NDArray> w;   // indexed by Idx
    numkit::NDArray mu_s, sd_s;       // {1, Ds}
    numkit::NDArray mu_a, sd_a;       // {1, Da}

    static SeqVaeParams init(Arch arch, std::vector<std::size_t> angular, numkit::Rng& rng);
    bool all_finite() const;
};

/// Parameters bound onto a tape as leaves, plus precomputed whitening leaves.
struct BoundParams {
    const SeqVaeParams* p = nullptr;
    std::vector<numkit::Var> w;
    numkit::Var mu_s, inv_sd_s, sd_s, two_ln_sd_s;
    numkit::Var mu_a, inv_sd_a;
};

BoundParams bind(numkit::Tape& tape, const SeqVaeParams& p);

// Graph pieces over batched {B, dim} arrays. States/actions are raw
// simulator units; whitening happens inside.
numkit::Var whiten_state(const BoundParams& b, numkit::Var s);
numkit::Var whiten_action(const BoundParams& b, numkit::Var a);
numkit::Var initial_hidden(const BoundParams& b, numkit::Var s0);

/// One update of the gated recurrent cell; x is the whitened step input.
numkit::Var gru_step(const BoundParams& b, numkit::Var h, numkit::Var x);

/// Posterior head: (hidden, whitened true next state) -> (mu, logvar).
std::pair<numkit::Var, numkit::Var> encode(const BoundParams& b, numkit::Var h, numkit::Var next_w);

/// z = mu + exp(logvar/2) * noise.
numkit::Var reparameterize(numkit::Var mu, numkit::Var logvar, numkit::Var noise);

struct DecodeOut {
    numkit::Var mean;   // absolute next state, simulator units
    numkit::Var logvar; // clamped to [kLogvarLo, kLogvarHi]
    numkit::Var hidden; // advanced recurrent state
};

/// Advances the cell on (prev_state, action, z) and emits the next-state
/// Gaussian. The mean is prev_state plus a learned residual.
DecodeOut decode(const BoundParams& b, numkit::Var h, numkit::Var z, numkit::Var s, numkit::Var a);

// Single-vector convenience wrappers (fresh throwaway tape per call).
std::pair<std::vector<double>, std::vector<double>>
encode_step(const SeqVaeParams& p, const std::vector<double>& hidden, const std::vector<double>& next_state);

std::vector<double> reparameterize(const std::vector<double>& mu, const std::vector<double>& logvar,
                                   const std::vector<double>& noise);

struct DecodeStepOut {
    std::vector<double> mean, logvar, hidden;
};

DecodeStepOut decode_step(const SeqVaeParams& p, const std::vector<double>& hidden,
                          const std::vector<double>& z, const std::vector<double>& prev_state,
                          const std::vector<double>& action);

std::vector<double> initial_hidden(const SeqVaeParams& p, const std::vector<double>& s0);

double wrap_angle(double a); // into (-pi, pi]

} // namespace seqvae
