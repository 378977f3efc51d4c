#include "seqvae/model.hpp"

#include <cmath>
#include <stdexcept>

#include "numkit/hash.hpp"
#include "seqvae/trajectory.hpp"

namespace seqvae {

void validate(const Trajectory& traj) {
    if (traj.actions.empty()) throw std::invalid_argument("trajectory: needs at least one action");
    if (traj.states.size() != traj.actions.size() + 1)
        throw std::invalid_argument("trajectory: " + std::to_string(traj.states.size()) + " states vs " +
                                    std::to_string(traj.actions.size()) + " actions; expected T+1 states");
    const std::size_t ds = traj.states[0].size();
    const std::size_t da = traj.actions[0].size();
    if (ds == 0 || da == 0) throw std::invalid_argument("trajectory: zero-dimensional rows");
    for (const auto& s : traj.states) {
        if (s.size() != ds) throw std::invalid_argument("trajectory: ragged state rows");
        for (double v : s)
            if (!std::isfinite(v)) throw std::invalid_argument("trajectory: non-finite state entry");
    }
    for (const auto& a : traj.actions) {
        if (a.size() != da) throw std::invalid_argument("trajectory: ragged action rows");
        for (double v : a)
            if (!std::isfinite(v)) throw std::invalid_argument("trajectory: non-finite action entry");
    }
}

std::uint64_t fingerprint(const std::vector<Trajectory>& dataset) {
    numkit::Fnv1a64 h;
    h.update(static_cast<std::uint64_t>(dataset.size()));
    for (const auto& tr : dataset) {
        h.update(static_cast<std::uint64_t>(tr.horizon()));
        h.update(static_cast<std::uint64_t>(tr.state_dim()));
        h.update(static_cast<std::uint64_t>(tr.action_dim()));
        h.update(tr.mode);
        for (const auto& s : tr.states)
            for (double v : s) h.update(v);
        for (const auto& a : tr.actions)
            for (double v : a) h.update(v);
    }
    return h.digest();
}

double wrap_angle(double a) {
    constexpr double pi = 3.14159265358979323846;
    a = std::fmod(a + pi, 2.0 * pi);
    if (a <= 0.0) a += 2.0 * pi;
    return a - pi;
}

const char* SeqVaeParams::name(std::size_t idx) {
    static const char* names[Count] = {
        "init.w", "init.b",
        "gru.wxr", "gru.whr", "gru.br", "gru.wxu", "gru.whu", "gru.bu", "gru.wxc", "gru.whc", "gru.bc",
        "enc.w1", "enc.b1", "enc.wmu", "enc.bmu", "enc.wlv", "enc.blv",
        "dec.w1", "dec.b1", "dec.wm", "dec.bm", "dec.wv", "dec.bv", "dec.wskip",
    };
    return names[idx];
}

namespace {

numkit::NDArray randn(std::vector<std::size_t> shape, double scale, numkit::Rng& rng) {
    numkit::NDArray a(std::move(shape));
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = scale * rng.normal();
    return a;
}

} // namespace

SeqVaeParams SeqVaeParams::init(Arch arch, std::vector<std::size_t> angular, numkit::Rng& rng) {
    if (arch.Ds == 0 || arch.Da == 0 || arch.H == 0 || arch.L == 0 || arch.E == 0 || arch.Dd == 0)
        throw std::invalid_argument("seqvae: all architecture sizes must be positive");
    for (std::size_t d : angular)
        if (d >= arch.Ds) throw std::invalid_argument("seqvae: angular dim out of range");

    const std::size_t Din = arch.Ds + arch.Da + arch.L; // per-step cell input
    const std::size_t Fe = arch.H + arch.Ds;            // posterior head input
    const std::size_t Fd = arch.H + Din;                // decoder head input

    SeqVaeParams p;
    p.arch = arch;
    p.angular = std::move(angular);
    p.w.resize(Count);
    auto g = [&](std::size_t fan_in) { return 1.0 / std::sqrt(static_cast<double>(fan_in)); };

    p.w[Winit] = randn({arch.Ds, arch.H}, g(arch.Ds), rng);
    p.w[Binit] = numkit::NDArray({1, arch.H});
    p.w[Wxr] = randn({Din, arch.H}, g(Din), rng);
    p.w[Whr] = randn({arch.H, arch.H}, g(arch.H), rng);
    p.w[Br] = numkit::NDArray({1, arch.H});
    p.w[Wxu] = randn({Din, arch.H}, g(Din), rng);
    p.w[Whu] = randn({arch.H, arch.H}, g(arch.H), rng);
    p.w[Bu] = numkit::NDArray({1, arch.H});
    p.w[Wxc] = randn({Din, arch.H}, g(Din), rng);
    p.w[Whc] = randn({arch.H, arch.H}, g(arch.H), rng);
    p.w[Bc] = numkit::NDArray({1, arch.H});
    p.w[We1] = randn({Fe, arch.E}, g(Fe), rng);
    p.w[Be1] = numkit::NDArray({1, arch.E});
    p.w[Wemu] = randn({arch.E, arch.L}, g(arch.E), rng);
    p.w[Bemu] = numkit::NDArray({1, arch.L});
    p.w[Welv] = randn({arch.E, arch.L}, 0.1 * g(arch.E), rng);
    p.w[Belv] = numkit::NDArray({1, arch.L});
    p.w[Wd1] = randn({Fd, arch.Dd}, g(Fd), rng);
    p.w[Bd1] = numkit::NDArray({1, arch.Dd});
    p.w[Wdm] = randn({arch.Dd, arch.Ds}, 0.1 * g(arch.Dd), rng);
    p.w[Bdm] = numkit::NDArray({1, arch.Ds});
    p.w[Wdv] = randn({arch.Dd, arch.Ds}, 0.1 * g(arch.Dd), rng);
    p.w[Bdv] = numkit::NDArray({1, arch.Ds});
    p.w[Wskip] = randn({Din, arch.Ds}, 0.1 * g(Din), rng);

    p.mu_s = numkit::NDArray({1, arch.Ds});
    p.sd_s = numkit::NDArray::full({1, arch.Ds}, 1.0);
    p.mu_a = numkit::NDArray({1, arch.Da});
    p.sd_a = numkit::NDArray::full({1, arch.Da}, 1.0);
    return p;
}

bool SeqVaeParams::all_finite() const {
    for (const auto& a : w)
        if (!a.all_finite()) return false;
    return mu_s.all_finite() && sd_s.all_finite() && mu_a.all_finite() && sd_a.all_finite();
}

BoundParams bind(numkit::Tape& tape, const SeqVaeParams& p) {
    BoundParams b;
    b.p = &p;
    b.w.reserve(p.w.size());
    for (const auto& a : p.w) b.w.push_back(tape.leaf(a));
    const std::size_t Ds = p.arch.Ds, Da = p.arch.Da;
    numkit::NDArray inv_s({1, Ds}), two_ln({1, Ds}), inv_a({1, Da});
    for (std::size_t i = 0; i < Ds; ++i) {
        if (!(p.sd_s[i] > 0.0)) throw std::invalid_argument("seqvae: state whitening std must be positive");
        inv_s[i] = 1.0 / p.sd_s[i];
        two_ln[i] = 2.0 * std::log(p.sd_s[i]);
    }
    for (std::size_t i = 0; i < Da; ++i) {
        if (!(p.sd_a[i] > 0.0)) throw std::invalid_argument("seqvae: action whitening std must be positive");
        inv_a[i] = 1.0 / p.sd_a[i];
    }
    b.mu_s = tape.leaf(p.mu_s);
    b.inv_sd_s = tape.leaf(inv_s);
    b.sd_s = tape.leaf(p.sd_s);
    b.two_ln_sd_s = tape.leaf(two_ln);
    b.mu_a = tape.leaf(p.mu_a);
    b.inv_sd_a = tape.leaf(inv_a);
    return b;
}

numkit::Var whiten_state(const BoundParams& b, numkit::Var s) {
    return numkit::mul(numkit::sub(s, b.mu_s), b.inv_sd_s);
}

numkit::Var whiten_action(const BoundParams& b, numkit::Var a) {
    return numkit::mul(numkit::sub(a, b.mu_a), b.inv_sd_a);
}

numkit::Var initial_hidden(const BoundParams& b, numkit::Var s0) {
    using namespace numkit;
    return tanh(add(matmul(whiten_state(b, s0), b.w[SeqVaeParams::Winit]), b.w[SeqVaeParams::Binit]));
}

numkit::Var gru_step(const BoundParams& b, numkit::Var h, numkit::Var x) {
    using namespace numkit;
    using P = SeqVaeParams;
    Var r = sigmoid(add(add(matmul(x, b.w[P::Wxr]), matmul(h, b.w[P::Whr])), b.w[P::Br]));
    Var u = sigmoid(add(add(matmul(x, b.w[P::Wxu]), matmul(h, b.w[P::Whu])), b.w[P::Bu]));
    Var c = tanh(add(add(matmul(x, b.w[P::Wxc]), matmul(mul(r, h), b.w[P::Whc])), b.w[P::Bc]));
    // h' = u*h + (1-u)*c
    return add(mul(u, h), sub(c, mul(u, c)));
}

std::pair<numkit::Var, numkit::Var> encode(const BoundParams& b, numkit::Var h, numkit::Var next_w) {
    using namespace numkit;
    using P = SeqVaeParams;
    Var e = tanh(add(matmul(concat(h, next_w), b.w[P::We1]), b.w[P::Be1]));
    Var mu = add(matmul(e, b.w[P::Wemu]), b.w[P::Bemu]);
    Var lv = clamp(add(matmul(e, b.w[P::Welv]), b.w[P::Belv]), kLogvarLo, kLogvarHi);
    return {mu, lv};
}

numkit::Var reparameterize(numkit::Var mu, numkit::Var logvar, numkit::Var noise) {
    using namespace numkit;
    return add(mu, mul(exp(scale(logvar, 0.5)), noise));
}

DecodeOut decode(const BoundParams& b, numkit::Var h, numkit::Var z, numkit::Var s, numkit::Var a) {
    using namespace numkit;
    using P = SeqVaeParams;
    Var x = concat(concat(whiten_state(b, s), whiten_action(b, a)), z);
    Var h2 = gru_step(b, h, x);
    Var f = tanh(add(matmul(concat(h2, x), b.w[P::Wd1]), b.w[P::Bd1]));
    // whitened residual with a linear skip keeps affine dynamics exactly representable
    Var res_w = add(add(matmul(f, b.w[P::Wdm]), b.w[P::Bdm]), matmul(x, b.w[P::Wskip]));
    Var mean = add(s, mul(res_w, b.sd_s));
    Var lv_w = add(matmul(f, b.w[P::Wdv]), b.w[P::Bdv]);
    Var lv = clamp(add(lv_w, b.two_ln_sd_s), kLogvarLo, kLogvarHi);
    return {mean, lv, h2};
}

namespace {

numkit::NDArray row(const std::vector<double>& v) {
    return numkit::NDArray({1, v.size()}, std::vector<double>(v.begin(), v.end()));
}

std::vector<double> values(const numkit::Tape& t, numkit::Var v) {
    const numkit::NDArray& a = t.value(v);
    return std::vector<double>(a.data(), a.data() + a.size());
}

void require_finite(const std::vector<double>& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument(std::string("seqvae: non-finite ") + what);
}

} // namespace

std::pair<std::vector<double>, std::vector<double>>
encode_step(const SeqVaeParams& p, const std::vector<double>& hidden, const std::vector<double>& next_state) {
    if (hidden.size() != p.arch.H || next_state.size() != p.arch.Ds)
        throw std::invalid_argument("encode_step: dimension mismatch");
    require_finite(hidden, "hidden");
    require_finite(next_state, "next_state");
    numkit::Tape t;
    BoundParams b = bind(t, p);
    auto [mu, lv] = encode(b, t.leaf(row(hidden)), whiten_state(b, t.leaf(row(next_state))));
    return {values(t, mu), values(t, lv)};
}

std::vector<double> reparameterize(const std::vector<double>& mu, const std::vector<double>& logvar,
                                   const std::vector<double>& noise) {
    if (mu.size() != logvar.size() || mu.size() != noise.size())
        throw std::invalid_argument("reparameterize: size mismatch");
    numkit::Tape t;
    numkit::Var z = reparameterize(t.leaf(row(mu)), t.leaf(row(logvar)), t.leaf(row(noise)));
    return values(t, z);
}

DecodeStepOut decode_step(const SeqVaeParams& p, const std::vector<double>& hidden,
                          const std::vector<double>& z, const std::vector<double>& prev_state,
                          const std::vector<double>& action) {
    if (hidden.size() != p.arch.H || z.size() != p.arch.L || prev_state.size() != p.arch.Ds ||
        action.size() != p.arch.Da)
        throw std::invalid_argument("decode_step: dimension mismatch");
    require_finite(hidden, "hidden");
    require_finite(z, "latent");
    require_finite(prev_state, "prev_state");
    require_finite(action, "action");
    numkit::Tape t;
    BoundParams b = bind(t, p);
    DecodeOut out = decode(b, t.leaf(row(hidden)), t.leaf(row(z)), t.leaf(row(prev_state)), t.leaf(row(action)));
    DecodeStepOut r{values(t, out.mean), values(t, out.logvar), values(t, out.hidden)};
    for (double v : r.mean)
        if (!std::isfinite(v)) throw std::runtime_error("decode_step: non-finite predictive mean");
    for (double v : r.hidden)
        if (!std::isfinite(v)) throw std::runtime_error("decode_step: non-finite hidden state");
    return r;
}

std::vector<double> initial_hidden(const SeqVaeParams& p, const std::vector<double>& s0) {
    if (s0.size() != p.arch.Ds) throw std::invalid_argument("initial_hidden: dimension mismatch");
    numkit::Tape t;
    BoundParams b = bind(t, p);
    return values(t, initial_hidden(b, t.leaf(row(s0))));
}

} // namespace seqvae
