#include "pusherenv/dataset.hpp"

#include <cstdio>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include "uqio/fileio.hpp"

namespace pusherenv {
namespace {

constexpr char kMagic[8] = {'p', 'u', 's', 'h', 'd', 's', '0', '1'};
constexpr double kRandomEpisodeFraction = 0.2;

void put_u64(std::string& out, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.append(buf, 8);
}

void put_f64(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;

    std::uint64_t u64() {
        if (pos + 8 > buf.size()) throw std::runtime_error("dataset file truncated");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }

    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
};

} // namespace

Dataset generate_dataset(const EnvConfig& cfg, std::size_t n, std::size_t T, std::uint64_t seed) {
    cfg.validate();
    if (n == 0) throw std::invalid_argument("generate_dataset: n must be >= 1");
    if (T == 0) throw std::invalid_argument("generate_dataset: T must be >= 1");

    Dataset ds;
    ds.meta.env = cfg;
    ds.meta.n = n;
    ds.meta.T = T;
    ds.meta.seed = seed;
    ds.trajectories.reserve(n);

    for (std::size_t e = 0; e < n; ++e) {
        numkit::Rng rng(numkit::derive_seed(seed, "episode", e));
        EnvState s = sample_initial(cfg.mode, rng);
        const bool random_actions = rng.uniform(0.0, 1.0) < kRandomEpisodeFraction;

        seqvae::Trajectory tr;
        tr.mode = mode_name(cfg.mode);
        tr.states.reserve(T + 1);
        tr.actions.reserve(T);
        tr.states.push_back(s.to_vector());
        for (std::size_t t = 0; t < T; ++t) {
            std::array<double, 2> a;
            if (random_actions) {
                a = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
            } else {
                a = scripted_policy(s, cfg);
            }
            s = step(s, a, cfg, rng);
            tr.actions.push_back({a[0], a[1]});
            tr.states.push_back(s.to_vector());
        }
        seqvae::validate(tr);
        ds.trajectories.push_back(std::move(tr));
    }

    ds.content_hash = seqvae::fingerprint(ds.trajectories);
    return ds;
}

void save_dataset(const std::string& path, const Dataset& ds) {
    if (ds.trajectories.size() != ds.meta.n) throw std::invalid_argument("save_dataset: meta.n mismatch");
    std::string out;
    out.reserve(64 + ds.meta.n * (ds.meta.T + 1) * kStateDim * 8);
    out.append(kMagic, 8);
    put_u64(out, ds.meta.n);
    put_u64(out, ds.meta.T);
    put_u64(out, kStateDim);
    put_u64(out, kActionDim);
    put_u64(out, ds.meta.seed);
    put_u64(out, ds.meta.config_hash);
    put_u64(out, static_cast<std::uint64_t>(ds.meta.env.mode));
    put_f64(out, ds.meta.env.dt);
    put_f64(out, ds.meta.env.l1);
    put_f64(out, ds.meta.env.l2);
    put_f64(out, ds.meta.env.fingertip_radius);
    put_f64(out, ds.meta.env.ball_radius);
    put_f64(out, ds.meta.env.drag);
    put_f64(out, ds.meta.env.sigma_a);
    put_u64(out, ds.content_hash);

    for (const auto& tr : ds.trajectories) {
        if (tr.horizon() != ds.meta.T || tr.state_dim() != kStateDim || tr.action_dim() != kActionDim)
            throw std::invalid_argument("save_dataset: trajectory shape does not match meta");
        for (const auto& row : tr.states)
            for (double v : row) put_f64(out, v);
        for (const auto& row : tr.actions)
            for (double v : row) put_f64(out, v);
    }
    uqio::write_file_atomic(path, out);
}

Dataset load_dataset(const std::string& path) {
    const std::string buf = uqio::read_file_text(path);
    if (buf.size() < 8 || std::memcmp(buf.data(), kMagic, 8) != 0)
        throw std::runtime_error("not a pusher dataset file: " + path);
    Reader r{buf, 8};

    Dataset ds;
    ds.meta.n = r.u64();
    ds.meta.T = r.u64();
    const std::uint64_t dss = r.u64();
    const std::uint64_t das = r.u64();
    if (dss != kStateDim || das != kActionDim)
        throw std::runtime_error("dataset dims do not match this build");
    ds.meta.seed = r.u64();
    ds.meta.config_hash = r.u64();
    const std::uint64_t mode_tag = r.u64();
    if (mode_tag > 2) throw std::runtime_error("dataset mode tag out of range");
    ds.meta.env.mode = static_cast<Mode>(mode_tag);
    ds.meta.env.dt = r.f64();
    ds.meta.env.l1 = r.f64();
    ds.meta.env.l2 = r.f64();
    ds.meta.env.fingertip_radius = r.f64();
    ds.meta.env.ball_radius = r.f64();
    ds.meta.env.drag = r.f64();
    ds.meta.env.sigma_a = r.f64();
    const std::uint64_t stored_hash = r.u64();
    ds.meta.env.validate();

    ds.trajectories.reserve(ds.meta.n);
    for (std::size_t e = 0; e < ds.meta.n; ++e) {
        seqvae::Trajectory tr;
        tr.mode = mode_name(ds.meta.env.mode);
        tr.states.assign(ds.meta.T + 1, std::vector<double>(kStateDim));
        tr.actions.assign(ds.meta.T, std::vector<double>(kActionDim));
        for (auto& row : tr.states)
            for (double& v : row) v = r.f64();
        for (auto& row : tr.actions)
            for (double& v : row) v = r.f64();
        ds.trajectories.push_back(std::move(tr));
    }
    if (r.pos != buf.size()) throw std::runtime_error("dataset file has trailing bytes");

    ds.content_hash = seqvae::fingerprint(ds.trajectories);
    if (ds.content_hash != stored_hash)
        throw std::runtime_error("dataset content hash mismatch (corrupt file?)");
    return ds;
}

std::string trajectory_csv(const seqvae::Trajectory& tr) {
    std::ostringstream ss;
    ss << "t";
    for (const auto& name : state_labels()) ss << "," << name;
    for (std::size_t d = 0; d < kActionDim; ++d) ss << ",action_" << d;
    ss << "\n";
    char num[40];
    for (std::size_t t = 0; t < tr.states.size(); ++t) {
        ss << t;
        for (double v : tr.states[t]) {
            std::snprintf(num, sizeof num, "%.17g", v);
            ss << "," << num;
        }
        if (t < tr.actions.size()) {
            for (double v : tr.actions[t]) {
                std::snprintf(num, sizeof num, "%.17g", v);
                ss << "," << num;
            }
        } else {
            for (std::size_t d = 0; d < kActionDim; ++d) ss << ",";
        }
        ss << "\n";
    }
    return ss.str();
}

} // namespace pusherenv
