#include "uncertainty/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "numkit/hash.hpp"

namespace uncertainty {

namespace {

// Total/aleatoric disagree by more than sampling noise can explain below
// this; anything in (kClampFloor, 0) is treated as noise and clamped.
constexpr double kClampFloor = -0.02;

struct BatchView {
    const std::vector<seqvae::RolloutBatch>* batches;
    std::size_t M, T, Ds, K;
    std::vector<std::vector<std::size_t>> usable; // per member, sample indices
};

BatchView check(const std::vector<seqvae::RolloutBatch>& batches) {
    if (batches.empty()) throw std::invalid_argument("uncertainty: no rollout batches");
    BatchView v;
    v.batches = &batches;
    v.M = batches.size();
    v.T = batches[0].T;
    v.Ds = batches[0].Ds;
    v.K = batches[0].K;
    for (const auto& b : batches) {
        if (b.T != v.T || b.Ds != v.Ds || b.K != v.K)
            throw std::invalid_argument("uncertainty: rollout batches disagree on K/T/Ds");
        if (b.s0 != batches[0].s0 || b.actions != batches[0].actions)
            throw std::invalid_argument("uncertainty: rollout batches disagree on conditioning");
    }
    v.usable.resize(v.M);
    for (std::size_t m = 0; m < v.M; ++m) {
        for (std::size_t k = 0; k < v.K; ++k)
            if (!batches[m].is_excluded(k)) v.usable[m].push_back(k);
        if (v.usable[m].size() < 2)
            throw std::invalid_argument("uncertainty: member " + std::to_string(m) +
                                        " has fewer than 2 usable samples");
    }
    return v;
}

std::vector<std::string> make_labels(std::size_t Ds, const std::vector<std::string>& given) {
    if (!given.empty()) {
        if (given.size() != Ds) throw std::invalid_argument("uncertainty: label count != state dim");
        return given;
    }
    std::vector<std::string> out;
    for (std::size_t d = 0; d < Ds; ++d) out.push_back("dim" + std::to_string(d));
    return out;
}

// Unbiased sample variance in a fixed iteration order, two-pass for
// numerical stability. `members` selects which groups pool together.
double cell_variance(const BatchView& v, const std::vector<std::size_t>& members, std::size_t t,
                     std::size_t d) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t m : members)
        for (std::size_t k : v.usable[m]) {
            sum += (*v.batches)[m].at(k, t, d);
            ++n;
        }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t m : members)
        for (std::size_t k : v.usable[m]) {
            const double dev = (*v.batches)[m].at(k, t, d) - mean;
            ss += dev * dev;
        }
    return ss / static_cast<double>(n - 1);
}

double cell_entropy(const BatchView& v, const std::vector<std::size_t>& members, std::size_t t,
                    std::size_t d, Estimator est) {
    if (est == Estimator::Gaussian) return gaussian_entropy_bits(cell_variance(v, members, t, d));
    std::vector<double> samples;
    for (std::size_t m : members)
        for (std::size_t k : v.usable[m]) samples.push_back((*v.batches)[m].at(k, t, d));
    return knn_entropy_bits(std::move(samples));
}

EntropyCurve empty_curve(const BatchView& v, std::vector<std::string> labels) {
    EntropyCurve c;
    c.T = v.T;
    c.Ds = v.Ds;
    c.labels = std::move(labels);
    c.values.assign(v.T * v.Ds, 0.0);
    return c;
}

std::uint64_t conditioning_hash(const seqvae::RolloutBatch& b) {
    numkit::Fnv1a64 h;
    h.update(static_cast<std::uint64_t>(b.T));
    h.update(static_cast<std::uint64_t>(b.Ds));
    for (double x : b.s0) h.update(x);
    for (const auto& a : b.actions)
        for (double x : a) h.update(x);
    return h.digest();
}

} // namespace

EntropyCurve member_entropy(const std::vector<seqvae::RolloutBatch>& batches,
                            const std::vector<std::string>& labels, Estimator est) {
    BatchView v = check(batches);
    EntropyCurve c = empty_curve(v, make_labels(v.Ds, labels));
    for (std::size_t t = 0; t < v.T; ++t)
        for (std::size_t d = 0; d < v.Ds; ++d) {
            double acc = 0.0;
            for (std::size_t m = 0; m < v.M; ++m) acc += cell_entropy(v, {m}, t + 1, d, est);
            c.at(t, d) = acc / static_cast<double>(v.M);
        }
    return c;
}

EntropyCurve total_entropy(const std::vector<seqvae::RolloutBatch>& batches,
                           const std::vector<std::string>& labels, Estimator est) {
    BatchView v = check(batches);
    std::vector<std::size_t> all(v.M);
    for (std::size_t m = 0; m < v.M; ++m) all[m] = m;
    EntropyCurve c = empty_curve(v, make_labels(v.Ds, labels));
    for (std::size_t t = 0; t < v.T; ++t)
        for (std::size_t d = 0; d < v.Ds; ++d) c.at(t, d) = cell_entropy(v, all, t + 1, d, est);
    return c;
}

UncertaintyReport decompose(const std::vector<seqvae::RolloutBatch>& batches,
                            const std::vector<std::string>& labels, Estimator est,
                            std::uint64_t manifest_hash) {
    UncertaintyReport r;
    r.total = total_entropy(batches, labels, est);
    r.aleatoric = member_entropy(batches, labels, est);
    r.epistemic = r.total;
    BatchView v = check(batches);

    for (std::size_t i = 0; i < r.total.values.size(); ++i) {
        double epi = r.total.values[i] - r.aleatoric.values[i];
        if (epi < kClampFloor)
            throw std::runtime_error(
                "decompose: epistemic " + std::to_string(epi) +
                " bits below the sampling-noise floor; estimates are inconsistent");
        if (epi < 0.0) {
            // noise-level negative: pin the cell to zero, keep additivity exact
            r.aleatoric.values[i] = r.total.values[i];
            epi = 0.0;
            r.provenance.clamped_cells += 1;
        }
        r.epistemic.values[i] = epi;
    }

    r.provenance.manifest_hash = manifest_hash;
    r.provenance.conditioning_hash = conditioning_hash(batches[0]);
    r.provenance.m_members = v.M;
    r.provenance.k_per_member = v.K;
    for (std::size_t m = 0; m < v.M; ++m) r.provenance.excluded += v.K - v.usable[m].size();
    r.provenance.estimator = est == Estimator::Gaussian ? "gaussian" : "knn";
    return r;
}

AggregateSummary aggregate(const UncertaintyReport& report, const std::vector<std::string>& dims) {
    if (dims.empty()) throw std::invalid_argument("aggregate: empty dimension selection");
    std::vector<std::size_t> sel;
    for (const std::string& name : dims) {
        auto it = std::find(report.total.labels.begin(), report.total.labels.end(), name);
        if (it == report.total.labels.end())
            throw std::invalid_argument("aggregate: unknown dimension label '" + name + "'");
        sel.push_back(static_cast<std::size_t>(it - report.total.labels.begin()));
    }
    double tot = 0.0, alea = 0.0;
    for (std::size_t t = 0; t < report.total.T; ++t)
        for (std::size_t d : sel) {
            tot += report.total.at(t, d);
            alea += report.aleatoric.at(t, d);
        }
    const double n = static_cast<double>(report.total.T * sel.size());
    AggregateSummary s;
    s.total_bits = tot / n;
    s.aleatoric_bits = alea / n;
    s.epistemic_bits = s.total_bits - s.aleatoric_bits;
    return s;
}

std::string to_csv(const UncertaintyReport& report) {
    std::string out = "t,dimension_label,total_bits,aleatoric_bits,epistemic_bits\n";
    char buf[128];
    for (std::size_t t = 0; t < report.total.T; ++t)
        for (std::size_t d = 0; d < report.total.Ds; ++d) {
            std::snprintf(buf, sizeof(buf), "%zu,%s,%.17g,%.17g,%.17g\n", t + 1,
                          report.total.labels[d].c_str(), report.total.at(t, d),
                          report.aleatoric.at(t, d), report.epistemic.at(t, d));
            out += buf;
        }
    return out;
}

} // namespace uncertainty
