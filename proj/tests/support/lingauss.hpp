#pragma once

// 2-D linear-Gaussian system s' = A s + B a + w, w ~ N(0, sigma^2 I).
// Closed-form rollout marginals make it an exact oracle for learned-model
// mean tracking and entropy estimates.

#include <cstdint>
#include <vector>

#include "numkit/rng.hpp"
#include "seqvae/trajectory.hpp"

namespace lingauss {

struct System {
    double a11 = 0.70, a12 = 0.10, a21 = -0.05, a22 = 0.65;
    double b1 = 0.50, b2 = 0.20;
    double sigma = 0.15;

    std::vector<double> step_mean(const std::vector<double>& s, double a) const {
        return {a11 * s[0] + a12 * s[1] + b1 * a, a21 * s[0] + a22 * s[1] + b2 * a};
    }

    seqvae::Trajectory sample(const std::vector<double>& s0, const std::vector<double>& actions,
                              numkit::Rng& rng) const {
        seqvae::Trajectory tr;
        tr.mode = "lingauss";
        tr.states.push_back(s0);
        for (double a : actions) {
            std::vector<double> m = step_mean(tr.states.back(), a);
            tr.states.push_back({m[0] + sigma * rng.normal(), m[1] + sigma * rng.normal()});
            tr.actions.push_back({a});
        }
        return tr;
    }

    std::vector<seqvae::Trajectory> make_dataset(std::size_t n, std::size_t T, std::uint64_t seed) const {
        numkit::Rng rng(seed);
        std::vector<seqvae::Trajectory> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> s0{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
            std::vector<double> actions(T);
            for (auto& a : actions) a = rng.uniform(-1.0, 1.0);
            out.push_back(sample(s0, actions, rng));
        }
        return out;
    }

    struct Marginals {
        std::vector<std::vector<double>> mean; // (T+1) x 2
        std::vector<std::vector<double>> var;  // (T+1) x 2, diagonal of the covariance
    };

    // Exact marginals of s_t given (s0, actions): mean follows the noiseless
    // recursion, covariance follows C' = A C A^T + sigma^2 I.
    Marginals marginals(const std::vector<double>& s0, const std::vector<double>& actions) const {
        Marginals m;
        m.mean.push_back(s0);
        m.var.push_back({0.0, 0.0});
        double c11 = 0.0, c12 = 0.0, c22 = 0.0;
        std::vector<double> mu = s0;
        for (double a : actions) {
            mu = step_mean(mu, a);
            const double n11 = a11 * (a11 * c11 + a12 * c12) + a12 * (a11 * c12 + a12 * c22);
            const double n12 = a21 * (a11 * c11 + a12 * c12) + a22 * (a11 * c12 + a12 * c22);
            const double n22 = a21 * (a21 * c11 + a22 * c12) + a22 * (a21 * c12 + a22 * c22);
            c11 = n11 + sigma * sigma;
            c12 = n12;
            c22 = n22 + sigma * sigma;
            m.mean.push_back(mu);
            m.var.push_back({c11, c22});
        }
        return m;
    }
};

} // namespace lingauss
