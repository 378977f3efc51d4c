#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace numkit {

/// Deterministic stream of doubles with explicit seeding. Normal draws use
/// std::normal_distribution over mt19937_64; identical seeds give identical
/// sequences on a fixed platform/stdlib, which is all the reproducibility
/// contract here requires.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) {
        std::uniform_real_distribution<double> d(lo, hi);
        return d(gen_);
    }

    double normal(double mean = 0.0, double stddev = 1.0) {
        std::normal_distribution<double> d(mean, stddev);
        return d(gen_);
    }

    /// Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
        return d(gen_);
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        std::shuffle(items.begin(), items.end(), gen_);
    }

    std::mt19937_64& engine() { return gen_; }

  private:
    std::mt19937_64 gen_;
};

/// Stable seed derivation: hashes (root, purpose, index) so that distinct
/// purposes ("member", "rollout", "episode", ...) own disjoint streams and
/// adding a consumer never shifts another consumer's draws.
std::uint64_t derive_seed(std::uint64_t root, const std::string& purpose, std::uint64_t index);

} // namespace numkit
