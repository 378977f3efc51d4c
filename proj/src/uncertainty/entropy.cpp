#include "uncertainty/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace uncertainty {

double gaussian_entropy_bits(double variance) {
    if (!(variance >= 0.0))
        throw std::invalid_argument("gaussian_entropy_bits: variance must be nonnegative, got " +
                                    std::to_string(variance));
    const double v = std::max(variance, kVarFloor);
    return 0.5 * std::log2(2.0 * 3.14159265358979323846 * 2.718281828459045235 * v);
}

double digamma(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("digamma: x must be positive");
    double r = 0.0;
    while (x < 6.0) { // push the argument into the asymptotic regime
        r -= 1.0 / x;
        x += 1.0;
    }
    const double x2 = 1.0 / (x * x);
    // Stirling-series tail
    return r + std::log(x) - 0.5 / x -
           x2 * (1.0 / 12.0 - x2 * (1.0 / 120.0 - x2 * (1.0 / 252.0 - x2 / 240.0)));
}

double knn_entropy_bits(std::vector<double> samples, std::size_t k) {
    const std::size_t n = samples.size();
    if (k == 0 || n <= k)
        throw std::invalid_argument("knn_entropy_bits: need more than k samples");
    std::sort(samples.begin(), samples.end());

    // 1-D: the k-th nearest neighbor of samples[i] lies within a sorted
    // window of k elements around i; scan the k+1 candidate windows.
    double sum_log = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        const std::size_t lo = i >= k ? i - k : 0;
        const std::size_t hi = std::min(n - 1, i + k);
        // distance to the k-th neighbor = max over the chosen window's ends
        for (std::size_t start = lo; start + k <= hi; ++start) {
            const double left = samples[i] - samples[start];
            const double right = samples[start + k] - samples[i];
            best = std::min(best, std::max(left, right));
        }
        sum_log += std::log(std::max(2.0 * best, 1e-300));
    }
    const double nats = digamma(static_cast<double>(n)) - digamma(static_cast<double>(k)) + sum_log / static_cast<double>(n);
    return nats / std::log(2.0);
}

} // namespace uncertainty
