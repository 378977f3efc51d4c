#pragma once

#include <cstddef>
#include <vector>

namespace uncertainty {

/// Variance floor keeping point masses at a finite (very negative) entropy.
constexpr double kVarFloor = 1e-12;

/// Differential entropy of N(mu, variance) in bits:
/// 0.5*log2(2*pi*e*max(variance, kVarFloor)). Rejects negative variance.
double gaussian_entropy_bits(double variance);

/// Kozachenko-Leonenko k-nearest-neighbor estimate for 1-D samples, in
/// bits. Alternate estimator validated against the Gaussian closed form;
/// needs n > k. Not differentiable, estimation only.
double knn_entropy_bits(std::vector<double> samples, std::size_t k = 3);

/// Digamma via upward recurrence + asymptotic tail (needed by the kNN
/// estimator's bias correction).
double digamma(double x);

enum class Estimator { Gaussian, Knn };

} // namespace uncertainty
