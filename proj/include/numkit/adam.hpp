#pragma once

#include <cstdint>
#include <vector>

#include "numkit/ndarray.hpp"

namespace numkit {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// First/second moment accumulators mirroring the parameter shapes.
/// The step counter advances exactly once per adam_step call.
struct AdamState {
    AdamConfig cfg;
    std::vector<NDArray> m;
    std::vector<NDArray> v;
    std::uint64_t step = 0;
    std::uint64_t rejected = 0; // arrays skipped due to non-finite gradients

    static AdamState init(const std::vector<NDArray>& params, AdamConfig cfg);
};

/// One bias-corrected Adam update. An array whose gradient contains a
/// non-finite value is left untouched (moments included) and counted in
/// state.rejected; the step counter still advances.
void adam_step(std::vector<NDArray>& params, const std::vector<NDArray>& grads, AdamState& state);

} // namespace numkit
