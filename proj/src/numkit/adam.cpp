#include "numkit/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace numkit {

AdamState AdamState::init(const std::vector<NDArray>& params, AdamConfig cfg) {
    if (!(cfg.lr > 0.0)) throw std::invalid_argument("adam: lr must be positive");
    if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0)) throw std::invalid_argument("adam: beta1 must lie in [0,1)");
    if (!(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) throw std::invalid_argument("adam: beta2 must lie in [0,1)");
    if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("adam: epsilon must be positive");
    AdamState st;
    st.cfg = cfg;
    st.m.reserve(params.size());
    st.v.reserve(params.size());
    for (const NDArray& p : params) {
        st.m.emplace_back(p.shape());
        st.v.emplace_back(p.shape());
    }
    return st;
}

void adam_step(std::vector<NDArray>& params, const std::vector<NDArray>& grads, AdamState& state) {
    if (params.size() != grads.size())
        throw std::invalid_argument("adam_step: " + std::to_string(params.size()) + " params vs " +
                                    std::to_string(grads.size()) + " grads");
    if (params.size() != state.m.size())
        throw std::invalid_argument("adam_step: state built for " + std::to_string(state.m.size()) +
                                    " arrays, given " + std::to_string(params.size()));

    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(state.cfg.beta1, t);
    const double c2 = 1.0 - std::pow(state.cfg.beta2, t);

    for (std::size_t k = 0; k < params.size(); ++k) {
        NDArray& p = params[k];
        const NDArray& g = grads[k];
        if (!p.same_shape(g))
            throw std::invalid_argument("adam_step: param/grad shape mismatch at array " + std::to_string(k) +
                                        ": " + shape_str(p.shape()) + " vs " + shape_str(g.shape()));
        if (!g.all_finite()) {
            state.rejected += 1;
            continue;
        }
        NDArray& m = state.m[k];
        NDArray& v = state.v[k];
        const double b1 = state.cfg.beta1;
        const double b2 = state.cfg.beta2;
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            const double mhat = m[i] / c1;
            const double vhat = v[i] / c2;
            p[i] -= state.cfg.lr * mhat / (std::sqrt(vhat) + state.cfg.epsilon);
        }
    }
}

} // namespace numkit
