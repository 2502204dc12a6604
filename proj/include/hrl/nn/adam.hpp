#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "hrl/error.hpp"
#include "hrl/nn/mlp.hpp"

namespace hrl::nn {

struct AdamState {
    MlpParams m;
    MlpParams v;
    std::size_t step = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState for_spec(const MlpSpec& spec, double lr = 1e-3) {
        AdamState s;
        s.m = MlpParams::zeros(spec);
        s.v = MlpParams::zeros(spec);
        s.lr = lr;
        return s;
    }
};

/// Bias-corrected Adam update, in place.
inline void adam_step(AdamState& state, MlpParams& params, const MlpParams& grads) {
    std::size_t n = params.parameter_count();
    if (grads.parameter_count() != n || state.m.parameter_count() != n || state.v.parameter_count() != n)
        throw InvalidArgument("adam: parameter, gradient and moment shapes disagree");
    if (!grads.all_finite()) throw InvalidArgument("adam: non-finite gradient");

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);

    const double b1 = state.beta1, b2 = state.beta2, lr = state.lr, eps = state.eps;
    const double inv_c1 = 1.0 / c1, inv_c2 = 1.0 / c2;
    const double tiny = std::numeric_limits<double>::min();
    auto update = [=](std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                      std::vector<double>& v) {
        double* __restrict pp = p.data();
        const double* __restrict gp = g.data();
        double* __restrict mp = m.data();
        double* __restrict vp = v.data();
        const std::size_t n = p.size();
        for (std::size_t i = 0; i < n; ++i) {
            double mi = b1 * mp[i] + (1.0 - b1) * gp[i];
            double vi = b2 * vp[i] + (1.0 - b2) * gp[i] * gp[i];
            // Moments of parameters that stop receiving gradient decay into
            // subnormals, which are very slow on most CPUs.
            mp[i] = std::fabs(mi) < tiny ? 0.0 : mi;
            vp[i] = vi < tiny ? 0.0 : vi;
            pp[i] -= lr * (mp[i] * inv_c1) / (std::sqrt(vp[i] * inv_c2) + eps);
        }
    };
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        auto& pl = params.layers[l];
        const auto& gl = grads.layers[l];
        update(pl.weights, gl.weights, state.m.layers[l].weights, state.v.layers[l].weights);
        update(pl.bias, gl.bias, state.m.layers[l].bias, state.v.layers[l].bias);
    }
}

} // namespace hrl::nn
