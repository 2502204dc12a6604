#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hrl/error.hpp"

namespace hrl::nn {

/// Layer widths from input to output. Hidden layers use ReLU, the output
/// layer is linear.
struct MlpSpec {
    std::vector<std::size_t> layer_sizes;

    void validate() const {
        require(layer_sizes.size() >= 2, "an MLP needs at least an input and an output layer");
        for (std::size_t n : layer_sizes) require(n >= 1, "layer sizes must be >= 1");
    }

    std::size_t input_size() const { return layer_sizes.front(); }
    std::size_t output_size() const { return layer_sizes.back(); }
    std::size_t n_dense() const { return layer_sizes.size() - 1; }
};

/// Affine map y = W x + b with W stored row-major (out x in).
struct DenseLayer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weights;
    std::vector<double> bias;

    double& w(std::size_t row, std::size_t col) { return weights[row * in + col]; }
    double w(std::size_t row, std::size_t col) const { return weights[row * in + col]; }
};

struct MlpParams {
    std::vector<DenseLayer> layers;

    static MlpParams zeros(const MlpSpec& spec) {
        spec.validate();
        MlpParams p;
        for (std::size_t l = 0; l < spec.n_dense(); ++l) {
            DenseLayer layer;
            layer.in = spec.layer_sizes[l];
            layer.out = spec.layer_sizes[l + 1];
            layer.weights.assign(layer.in * layer.out, 0.0);
            layer.bias.assign(layer.out, 0.0);
            p.layers.push_back(std::move(layer));
        }
        return p;
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& l : layers) n += l.weights.size() + l.bias.size();
        return n;
    }

    /// Visits every scalar parameter in a fixed order: per layer, weights
    /// then biases.
    template <typename F>
    void for_each(F&& f) {
        for (auto& l : layers) {
            for (double& v : l.weights) f(v);
            for (double& v : l.bias) f(v);
        }
    }

    template <typename F>
    void for_each(F&& f) const {
        for (const auto& l : layers) {
            for (double v : l.weights) f(v);
            for (double v : l.bias) f(v);
        }
    }

    double& flat(std::size_t index) {
        for (auto& l : layers) {
            if (index < l.weights.size()) return l.weights[index];
            index -= l.weights.size();
            if (index < l.bias.size()) return l.bias[index];
            index -= l.bias.size();
        }
        throw LookupError("parameter index out of range");
    }

    bool matches(const MlpSpec& spec) const {
        if (layers.size() != spec.n_dense()) return false;
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const auto& layer = layers[l];
            if (layer.in != spec.layer_sizes[l] || layer.out != spec.layer_sizes[l + 1]) return false;
            if (layer.weights.size() != layer.in * layer.out || layer.bias.size() != layer.out) return false;
        }
        return true;
    }

    bool all_finite() const {
        bool ok = true;
        for_each([&](double v) { ok = ok && std::isfinite(v); });
        return ok;
    }
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases.
inline MlpParams init_params(const MlpSpec& spec, std::uint64_t seed) {
    MlpParams p = MlpParams::zeros(spec);
    std::mt19937_64 rng(seed);
    for (auto& layer : p.layers) {
        double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (double& v : layer.weights) v = dist(rng);
        for (double& v : layer.bias) v = dist(rng);
    }
    return p;
}

/// Per-layer inputs and pre-activations of one forward pass.
struct ForwardTrace {
    std::vector<std::vector<double>> inputs;
    std::vector<std::vector<double>> preacts;
    std::vector<double> output;
};

namespace detail {

inline void check_shapes(const MlpParams& params, const MlpSpec& spec, std::size_t input_len) {
    spec.validate();
    if (!params.matches(spec)) throw InvalidArgument("parameters do not match the network shape");
    if (input_len != spec.input_size())
        throw InvalidArgument("input has " + std::to_string(input_len) + " entries, network expects " +
                              std::to_string(spec.input_size()));
}

} // namespace detail

namespace detail {

inline void dense_forward(const DenseLayer& layer, const double* in, double* z) {
    for (std::size_t r = 0; r < layer.out; ++r) {
        const double* wr = &layer.weights[r * layer.in];
        double acc = 0.0;
        for (std::size_t c = 0; c < layer.in; ++c) acc += wr[c] * in[c];
        z[r] = layer.bias[r] + acc;
    }
}

} // namespace detail

/// Fills `trace` in place, reusing its buffers across calls.
inline void forward_trace_into(const MlpParams& params, const MlpSpec& spec, std::span<const double> x,
                               ForwardTrace& trace) {
    detail::check_shapes(params, spec, x.size());
    const std::size_t n = params.layers.size();
    trace.inputs.resize(n);
    trace.preacts.resize(n);
    trace.inputs[0].assign(x.begin(), x.end());
    for (std::size_t l = 0; l < n; ++l) {
        const auto& layer = params.layers[l];
        auto& z = trace.preacts[l];
        z.resize(layer.out);
        detail::dense_forward(layer, trace.inputs[l].data(), z.data());
        auto& next = l + 1 < n ? trace.inputs[l + 1] : trace.output;
        next.resize(layer.out);
        const bool hidden = l + 1 < n;
        for (std::size_t r = 0; r < layer.out; ++r) next[r] = hidden && z[r] <= 0.0 ? 0.0 : z[r];
    }
}

inline ForwardTrace forward_trace(const MlpParams& params, const MlpSpec& spec, std::span<const double> x) {
    ForwardTrace trace;
    forward_trace_into(params, spec, x, trace);
    return trace;
}

inline std::vector<double> forward(const MlpParams& params, const MlpSpec& spec, std::span<const double> x) {
    return forward_trace(params, spec, x).output;
}

/// Gradients for the input recorded in `trace` (from forward_trace_into)
/// written into `grads`, which must already have the network's shape.
inline void backward_into(const MlpParams& params, const ForwardTrace& trace, std::span<const double> grad_out,
                          MlpParams& grads, std::vector<double>& delta, std::vector<double>& upstream) {
    const std::size_t n = params.layers.size();
    if (trace.preacts.size() != n) throw InvalidArgument("trace does not match the network");
    if (grad_out.size() != params.layers.back().out) throw InvalidArgument("output gradient has the wrong length");
    delta.assign(grad_out.begin(), grad_out.end());
    for (std::size_t l = n; l-- > 0;) {
        const auto& layer = params.layers[l];
        auto& g = grads.layers[l];
        if (l + 1 < n) {
            const auto& z = trace.preacts[l];
            for (std::size_t r = 0; r < layer.out; ++r)
                if (z[r] <= 0.0) delta[r] = 0.0;
        }
        const double* input = trace.inputs[l].data();
        for (std::size_t r = 0; r < layer.out; ++r) {
            g.bias[r] = delta[r];
            double* gw = &g.weights[r * layer.in];
            const double d = delta[r];
            for (std::size_t c = 0; c < layer.in; ++c) gw[c] = d * input[c];
        }
        if (l == 0) break;
        upstream.assign(layer.in, 0.0);
        for (std::size_t r = 0; r < layer.out; ++r) {
            if (delta[r] == 0.0) continue;
            const double* wr = &layer.weights[r * layer.in];
            const double d = delta[r];
            for (std::size_t c = 0; c < layer.in; ++c) upstream[c] += wr[c] * d;
        }
        delta.swap(upstream);
    }
}

/// Parameter gradients of a scalar loss whose gradient w.r.t. the network
/// output is `grad_out`.
inline MlpParams backward(const MlpParams& params, const MlpSpec& spec, std::span<const double> x,
                          std::span<const double> grad_out) {
    ForwardTrace trace = forward_trace(params, spec, x);
    if (grad_out.size() != spec.output_size()) throw InvalidArgument("output gradient has the wrong length");
    MlpParams grads = MlpParams::zeros(spec);
    std::vector<double> delta, upstream;
    backward_into(params, trace, grad_out, grads, delta, upstream);
    return grads;
}

struct LossAndGradient {
    double loss = 0.0;
    std::vector<double> gradient;
};

inline LossAndGradient mse(std::span<const double> pred, std::span<const double> target) {
    if (pred.size() != target.size()) throw InvalidArgument("mse: length mismatch");
    if (pred.empty()) throw InvalidArgument("mse: empty input");
    LossAndGradient out;
    out.gradient.resize(pred.size());
    double n = static_cast<double>(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        double d = pred[i] - target[i];
        out.loss += d * d;
        out.gradient[i] = 2.0 * d / n;
    }
    out.loss /= n;
    return out;
}

} // namespace hrl::nn
