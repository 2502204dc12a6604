#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "hrl/nn/mlp.hpp"

namespace hrl::nn {

/// |a - n| / max(|a|, |n|, floor). The floor keeps gradients that are zero up
/// to round-off from reporting huge relative errors.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
    double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
    return std::abs(analytic - numeric) / denom;
}

namespace detail {

inline std::vector<bool> relu_pattern(const MlpParams& params, const MlpSpec& spec, std::span<const double> x) {
    ForwardTrace trace = forward_trace(params, spec, x);
    std::vector<bool> pattern;
    for (std::size_t l = 0; l + 1 < trace.preacts.size(); ++l)
        for (double z : trace.preacts[l]) pattern.push_back(z > 0.0);
    return pattern;
}

} // namespace detail

struct NumericGradient {
    MlpParams gradient;
    /// Parameters whose +-h probes crossed a ReLU kink; their entries are
    /// left at zero and must not be compared.
    std::vector<bool> skipped;
};

/// Central-difference gradient of mse(forward(x), target) w.r.t. every
/// parameter. Uses only forward evaluation.
inline NumericGradient numeric_gradient(MlpParams params, const MlpSpec& spec, std::span<const double> x,
                                        std::span<const double> target, double h = 1e-5) {
    NumericGradient out{MlpParams::zeros(spec), std::vector<bool>(params.parameter_count(), false)};
    auto base_pattern = detail::relu_pattern(params, spec, x);
    for (std::size_t i = 0; i < params.parameter_count(); ++i) {
        double& p = params.flat(i);
        const double saved = p;
        p = saved + h;
        double plus = mse(forward(params, spec, x), target).loss;
        bool kink = detail::relu_pattern(params, spec, x) != base_pattern;
        p = saved - h;
        double minus = mse(forward(params, spec, x), target).loss;
        kink = kink || detail::relu_pattern(params, spec, x) != base_pattern;
        p = saved;
        if (kink) {
            out.skipped[i] = true;
            continue;
        }
        out.gradient.flat(i) = (plus - minus) / (2.0 * h);
    }
    return out;
}

inline double max_relative_error(const MlpParams& analytic, const NumericGradient& numeric, double floor = 1e-6) {
    MlpParams a = analytic;
    MlpParams n = numeric.gradient;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.parameter_count(); ++i) {
        if (numeric.skipped[i]) continue;
        worst = std::max(worst, relative_error(a.flat(i), n.flat(i), floor));
    }
    return worst;
}

struct GradientCheckReport {
    double max_rel_error = 0.0;
    std::size_t checked = 0;
    std::size_t skipped_kinks = 0;
    bool passed = false;
};

/// Compares backward() against central differences for an MSE loss on a
/// random input/target pair drawn from `seed`.
inline GradientCheckReport gradient_check(const MlpSpec& spec, std::uint64_t seed, double tolerance,
                                          double h = 1e-5) {
    spec.validate();
    MlpParams params = init_params(spec, seed);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> x(spec.input_size());
    std::vector<double> target(spec.output_size());
    for (double& v : x) v = normal(rng);
    for (double& v : target) v = normal(rng);

    auto pred = forward(params, spec, x);
    auto loss = mse(pred, target);
    MlpParams analytic = backward(params, spec, x, loss.gradient);
    NumericGradient numeric = numeric_gradient(params, spec, x, target, h);

    GradientCheckReport report;
    report.max_rel_error = max_relative_error(analytic, numeric);
    report.skipped_kinks = static_cast<std::size_t>(std::count(numeric.skipped.begin(), numeric.skipped.end(), true));
    report.checked = params.parameter_count() - report.skipped_kinks;
    report.passed = report.max_rel_error < tolerance;
    return report;
}

} // namespace hrl::nn
