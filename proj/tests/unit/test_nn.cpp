#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "hrl/nn/adam.hpp"
#include "hrl/nn/checkpoint.hpp"
#include "hrl/nn/gradient_check.hpp"
#include "hrl/nn/mlp.hpp"

using namespace hrl;
using namespace hrl::nn;

namespace {

// [2, 2, 1] with hand-picked weights; see HandNetwork tests for the values.
struct HandNet {
    MlpSpec spec{{2, 2, 1}};
    MlpParams params = MlpParams::zeros(spec);
    HandNet() {
        auto& l0 = params.layers[0];
        l0.w(0, 0) = 1.0;
        l0.w(0, 1) = -1.0;
        l0.w(1, 0) = 0.5;
        l0.w(1, 1) = 2.0;
        l0.bias = {0.0, -3.0};
        auto& l1 = params.layers[1];
        l1.w(0, 0) = 2.0;
        l1.w(0, 1) = -1.0;
        l1.bias = {0.5};
    }
};

} // namespace

TEST(Mlp, HandNetworkForward) {
    HandNet n;
    std::vector<double> x{1.0, 2.0};
    // hidden z = [-1, 1.5] -> relu [0, 1.5]; out = -1.5 + 0.5
    EXPECT_DOUBLE_EQ(forward(n.params, n.spec, x)[0], -1.0);
}

TEST(Mlp, HandNetworkBackward) {
    HandNet n;
    std::vector<double> x{1.0, 2.0}, target{0.0};
    auto loss = mse(forward(n.params, n.spec, x), target);
    EXPECT_DOUBLE_EQ(loss.loss, 1.0);
    EXPECT_DOUBLE_EQ(loss.gradient[0], -2.0);
    MlpParams g = backward(n.params, n.spec, x, loss.gradient);
    EXPECT_EQ(g.layers[1].weights, (std::vector<double>{0.0, -3.0}));
    EXPECT_EQ(g.layers[1].bias, (std::vector<double>{-2.0}));
    EXPECT_EQ(g.layers[0].weights, (std::vector<double>{0.0, 0.0, 2.0, 4.0}));
    EXPECT_EQ(g.layers[0].bias, (std::vector<double>{0.0, 2.0}));
}

TEST(Mlp, RejectsWrongInputLength) {
    HandNet n;
    std::vector<double> x{1.0};
    EXPECT_THROW(forward(n.params, n.spec, x), InvalidArgument);
    EXPECT_THROW(MlpSpec{{3}}.validate(), InvalidArgument);
}

TEST(Mlp, IntoVariantsMatchAllocatingOnes) {
    MlpSpec spec{{5, 8, 4, 3}};
    MlpParams p = init_params(spec, 9);
    std::vector<double> x{0.3, -1.0, 2.0, 0.1, -0.4}, g{1.0, -0.5, 0.25};
    ForwardTrace trace;
    forward_trace_into(p, spec, x, trace);
    EXPECT_EQ(trace.output, forward(p, spec, x));
    MlpParams grads = MlpParams::zeros(spec);
    std::vector<double> delta, up;
    backward_into(p, trace, g, grads, delta, up);
    MlpParams ref = backward(p, spec, x, g);
    for (std::size_t i = 0; i < ref.parameter_count(); ++i) EXPECT_EQ(grads.flat(i), ref.flat(i));
}

TEST(GradientCheck, DqnShapedNetwork) {
    const std::size_t n = 6;
    MlpSpec spec{{3 * n + 6, 32, 64, 64, 3}};
    auto report = gradient_check(spec, 7, 1e-4, 1e-5);
    EXPECT_LT(report.max_rel_error, 1e-4);
    EXPECT_GT(report.checked, report.skipped_kinks);
    EXPECT_TRUE(report.passed);
}

TEST(GradientCheck, DetectsCorruptedGradient) {
    HandNet n;
    std::vector<double> x{1.0, 2.0}, target{0.0};
    auto loss = mse(forward(n.params, n.spec, x), target);
    MlpParams g = backward(n.params, n.spec, x, loss.gradient);
    g.layers[0].weights[3] *= 1.01;
    auto numeric = numeric_gradient(n.params, n.spec, x, target);
    EXPECT_GT(max_relative_error(g, numeric), 1e-3);
}

TEST(GradientCheck, RelativeErrorFloor) {
    EXPECT_DOUBLE_EQ(relative_error(2.0, 1.0), 0.5);
    EXPECT_DOUBLE_EQ(relative_error(1e-9, 0.0), 1e-3);
}

TEST(Adam, FirstStepMovesByLearningRate) {
    MlpSpec spec{{1, 1}};
    MlpParams p = MlpParams::zeros(spec);
    MlpParams g = MlpParams::zeros(spec);
    g.layers[0].weights[0] = 0.5;
    g.layers[0].bias[0] = -2.0;
    AdamState s = AdamState::for_spec(spec, 1e-3);
    adam_step(s, p, g);
    // Bias correction makes m_hat = g and v_hat = g^2 on step one.
    EXPECT_NEAR(p.layers[0].weights[0], -1e-3 * 0.5 / (0.5 + 1e-8), 1e-18);
    EXPECT_NEAR(p.layers[0].bias[0], 1e-3 * 2.0 / (2.0 + 1e-8), 1e-18);
    EXPECT_EQ(s.step, 1u);
}

TEST(Adam, SecondStepMatchesClosedForm) {
    MlpSpec spec{{1, 1}};
    MlpParams p = MlpParams::zeros(spec);
    MlpParams g = MlpParams::zeros(spec);
    AdamState s = AdamState::for_spec(spec, 0.01);
    g.layers[0].weights[0] = 1.0;
    adam_step(s, p, g);
    g.layers[0].weights[0] = 3.0;
    adam_step(s, p, g);
    double m = 0.9 * 0.1 + 0.1 * 3.0, v = 0.999 * 0.001 + 0.001 * 9.0;
    double mh = m / (1 - 0.81), vh = v / (1 - 0.999 * 0.999);
    double expected = -0.01 * 1.0 / (1.0 + 1e-8) - 0.01 * mh / (std::sqrt(vh) + 1e-8);
    EXPECT_NEAR(p.layers[0].weights[0], expected, 1e-15);
}

TEST(Adam, RejectsNonFiniteGradient) {
    MlpSpec spec{{1, 1}};
    MlpParams p = MlpParams::zeros(spec), g = MlpParams::zeros(spec);
    g.layers[0].bias[0] = INFINITY;
    AdamState s = AdamState::for_spec(spec);
    EXPECT_THROW(adam_step(s, p, g), InvalidArgument);
}

TEST(Checkpoint, RoundTripIsBitExact) {
    MlpSpec spec{{4, 6, 3}};
    MlpParams p = init_params(spec, 3);
    std::stringstream ss;
    write_checkpoint(ss, spec, p);
    Checkpoint cp = read_checkpoint(ss);
    EXPECT_EQ(cp.spec.layer_sizes, spec.layer_sizes);
    for (std::size_t i = 0; i < p.parameter_count(); ++i) EXPECT_EQ(cp.params.flat(i), p.flat(i));
}

TEST(Checkpoint, RejectsTruncatedFile) {
    MlpSpec spec{{2, 2}};
    std::stringstream ss;
    write_checkpoint(ss, spec, init_params(spec, 0));
    std::string text = ss.str();
    std::stringstream cut(text.substr(0, text.rfind('\n', text.size() - 2) + 1));
    EXPECT_THROW(read_checkpoint(cut), ParseError);
    std::stringstream bad("hrl-mlp-checkpoint,2\n");
    EXPECT_THROW(read_checkpoint(bad), ParseError);
}
