#pragma once

#include <cmath>
#include <random>

#include "hrl/error.hpp"
#include "hrl/rl/q_table.hpp"

namespace hrl::rl {

using Rng = std::mt19937_64;

struct LearningParams {
    double alpha = 0.1;
    double gamma = 0.95;

    void validate() const {
        require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0,1]");
        require(gamma >= 0.0 && gamma < 1.0, "gamma must lie in [0,1)");
    }
};

/// Per-episode multiplicative epsilon decay with a floor.
struct ExplorationSchedule {
    double epsilon0 = 1.0;
    double decay = 0.995;
    double epsilon_min = 0.05;

    void validate() const {
        require(epsilon_min >= 0.0 && epsilon_min <= epsilon0 && epsilon0 <= 1.0,
                "exploration schedule needs 0 <= epsilon_min <= epsilon0 <= 1");
        require(decay > 0.0 && decay <= 1.0, "decay must lie in (0,1]");
    }

    double epsilon(std::size_t episode) const {
        return std::max(epsilon_min, epsilon0 * std::pow(decay, static_cast<double>(episode)));
    }

    static ExplorationSchedule constant(double eps) { return {eps, 1.0, eps}; }
};

struct Transition {
    StateId s0 = 0;
    ActionId a = 0;
    double r = 0.0;
    StateId s = 0;
    bool done = false;
};

/// One-step Q-learning backup. Returns the new Q(s0, a).
inline double q_update(QTable& table, const LearningParams& params, const Transition& t) {
    if (!std::isfinite(t.r)) throw InvalidArgument("non-finite reward");
    double& q = table.row(t.s0).at(t.a);
    double bootstrap = t.done ? 0.0 : params.gamma * table.max_value(t.s);
    q += params.alpha * (t.r + bootstrap - q);
    return q;
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

/// Epsilon-greedy choice over a table row. Ties go to the lowest index.
///
/// The exploration draw is consumed on every call, so two tables that only
/// differ in their values still walk the generator identically.
inline ActionId select_action(const QTable& table, StateId state, double epsilon, Rng& rng) {
    const auto& row = table.row(state);
    double u = uniform01(rng);
    if (u < epsilon) return uniform_index(rng, row.size());
    return table.greedy_action(state);
}

} // namespace hrl::rl
