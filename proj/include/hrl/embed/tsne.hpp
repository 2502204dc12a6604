#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "hrl/error.hpp"

namespace hrl::embed {

/// Dense row-major n x n matrix.
struct SquareMatrix {
    std::size_t n = 0;
    std::vector<double> values;

    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t size, double fill = 0.0) : n(size), values(size * size, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return values[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

struct TsneConfig {
    double perplexity = 30.0;
    std::size_t iterations = 1000;
    double learning_rate = 200.0;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    std::size_t momentum_switch_iter = 250;
    double exaggeration = 4.0;
    std::size_t exaggeration_iters = 100;
    double min_gain = 0.01;

    void validate() const {
        require(perplexity > 0.0, "perplexity must be > 0");
        require(iterations >= 1, "iterations must be >= 1");
        require(learning_rate > 0.0, "learning rate must be > 0");
        require(exaggeration >= 1.0, "exaggeration must be >= 1");
    }
};

using Point2 = std::array<double, 2>;

struct TsneEmbedding {
    std::vector<Point2> coords;
    /// KL(P||Q) before the first update, then after each iteration.
    std::vector<double> kl_trace;
    SquareMatrix p;
};

inline SquareMatrix squared_distances(const std::vector<std::vector<double>>& x) {
    SquareMatrix d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            require(x[i].size() == x[j].size(), "points have different dimensions");
            double s = 0.0;
            for (std::size_t k = 0; k < x[i].size(); ++k) {
                double diff = x[i][k] - x[j][k];
                s += diff * diff;
            }
            d(i, j) = d(j, i) = s;
        }
    return d;
}

struct AffinityRow {
    std::vector<double> p;
    double beta = 1.0;
    /// 2^H of the returned row, H in bits.
    double perplexity = 0.0;
};

/// Gaussian conditional affinities p_{j|i} for one point, with the
/// precision beta found by bisection so that 2^H matches `perplexity`.
/// `sq_distances` excludes the point itself.
inline AffinityRow perplexity_calibration(const std::vector<double>& sq_distances, double perplexity,
                                          double tol = 1e-5, int max_iters = 50) {
    const std::size_t n = sq_distances.size();
    require(n >= 1, "affinity row needs at least one neighbour");
    require(perplexity > 0.0 && perplexity < static_cast<double>(n) + 1.0, "perplexity must lie in (0, row length + 1)");
    for (double d : sq_distances) require(std::isfinite(d) && d >= 0.0, "distances must be finite and >= 0");

    AffinityRow row;
    row.p.assign(n, 1.0 / static_cast<double>(n));
    const double d_min = *std::min_element(sq_distances.begin(), sq_distances.end());
    const double d_max = *std::max_element(sq_distances.begin(), sq_distances.end());
    if (d_max == d_min) {
        row.beta = 0.0;
        row.perplexity = static_cast<double>(n);
        return row;
    }

    auto evaluate = [&](double beta) {
        double sum = 0.0, weighted = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            // Shift by the nearest distance so the largest term is exp(0).
            double e = std::exp(-beta * (sq_distances[j] - d_min));
            row.p[j] = e;
            sum += e;
            weighted += e * (sq_distances[j] - d_min);
        }
        for (double& v : row.p) v /= sum;
        double h_nats = std::log(sum) + beta * weighted / sum;
        return std::exp(h_nats);
    };

    double beta = 1.0 / std::max(1e-300, (d_max - d_min) / static_cast<double>(n));
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double perp = evaluate(beta);
    for (int it = 0; it < max_iters && std::abs(perp - perplexity) > tol; ++it) {
        if (perp > perplexity) {
            lo = beta;
            beta = std::isinf(hi) ? beta * 2.0 : (beta + hi) / 2.0;
        } else {
            hi = beta;
            beta = (beta + lo) / 2.0;
        }
        perp = evaluate(beta);
    }
    row.beta = beta;
    row.perplexity = perp;
    return row;
}

/// Symmetrized joint affinities p_ij = (p_{j|i} + p_{i|j}) / 2n.
inline SquareMatrix joint_affinities(const std::vector<std::vector<double>>& x, double perplexity) {
    const std::size_t n = x.size();
    SquareMatrix d = squared_distances(x);
    SquareMatrix cond(n);
    std::vector<double> row(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0, k = 0; j < n; ++j)
            if (j != i) row[k++] = d(i, j);
        AffinityRow a = perplexity_calibration(row, perplexity);
        for (std::size_t j = 0, k = 0; j < n; ++j)
            if (j != i) cond(i, j) = a.p[k++];
    }
    SquareMatrix p(n);
    const double scale = 1.0 / (2.0 * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) p(i, j) = (cond(i, j) + cond(j, i)) * scale;
    return p;
}

/// Student-t joint affinities of an embedding.
inline SquareMatrix low_dim_affinities(const std::vector<Point2>& y) {
    const std::size_t n = y.size();
    SquareMatrix q(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double dx = y[i][0] - y[j][0], dy = y[i][1] - y[j][1];
            double w = 1.0 / (1.0 + dx * dx + dy * dy);
            q(i, j) = q(j, i) = w;
            sum += 2.0 * w;
        }
    for (double& v : q.values) v /= sum;
    return q;
}

/// Sum of p log(p/q) over off-diagonal entries, 0 log 0 taken as 0.
inline double kl_divergence(const SquareMatrix& p, const SquareMatrix& q) {
    require(p.n == q.n, "kl_divergence: shape mismatch");
    double kl = 0.0;
    for (std::size_t i = 0; i < p.n; ++i)
        for (std::size_t j = 0; j < p.n; ++j) {
            if (i == j) continue;
            double pv = p(i, j), qv = q(i, j);
            if (pv <= 0.0) continue;
            if (qv <= 0.0) throw InvalidArgument("kl_divergence: q is zero where p is positive");
            kl += pv * std::log(pv / qv);
        }
    return kl;
}

/// KL over flat distributions.
inline double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
    require(p.size() == q.size(), "kl_divergence: shape mismatch");
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) throw InvalidArgument("kl_divergence: q is zero where p is positive");
        kl += p[i] * std::log(p[i] / q[i]);
    }
    return kl;
}

/// Exact O(n^2) t-SNE into two dimensions.
inline TsneEmbedding tsne_fit(const std::vector<std::vector<double>>& x, const TsneConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const std::size_t n = x.size();
    if (static_cast<double>(n) < 2.0 * cfg.perplexity + 1.0)
        throw InvalidArgument("tsne_fit: need at least 2 * perplexity + 1 points, got " + std::to_string(n));
    for (const auto& row : x)
        for (double v : row) require(std::isfinite(v), "tsne_fit: inputs must be finite");

    TsneEmbedding out;
    out.p = joint_affinities(x, cfg.perplexity);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1e-2);
    out.coords.resize(n);
    for (auto& c : out.coords) c = {normal(rng), normal(rng)};

    std::vector<Point2> velocity(n, {0.0, 0.0}), gains(n, {1.0, 1.0}), grad(n);
    SquareMatrix num(n);
    out.kl_trace.push_back(kl_divergence(out.p, low_dim_affinities(out.coords)));

    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        const double exag = it < cfg.exaggeration_iters ? cfg.exaggeration : 1.0;
        const double momentum = it < cfg.momentum_switch_iter ? cfg.initial_momentum : cfg.final_momentum;

        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                double dx = out.coords[i][0] - out.coords[j][0], dy = out.coords[i][1] - out.coords[j][1];
                double w = 1.0 / (1.0 + dx * dx + dy * dy);
                num(i, j) = num(j, i) = w;
                sum += 2.0 * w;
            }
        for (std::size_t i = 0; i < n; ++i) {
            double gx = 0.0, gy = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                double w = num(i, j);
                double coeff = (exag * out.p(i, j) - w / sum) * w;
                gx += coeff * (out.coords[i][0] - out.coords[j][0]);
                gy += coeff * (out.coords[i][1] - out.coords[j][1]);
            }
            grad[i] = {4.0 * gx, 4.0 * gy};
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t d = 0; d < 2; ++d) {
                double& g = gains[i][d];
                g = (grad[i][d] > 0.0) != (velocity[i][d] > 0.0) ? g + 0.2 : g * 0.8;
                g = std::max(g, cfg.min_gain);
                velocity[i][d] = momentum * velocity[i][d] - cfg.learning_rate * g * grad[i][d];
                out.coords[i][d] += velocity[i][d];
            }
        Point2 mean{0.0, 0.0};
        for (const auto& c : out.coords) mean = {mean[0] + c[0], mean[1] + c[1]};
        for (auto& c : out.coords) c = {c[0] - mean[0] / static_cast<double>(n), c[1] - mean[1] / static_cast<double>(n)};

        out.kl_trace.push_back(kl_divergence(out.p, low_dim_affinities(out.coords)));
    }
    return out;
}

} // namespace hrl::embed
