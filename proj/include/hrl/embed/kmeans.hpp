#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <vector>

#include "hrl/embed/telemetry.hpp"
#include "hrl/embed/tsne.hpp"
#include "hrl/error.hpp"

namespace hrl::embed {

struct KMeansConfig {
    std::size_t k = 20;
    std::size_t max_iters = 300;
};

struct CentroidSet {
    std::size_t k = 0;
    std::vector<std::vector<double>> centroids;
    /// Nearest centroid of each point, by index.
    std::vector<std::size_t> assignment;
    /// Within-cluster sum of squares after each Lloyd iteration.
    std::vector<double> inertia_trace;
};

inline double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

/// Index of the nearest centroid; ties go to the lower index.
inline std::size_t nearest_centroid(const std::vector<std::vector<double>>& centroids, const std::vector<double>& x) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        double d = squared_distance(centroids[c], x);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

inline double inertia(const std::vector<std::vector<double>>& points, const CentroidSet& cs) {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) s += squared_distance(points[i], cs.centroids[cs.assignment[i]]);
    return s;
}

/// k-means++ seeding followed by Lloyd iterations until the assignment stops
/// changing or max_iters is reached. An emptied cluster is re-seeded at the
/// point farthest from its current centroid.
inline CentroidSet kmeans_fit(const std::vector<std::vector<double>>& points, const KMeansConfig& cfg,
                              std::uint64_t seed) {
    const std::size_t n = points.size();
    require(cfg.k >= 1, "k must be >= 1");
    if (cfg.k > n) throw InvalidArgument("kmeans_fit: k exceeds the number of points");
    for (const auto& p : points) require(p.size() == points[0].size(), "points have different dimensions");

    std::mt19937_64 rng(seed);
    CentroidSet cs;
    cs.k = cfg.k;
    cs.centroids.push_back(points[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)]);
    std::vector<double> d2(n);
    while (cs.centroids.size() < cfg.k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = squared_distance(points[i], cs.centroids[nearest_centroid(cs.centroids, points[i])]);
            total += d2[i];
        }
        std::size_t pick = 0;
        if (total <= 0.0) {
            // All points already coincide with a centroid; take the first
            // point not used yet so k = n still works with duplicates.
            pick = cs.centroids.size();
        } else {
            double u = std::uniform_real_distribution<double>(0.0, total)(rng);
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (u < acc && d2[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        }
        cs.centroids.push_back(points[pick]);
    }

    cs.assignment.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) cs.assignment[i] = nearest_centroid(cs.centroids, points[i]);
    const std::size_t dim = points[0].size();
    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
        std::vector<std::vector<double>> sums(cfg.k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(cfg.k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[cs.assignment[i]];
            for (std::size_t d = 0; d < dim; ++d) sums[cs.assignment[i]][d] += points[i][d];
        }
        for (std::size_t c = 0; c < cfg.k; ++c) {
            if (counts[c] == 0) {
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double d = squared_distance(points[i], cs.centroids[cs.assignment[i]]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                cs.centroids[c] = points[far];
                cs.assignment[far] = c;
                continue;
            }
            for (std::size_t d = 0; d < dim; ++d) cs.centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
        }
        cs.inertia_trace.push_back(inertia(points, cs));
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t a = nearest_centroid(cs.centroids, points[i]);
            if (a != cs.assignment[i]) {
                cs.assignment[i] = a;
                changed = true;
            }
        }
        if (!changed) break;
    }
    cs.inertia_trace.push_back(inertia(points, cs));
    return cs;
}

inline std::vector<std::vector<double>> as_points(const std::vector<Point2>& coords) {
    std::vector<std::vector<double>> out;
    out.reserve(coords.size());
    for (const auto& c : coords) out.push_back({c[0], c[1]});
    return out;
}

/// Subroutine ID of window tau: the cluster of window tau-1. Window 0 has
/// no predecessor and therefore no ID.
inline std::size_t assign_subroutine(const CentroidSet& cs, std::size_t tau) {
    if (tau == 0) throw InvalidArgument("assign_subroutine: window 0 has no previous window");
    if (tau - 1 >= cs.assignment.size()) throw LookupError("assign_subroutine: window index out of range");
    return cs.assignment[tau - 1];
}

/// t-SNE and k-means fitted once on reference windows. New windows are
/// placed in the cluster of their nearest reference window (input space).
struct SubroutineModel {
    std::vector<std::vector<double>> reference;
    TsneEmbedding embedding;
    CentroidSet centroids;

    std::size_t cluster_of(const std::vector<double>& window) const {
        require(!reference.empty(), "subroutine model has no reference windows");
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < reference.size(); ++i) {
            double d = squared_distance(reference[i], window);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        return centroids.assignment[best];
    }

    /// ID for window tau of a stream; reads windows[tau-1] only.
    std::size_t subroutine(const std::vector<TelemetryWindow>& windows, std::size_t tau) const {
        if (tau == 0) throw InvalidArgument("subroutine: window 0 has no previous window");
        if (tau > windows.size()) throw LookupError("subroutine: window index out of range");
        return cluster_of(windows[tau - 1].v);
    }
};

inline SubroutineModel fit_subroutine_model(const std::vector<TelemetryWindow>& windows, const TsneConfig& tsne,
                                            const KMeansConfig& kmeans, std::uint64_t seed) {
    SubroutineModel model;
    model.reference = window_vectors(windows);
    model.embedding = tsne_fit(model.reference, tsne, seed);
    model.centroids = kmeans_fit(as_points(model.embedding.coords), kmeans, seed);
    return model;
}

struct ReportRow {
    std::size_t centroid = 0;
    std::size_t rank = 0;
    std::size_t tau = 0;
    std::size_t t_begin = 0;
    std::size_t t_end = 0;
    double distance = 0.0;
    SignLabel sign = SignLabel::NearZero;
};

/// For every centroid, its `n_examples` nearest member windows in the
/// embedding. Clusters with fewer members contribute fewer rows.
inline std::vector<ReportRow> nearest_windows_report(const TsneEmbedding& embedding, const CentroidSet& cs,
                                                     const std::vector<TelemetryWindow>& windows,
                                                     std::size_t n_examples, double sign_eps = 0.05) {
    require(n_examples >= 1, "n_examples must be >= 1");
    require(embedding.coords.size() == windows.size() && cs.assignment.size() == windows.size(),
            "embedding, centroids and windows disagree on the window count");
    const std::size_t m = windows.empty() ? 0 : windows[0].v.size() / 3;
    std::vector<ReportRow> rows;
    for (std::size_t c = 0; c < cs.k; ++c) {
        std::vector<std::pair<double, std::size_t>> members;
        for (std::size_t i = 0; i < windows.size(); ++i)
            if (cs.assignment[i] == c)
                members.emplace_back(
                    std::sqrt(squared_distance({embedding.coords[i][0], embedding.coords[i][1]}, cs.centroids[c])), i);
        std::sort(members.begin(), members.end());
        for (std::size_t r = 0; r < std::min(n_examples, members.size()); ++r) {
            const auto& w = windows[members[r].second];
            rows.push_back({c, r, w.tau, w.tau * m, (w.tau + 1) * m, members[r].first, sign_label(w, sign_eps)});
        }
    }
    return rows;
}

inline void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
    auto prec = out.precision(17);
    out << "centroid,rank,tau,t_begin,t_end,distance,sign_label\n";
    for (const auto& r : rows)
        out << r.centroid << ',' << r.rank << ',' << r.tau << ',' << r.t_begin << ',' << r.t_end << ',' << r.distance << ','
            << sign_label_name(r.sign) << '\n';
    out.precision(prec);
}

/// `tau,x,y,centroid,sign_label`; centroid is the window's own cluster.
inline void write_embedding_csv(std::ostream& out, const TsneEmbedding& embedding, const CentroidSet& cs,
                                const std::vector<TelemetryWindow>& windows, double sign_eps = 0.05) {
    require(embedding.coords.size() == windows.size() && cs.assignment.size() == windows.size(),
            "embedding, centroids and windows disagree on the window count");
    auto prec = out.precision(17);
    out << "tau,x,y,centroid,sign_label\n";
    for (std::size_t i = 0; i < windows.size(); ++i)
        out << windows[i].tau << ',' << embedding.coords[i][0] << ',' << embedding.coords[i][1] << ',' << cs.assignment[i]
            << ',' << sign_label_name(sign_label(windows[i], sign_eps)) << '\n';
    out.precision(prec);
}

/// Mean fraction of each point's k nearest neighbours sharing its label.
inline double knn_recall(const std::vector<Point2>& coords, const std::vector<std::size_t>& labels, std::size_t k) {
    require(coords.size() == labels.size() && coords.size() > k, "knn_recall: need more points than k");
    double total = 0.0;
    std::vector<std::pair<double, std::size_t>> d(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
        for (std::size_t j = 0; j < coords.size(); ++j) {
            double dx = coords[i][0] - coords[j][0], dy = coords[i][1] - coords[j][1];
            d[j] = {j == i ? std::numeric_limits<double>::infinity() : dx * dx + dy * dy, j};
        }
        std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
        std::size_t same = 0;
        for (std::size_t r = 0; r < k; ++r) same += labels[d[r].second] == labels[i];
        total += static_cast<double>(same) / static_cast<double>(k);
    }
    return total / static_cast<double>(coords.size());
}

/// Share of points whose cluster's majority label matches their own.
inline double purity(const std::vector<std::size_t>& clusters, const std::vector<std::size_t>& labels) {
    require(clusters.size() == labels.size() && !labels.empty(), "purity: size mismatch");
    const std::size_t nc = *std::max_element(clusters.begin(), clusters.end()) + 1;
    const std::size_t nl = *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<std::vector<std::size_t>> counts(nc, std::vector<std::size_t>(nl, 0));
    for (std::size_t i = 0; i < labels.size(); ++i) ++counts[clusters[i]][labels[i]];
    std::size_t hit = 0;
    for (const auto& row : counts) hit += *std::max_element(row.begin(), row.end());
    return static_cast<double>(hit) / static_cast<double>(labels.size());
}

} // namespace hrl::embed
