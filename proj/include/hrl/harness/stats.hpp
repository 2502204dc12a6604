#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hrl/error.hpp"

namespace hrl::harness {

inline double mean(const std::vector<double>& v) {
    require(!v.empty(), "mean of an empty sample");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double median(std::vector<double> v) {
    require(!v.empty(), "median of an empty sample");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

/// First episode after which steps never exceed `tolerance` times the mean
/// of the final `tail` episodes. 0 means the run was settled throughout.
inline std::size_t convergence_episode(const std::vector<double>& steps, std::size_t tail = 10, double tolerance = 1.05) {
    require(!steps.empty(), "convergence_episode: empty series");
    const std::size_t t = std::min(tail, steps.size());
    double tail_mean = 0.0;
    for (std::size_t i = steps.size() - t; i < steps.size(); ++i) tail_mean += steps[i];
    tail_mean /= static_cast<double>(t);
    const double limit = tolerance * tail_mean;
    for (std::size_t i = steps.size(); i-- > 0;)
        if (steps[i] > limit) return i + 1;
    return 0;
}

/// One agent's per-episode series for one seed.
struct SeedSeries {
    std::uint64_t seed = 0;
    std::vector<double> steps;
    std::vector<double> reward;
};

struct AgentRuns {
    std::string agent;
    std::vector<SeedSeries> seeds;

    /// Final-episode steps of every seed.
    std::vector<double> durations() const {
        std::vector<double> out;
        for (const auto& s : seeds)
            if (!s.steps.empty()) out.push_back(s.steps.back());
        return out;
    }

    /// Per-episode mean over seeds, truncated to the shortest seed.
    std::vector<double> mean_curve(bool use_reward) const {
        require(!seeds.empty(), "mean_curve: no seeds");
        std::size_t len = SIZE_MAX;
        for (const auto& s : seeds) len = std::min(len, (use_reward ? s.reward : s.steps).size());
        std::vector<double> out(len, 0.0);
        for (const auto& s : seeds)
            for (std::size_t i = 0; i < len; ++i) out[i] += (use_reward ? s.reward : s.steps)[i];
        for (double& v : out) v /= static_cast<double>(seeds.size());
        return out;
    }
};

struct SummaryRow {
    std::string agent;
    std::size_t runs = 0;
    double mean = 0.0;
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    double median_convergence = 0.0;
};

inline std::vector<SummaryRow> summarize(const std::vector<AgentRuns>& logs) {
    require(!logs.empty(), "summarize: no logs");
    std::vector<SummaryRow> rows;
    for (const auto& a : logs) {
        auto d = a.durations();
        require(!d.empty(), "summarize: agent '" + a.agent + "' has no episodes");
        std::vector<double> conv;
        for (const auto& s : a.seeds) conv.push_back(static_cast<double>(convergence_episode(s.steps)));
        rows.push_back({a.agent, d.size(), mean(d), median(d), *std::min_element(d.begin(), d.end()),
                        *std::max_element(d.begin(), d.end()), median(conv)});
    }
    return rows;
}

inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    auto prec = out.precision(17);
    out << "agent,runs,mean_duration,median_duration,min_duration,max_duration,median_convergence_episode\n";
    for (const auto& r : rows)
        out << r.agent << ',' << r.runs << ',' << r.mean << ',' << r.median << ',' << r.min << ',' << r.max << ','
            << r.median_convergence << '\n';
    out.precision(prec);
}

struct HistogramSpec {
    double bin_width = 250.0;
    double lo = 0.0;
    /// Upper bound; 0 means each panel ends at its own maximum.
    double hi = 0.0;

    void validate() const {
        require(bin_width > 0.0, "histogram bin width must be > 0");
        require(hi == 0.0 || hi > lo, "histogram upper bound must exceed the lower bound");
    }
};

struct Histogram {
    double lo = 0.0;
    double bin_width = 1.0;
    std::vector<std::size_t> counts;

    double bin_start(std::size_t i) const { return lo + bin_width * static_cast<double>(i); }
};

/// Bins [lo + i w, lo + (i+1) w). Values outside [lo, hi] are clamped into
/// the edge bins.
inline Histogram histogram(const std::vector<double>& values, const HistogramSpec& spec) {
    spec.validate();
    require(!values.empty(), "histogram of an empty sample");
    const double top = spec.hi > 0.0 ? spec.hi : std::max(spec.lo, *std::max_element(values.begin(), values.end()));
    const std::size_t bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor((top - spec.lo) / spec.bin_width)) + 1);
    Histogram h{spec.lo, spec.bin_width, std::vector<std::size_t>(bins, 0)};
    for (double v : values) {
        double pos = std::floor((v - spec.lo) / spec.bin_width);
        std::size_t i = pos < 0.0 ? 0 : std::min(bins - 1, static_cast<std::size_t>(pos));
        ++h.counts[i];
    }
    return h;
}

/// `agent,bin_start,bin_end,count` rows for every agent's duration histogram.
inline void write_histogram_csv(std::ostream& out, const std::vector<std::pair<std::string, Histogram>>& panels) {
    auto prec = out.precision(17);
    out << "agent,bin_start,bin_end,count\n";
    for (const auto& [name, h] : panels)
        for (std::size_t i = 0; i < h.counts.size(); ++i)
            out << name << ',' << h.bin_start(i) << ',' << h.bin_start(i + 1) << ',' << h.counts[i] << '\n';
    out.precision(prec);
}

} // namespace hrl::harness
