#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hrl/error.hpp"

namespace hrl::embed {

/// Aligned steering angle (radians), brake and throttle pressure samples.
struct TelemetrySeries {
    std::vector<double> timestamps;
    std::vector<double> angle;
    std::vector<double> brake;
    std::vector<double> throttle;

    std::size_t length() const noexcept { return angle.size(); }

    void validate() const {
        require(brake.size() == angle.size() && throttle.size() == angle.size(), "telemetry series lengths differ");
        require(timestamps.empty() || timestamps.size() == angle.size(), "telemetry timestamps length differs");
        for (std::size_t i = 0; i < angle.size(); ++i)
            require(std::isfinite(angle[i]) && std::isfinite(brake[i]) && std::isfinite(throttle[i]),
                    "telemetry values must be finite");
    }
};

/// Window tau of width m: [angles | brake | throttle] over [tau*m, (tau+1)*m).
struct TelemetryWindow {
    std::size_t tau = 0;
    std::vector<double> v;
};

inline std::vector<TelemetryWindow> window_telemetry(const TelemetrySeries& series, std::size_t m) {
    require(m >= 1, "window length must be >= 1");
    series.validate();
    const std::size_t n = series.length() / m;
    std::vector<TelemetryWindow> out;
    out.reserve(n);
    for (std::size_t tau = 0; tau < n; ++tau) {
        TelemetryWindow w{tau, {}};
        w.v.reserve(3 * m);
        for (const auto* s : {&series.angle, &series.brake, &series.throttle})
            w.v.insert(w.v.end(), s->begin() + static_cast<std::ptrdiff_t>(tau * m),
                       s->begin() + static_cast<std::ptrdiff_t>((tau + 1) * m));
        out.push_back(std::move(w));
    }
    return out;
}

inline std::vector<std::vector<double>> window_vectors(const std::vector<TelemetryWindow>& windows) {
    std::vector<std::vector<double>> out;
    out.reserve(windows.size());
    for (const auto& w : windows) out.push_back(w.v);
    return out;
}

enum class SignLabel : std::uint8_t { Negative, NearZero, Positive };

inline const char* sign_label_name(SignLabel s) {
    switch (s) {
    case SignLabel::Negative: return "negative";
    case SignLabel::NearZero: return "near_zero";
    case SignLabel::Positive: return "positive";
    }
    return "?";
}

/// Sign of the mean steering angle, with |mean| <= eps counted as near zero.
inline SignLabel sign_label(const TelemetryWindow& w, double eps = 0.05) {
    require(!w.v.empty() && w.v.size() % 3 == 0, "telemetry window length must be a positive multiple of 3");
    const std::size_t m = w.v.size() / 3;
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += w.v[i];
    const double mean = sum / static_cast<double>(m);
    if (mean > eps) return SignLabel::Positive;
    if (mean < -eps) return SignLabel::Negative;
    return SignLabel::NearZero;
}

/// Reads `timestamp,angle,brake,throttle`. Rows must already be aligned:
/// every row complete and timestamps strictly increasing. Offending
/// timestamps are all listed in the error.
inline TelemetrySeries read_telemetry_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("telemetry csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "timestamp,angle,brake,throttle") throw ParseError("telemetry csv: expected header 'timestamp,angle,brake,throttle'");

    TelemetrySeries s;
    std::vector<std::string> bad;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (!line.empty() && line.back() == ',') f.emplace_back();
        double vals[4];
        bool ok = f.size() == 4;
        for (std::size_t i = 0; ok && i < 4; ++i) {
            std::size_t used = 0;
            try {
                vals[i] = std::stod(f[i], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            ok = used > 0 && used == f[i].size() && std::isfinite(vals[i]);
        }
        if (!ok) {
            bad.push_back((f.empty() ? std::string("?") : f[0]) + " (line " + std::to_string(line_no) + ")");
            continue;
        }
        if (!s.timestamps.empty() && vals[0] <= s.timestamps.back()) {
            bad.push_back(f[0] + " (line " + std::to_string(line_no) + ")");
            continue;
        }
        s.timestamps.push_back(vals[0]);
        s.angle.push_back(vals[1]);
        s.brake.push_back(vals[2]);
        s.throttle.push_back(vals[3]);
    }
    if (!bad.empty()) {
        std::string msg = "telemetry csv: misaligned rows at timestamps";
        for (const auto& b : bad) msg += " " + b;
        throw ParseError(msg);
    }
    return s;
}

inline TelemetrySeries load_telemetry(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open telemetry file '" + path + "'");
    return read_telemetry_csv(in);
}

inline void write_telemetry_csv(std::ostream& out, const TelemetrySeries& s) {
    s.validate();
    auto prec = out.precision(17);
    out << "timestamp,angle,brake,throttle\n";
    for (std::size_t i = 0; i < s.length(); ++i)
        out << (s.timestamps.empty() ? static_cast<double>(i) : s.timestamps[i]) << ',' << s.angle[i] << ','
            << s.brake[i] << ',' << s.throttle[i] << '\n';
    out.precision(prec);
}

struct LabeledTelemetry {
    TelemetrySeries series;
    /// Generating cluster of each window.
    std::vector<std::size_t> labels;
};

/// Windows drawn from `clusters` Gaussian blobs in window space. Each blob
/// centre has N(0, separation^2) coordinates; samples add N(0, noise^2).
/// Window i belongs to blob i % clusters.
inline LabeledTelemetry synth_telemetry_clusters(std::size_t n_windows, std::size_t m, std::size_t clusters,
                                                 double separation, double noise, std::uint64_t seed) {
    require(m >= 1 && clusters >= 1 && n_windows >= 1, "synthetic telemetry needs m, clusters, windows >= 1");
    require(separation >= 0.0 && noise >= 0.0, "separation and noise must be >= 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::vector<double>> centres(clusters, std::vector<double>(3 * m));
    for (auto& c : centres)
        for (double& v : c) v = separation * normal(rng);

    LabeledTelemetry out;
    auto& s = out.series;
    std::vector<std::vector<double>*> blocks{&s.angle, &s.brake, &s.throttle};
    for (std::size_t w = 0; w < n_windows; ++w) {
        const std::size_t label = w % clusters;
        out.labels.push_back(label);
        for (std::size_t b = 0; b < 3; ++b)
            for (std::size_t i = 0; i < m; ++i) blocks[b]->push_back(centres[label][b * m + i] + noise * normal(rng));
    }
    for (std::size_t t = 0; t < s.angle.size(); ++t) s.timestamps.push_back(static_cast<double>(t));
    return out;
}

} // namespace hrl::embed
