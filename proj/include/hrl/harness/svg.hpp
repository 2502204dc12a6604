#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "hrl/error.hpp"
#include "hrl/harness/stats.hpp"

namespace hrl::harness {

namespace svg {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    if (s == "-0.00") s = "0.00";
    return s;
}

inline std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline const char* color(std::size_t i) {
    static constexpr std::array<const char*, 8> palette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                        "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    return palette[i % palette.size()];
}

inline std::string header(double w, double h) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" viewBox=\"0 0 " +
           num(w) + " " + num(h) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

inline std::string text(double x, double y, const std::string& s, const char* anchor = "start", int size = 12) {
    return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" + std::to_string(size) +
           "\" text-anchor=\"" + anchor + "\">" + escape(s) + "</text>\n";
}

inline std::string line(double x1, double y1, double x2, double y2, const char* stroke = "black") {
    return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) + "\" stroke=\"" +
           stroke + "\"/>\n";
}

struct Range {
    double lo = 0.0;
    double hi = 1.0;

    static Range of(double lo, double hi) {
        if (!(hi > lo)) {
            double pad = std::abs(lo) > 0.0 ? std::abs(lo) * 0.5 : 1.0;
            return {lo - pad, hi + pad};
        }
        return {lo, hi};
    }
    double map(double v, double out_lo, double out_hi) const { return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo); }
};

} // namespace svg

struct Curve {
    std::string name;
    std::vector<double> values;
};

/// Line chart, one polyline per curve, x = episode index.
inline std::string render_curves(const std::vector<Curve>& curves, const std::string& title, const std::string& y_label) {
    require(!curves.empty(), "render_curves: no curves");
    double ymin = INFINITY, ymax = -INFINITY;
    std::size_t xmax = 1;
    for (const auto& c : curves) {
        require(!c.values.empty(), "render_curves: curve '" + c.name + "' is empty");
        for (double v : c.values) {
            require(std::isfinite(v), "render_curves: non-finite value");
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
        xmax = std::max(xmax, c.values.size() - 1);
    }
    const double W = 720, H = 420, L = 70, R = 160, T = 40, B = 50;
    auto xr = svg::Range::of(0.0, static_cast<double>(xmax));
    auto yr = svg::Range::of(ymin, ymax);

    std::string s = svg::header(W, H);
    s += svg::text(W / 2, 22, title, "middle", 14);
    s += svg::line(L, H - B, W - R, H - B) + svg::line(L, T, L, H - B);
    for (int i = 0; i <= 4; ++i) {
        double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0, py = yr.map(fy, H - B, T);
        double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0, px = xr.map(fx, L, W - R);
        s += svg::line(L - 4, py, L, py) + svg::text(L - 6, py + 4, svg::num(fy), "end", 10);
        s += svg::line(px, H - B, px, H - B + 4) + svg::text(px, H - B + 16, svg::num(fx), "middle", 10);
    }
    s += svg::text((L + W - R) / 2, H - 12, "episode", "middle");
    s += "<text x=\"16\" y=\"" + svg::num((T + H - B) / 2) + "\" font-family=\"sans-serif\" font-size=\"12\" " +
         "text-anchor=\"middle\" transform=\"rotate(-90 16 " + svg::num((T + H - B) / 2) + ")\">" + svg::escape(y_label) +
         "</text>\n";
    for (std::size_t c = 0; c < curves.size(); ++c) {
        s += "<polyline fill=\"none\" stroke=\"" + std::string(svg::color(c)) + "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < curves[c].values.size(); ++i) {
            if (i) s += ' ';
            s += svg::num(xr.map(static_cast<double>(i), L, W - R)) + "," + svg::num(yr.map(curves[c].values[i], H - B, T));
        }
        s += "\"/>\n";
        double ly = T + 10 + 18.0 * static_cast<double>(c);
        s += "<line x1=\"" + svg::num(W - R + 12) + "\" y1=\"" + svg::num(ly) + "\" x2=\"" + svg::num(W - R + 32) + "\" y2=\"" +
             svg::num(ly) + "\" stroke=\"" + svg::color(c) + "\" stroke-width=\"2\"/>\n";
        s += svg::text(W - R + 38, ly + 4, curves[c].name);
    }
    s += "</svg>\n";
    return s;
}

/// One histogram panel per agent, stacked vertically. Panel titles carry the
/// agent's mean duration.
inline std::string render_histogram(const std::vector<std::pair<std::string, std::vector<double>>>& durations,
                                    const HistogramSpec& spec, const std::string& title) {
    require(!durations.empty(), "render_histogram: no agents");
    const double W = 640, panel_h = 170, L = 60, R = 30, top = 40;
    const double H = top + panel_h * static_cast<double>(durations.size()) + 10;
    std::string s = svg::header(W, H);
    s += svg::text(W / 2, 22, title, "middle", 14);
    for (std::size_t p = 0; p < durations.size(); ++p) {
        const auto& [name, values] = durations[p];
        require(!values.empty(), "render_histogram: agent '" + name + "' has no durations");
        Histogram h = histogram(values, spec);
        const double y0 = top + panel_h * static_cast<double>(p);
        const double plot_top = y0 + 22, plot_bottom = y0 + panel_h - 30;
        std::size_t cmax = *std::max_element(h.counts.begin(), h.counts.end());
        auto xr = svg::Range::of(h.lo, h.bin_start(h.counts.size()));
        auto yr = svg::Range::of(0.0, static_cast<double>(std::max<std::size_t>(cmax, 1)));
        s += svg::text(L, y0 + 14, name + " (mean " + svg::num(mean(values)) + ")", "start", 12);
        s += svg::line(L, plot_bottom, W - R, plot_bottom) + svg::line(L, plot_top, L, plot_bottom);
        for (std::size_t i = 0; i < h.counts.size(); ++i) {
            double x0 = xr.map(h.bin_start(i), L, W - R), x1 = xr.map(h.bin_start(i + 1), L, W - R);
            double yt = yr.map(static_cast<double>(h.counts[i]), plot_bottom, plot_top);
            s += "<rect x=\"" + svg::num(x0) + "\" y=\"" + svg::num(yt) + "\" width=\"" + svg::num(x1 - x0) + "\" height=\"" +
                 svg::num(plot_bottom - yt) + "\" fill=\"" + svg::color(p) + "\" stroke=\"white\"/>\n";
        }
        s += svg::text(L, plot_bottom + 14, svg::num(xr.lo), "middle", 10);
        s += svg::text(W - R, plot_bottom + 14, svg::num(xr.hi), "middle", 10);
        s += svg::text(L - 6, plot_top + 4, std::to_string(cmax), "end", 10);
        s += svg::text(L - 6, plot_bottom, "0", "end", 10);
    }
    s += "</svg>\n";
    return s;
}

/// Scatter of 2-D points coloured by group.
inline std::string render_scatter(const std::vector<std::array<double, 2>>& points, const std::vector<std::size_t>& groups,
                                  const std::string& title) {
    require(!points.empty() && points.size() == groups.size(), "render_scatter: need one group per point");
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& p : points) {
        xmin = std::min(xmin, p[0]);
        xmax = std::max(xmax, p[0]);
        ymin = std::min(ymin, p[1]);
        ymax = std::max(ymax, p[1]);
    }
    const double W = 520, H = 520, M = 40;
    auto xr = svg::Range::of(xmin, xmax);
    auto yr = svg::Range::of(ymin, ymax);
    std::string s = svg::header(W, H);
    s += svg::text(W / 2, 22, title, "middle", 14);
    for (std::size_t i = 0; i < points.size(); ++i)
        s += "<circle cx=\"" + svg::num(xr.map(points[i][0], M, W - M)) + "\" cy=\"" + svg::num(yr.map(points[i][1], H - M, M)) +
             "\" r=\"2.5\" fill=\"" + svg::color(groups[i]) + "\"/>\n";
    s += "</svg>\n";
    return s;
}

} // namespace hrl::harness
