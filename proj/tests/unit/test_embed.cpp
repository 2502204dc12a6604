#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "hrl/embed/augment.hpp"
#include "hrl/embed/kmeans.hpp"
#include "hrl/embed/telemetry.hpp"
#include "hrl/embed/tsne.hpp"

using namespace hrl;
using namespace hrl::embed;

namespace {

TelemetrySeries ramp(std::size_t n) {
    TelemetrySeries s;
    for (std::size_t i = 0; i < n; ++i) {
        s.timestamps.push_back(static_cast<double>(i));
        s.angle.push_back(static_cast<double>(i));
        s.brake.push_back(100.0 + static_cast<double>(i));
        s.throttle.push_back(200.0 + static_cast<double>(i));
    }
    return s;
}

double entropy_perplexity(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return std::exp(h);
}

} // namespace

TEST(Telemetry, WindowsDropRemainderAndStackChannels) {
    auto w = window_telemetry(ramp(35), 10);
    ASSERT_EQ(w.size(), 3u);
    EXPECT_EQ(w[2].tau, 2u);
    ASSERT_EQ(w[1].v.size(), 30u);
    EXPECT_EQ(w[1].v[0], 10.0);
    EXPECT_EQ(w[1].v[9], 19.0);
    EXPECT_EQ(w[1].v[10], 110.0);
    EXPECT_EQ(w[1].v[29], 219.0);
    EXPECT_THROW(window_telemetry(ramp(5), 0), InvalidArgument);
}

TEST(Telemetry, CsvRoundTrip) {
    TelemetrySeries s = ramp(12);
    s.angle[3] = -0.123456789012345;
    std::stringstream ss;
    write_telemetry_csv(ss, s);
    TelemetrySeries back = read_telemetry_csv(ss);
    EXPECT_EQ(back.angle, s.angle);
    EXPECT_EQ(back.timestamps, s.timestamps);
}

TEST(Telemetry, MisalignedRowsListEveryTimestamp) {
    std::stringstream ss("timestamp,angle,brake,throttle\n0,0,0,0\n1,0.1,0\n2,0,0,0\n2,0,0,0\n3,0,0,0\n");
    try {
        read_telemetry_csv(ss);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("1 (line 3)"), std::string::npos) << msg;
        EXPECT_NE(msg.find("2 (line 5)"), std::string::npos) << msg;
    }
    std::stringstream header("time,angle\n");
    EXPECT_THROW(read_telemetry_csv(header), ParseError);
}

TEST(Telemetry, SignLabels) {
    TelemetryWindow w{0, {0.1, 0.2, 0, 0, 0, 0}};
    EXPECT_EQ(sign_label(w), SignLabel::Positive);
    w.v[0] = -0.2;
    EXPECT_EQ(sign_label(w), SignLabel::NearZero);
    w.v[1] = -0.2;
    EXPECT_EQ(sign_label(w), SignLabel::Negative);
    EXPECT_STREQ(sign_label_name(SignLabel::NearZero), "near_zero");
}

TEST(Augment, GradientFilterValidRegion) {
    Image img(1, 4);
    img.pixels = {0, 1, 4, 9};
    Image h = gradient_filter(img, Axis::Horizontal);
    EXPECT_EQ(h.cols, 2u);
    EXPECT_EQ(h.pixels, (std::vector<double>{-4.0, -8.0}));
    Image col(4, 1);
    col.pixels = {0, 1, 4, 9};
    EXPECT_EQ(gradient_filter(col, Axis::Vertical).pixels, (std::vector<double>{-4.0, -8.0}));
    EXPECT_THROW(gradient_filter(Image(2, 2), Axis::Vertical), InvalidArgument);
}

TEST(Augment, NormalizeAndFlip) {
    Image img(1, 3);
    img.pixels = {2, 4, 6};
    EXPECT_EQ(normalize_image(img).pixels, (std::vector<double>{-1.0, 0.0, 1.0}));
    EXPECT_EQ(normalize_image(Image(2, 2, 5.0)).pixels, (std::vector<double>(4, 0.0)));
    EXPECT_EQ(hflip_negate({0.5, -0.25}), (std::vector<double>{-0.5, 0.25}));
}

TEST(Tsne, KlDivergenceOracle) {
    // 0.5 ln(0.5/0.9) + 0.5 ln(0.5/0.1)
    EXPECT_NEAR(kl_divergence(std::vector<double>{0.5, 0.5}, std::vector<double>{0.9, 0.1}), 0.510825623765991, 1e-12);
    EXPECT_DOUBLE_EQ(kl_divergence(std::vector<double>{0.0, 1.0}, std::vector<double>{0.5, 0.5}), std::log(2.0));
    EXPECT_THROW(kl_divergence(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0, 0.0}), InvalidArgument);
}

TEST(Tsne, PerplexityCalibrationHitsTarget) {
    std::vector<double> d;
    for (int i = 1; i <= 60; ++i) d.push_back(0.1 * i * i);
    for (double target : {5.0, 15.0, 30.0}) {
        AffinityRow row = perplexity_calibration(d, target);
        double sum = 0.0;
        for (double v : row.p) sum += v;
        EXPECT_NEAR(sum, 1.0, 1e-12);
        EXPECT_NEAR(entropy_perplexity(row.p), target, 1e-4);
        EXPECT_NEAR(row.perplexity, target, 1e-4);
    }
}

TEST(Tsne, EqualDistancesGiveUniformRow) {
    AffinityRow row = perplexity_calibration(std::vector<double>(4, 2.0), 3.0);
    for (double v : row.p) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(Tsne, JointAffinitiesSymmetricAndNormalized) {
    auto lt = synth_telemetry_clusters(40, 2, 2, 1.0, 0.3, 1);
    auto x = window_vectors(window_telemetry(lt.series, 2));
    SquareMatrix p = joint_affinities(x, 5.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.n; ++i) {
        EXPECT_EQ(p(i, i), 0.0);
        for (std::size_t j = 0; j < p.n; ++j) {
            EXPECT_DOUBLE_EQ(p(i, j), p(j, i));
            sum += p(i, j);
        }
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Tsne, FitReducesKlAndSeparatesBlobs) {
    auto lt = synth_telemetry_clusters(90, 4, 3, 1.0, 0.3, 2);
    auto x = window_vectors(window_telemetry(lt.series, 4));
    TsneConfig cfg;
    cfg.perplexity = 10.0;
    cfg.iterations = 300;
    TsneEmbedding e = tsne_fit(x, cfg, 2);
    ASSERT_EQ(e.kl_trace.size(), 301u);
    EXPECT_LT(e.kl_trace.back(), e.kl_trace.front());
    EXPECT_GE(knn_recall(e.coords, lt.labels, 5), 0.9);
}

TEST(Tsne, RejectsTooFewPoints) {
    std::vector<std::vector<double>> x(10, std::vector<double>{0.0});
    EXPECT_THROW(tsne_fit(x, TsneConfig{}, 0), InvalidArgument);
}

TEST(KMeans, SeparatedPairsAndDeterminism) {
    std::vector<std::vector<double>> pts{{0, 0}, {0, 1}, {10, 0}, {10, 1}};
    KMeansConfig cfg{2, 100};
    CentroidSet a = kmeans_fit(pts, cfg, 1), b = kmeans_fit(pts, cfg, 1);
    EXPECT_EQ(a.assignment, b.assignment);
    EXPECT_EQ(a.assignment[0], a.assignment[1]);
    EXPECT_EQ(a.assignment[2], a.assignment[3]);
    EXPECT_NE(a.assignment[0], a.assignment[2]);
    EXPECT_DOUBLE_EQ(a.inertia_trace.back(), 1.0);
    for (std::size_t i = 1; i < a.inertia_trace.size(); ++i) EXPECT_LE(a.inertia_trace[i], a.inertia_trace[i - 1] + 1e-12);
    EXPECT_THROW(kmeans_fit(pts, {5, 10}, 0), InvalidArgument);
}

TEST(KMeans, NearestCentroidTieGoesLow) {
    std::vector<std::vector<double>> c{{-1.0}, {1.0}};
    EXPECT_EQ(nearest_centroid(c, {0.0}), 0u);
}

TEST(Subroutine, UsesPreviousWindowOnly) {
    CentroidSet cs;
    cs.k = 2;
    cs.assignment = {1, 0, 1};
    EXPECT_EQ(assign_subroutine(cs, 1), 1u);
    EXPECT_EQ(assign_subroutine(cs, 2), 0u);
    EXPECT_THROW(assign_subroutine(cs, 0), InvalidArgument);
    EXPECT_THROW(assign_subroutine(cs, 4), LookupError);
}

TEST(Metrics, RecallAndPurityOracles) {
    std::vector<Point2> pts{{0, 0}, {0, 1}, {5, 0}, {5, 1}};
    EXPECT_DOUBLE_EQ(knn_recall(pts, {0, 0, 1, 1}, 1), 1.0);
    EXPECT_DOUBLE_EQ(knn_recall(pts, {0, 1, 0, 1}, 1), 0.0);
    EXPECT_DOUBLE_EQ(purity({0, 0, 1, 1}, {0, 1, 1, 1}), 0.75);
}

TEST(Report, NearestWindowsPerCentroid) {
    std::vector<TelemetryWindow> w;
    for (std::size_t i = 0; i < 4; ++i) w.push_back({i, {static_cast<double>(i), 0, 0}});
    TsneEmbedding e;
    e.coords = {{0, 0}, {0, 2}, {10, 0}, {10, 1}};
    CentroidSet cs;
    cs.k = 2;
    cs.centroids = {{0, 0.5}, {10, 0.5}};
    cs.assignment = {0, 0, 1, 1};
    auto rows = nearest_windows_report(e, cs, w, 1, 0.05);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].tau, 0u);
    EXPECT_DOUBLE_EQ(rows[0].distance, 0.5);
    EXPECT_EQ(rows[1].centroid, 1u);
    EXPECT_EQ(rows[1].t_begin, rows[1].tau);
    std::ostringstream out;
    write_report_csv(out, rows);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "centroid,rank,tau,t_begin,t_end,distance,sign_label");
}
