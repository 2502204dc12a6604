#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hrl/harness/config.hpp"
#include "hrl/harness/experiments.hpp"
#include "hrl/harness/stats.hpp"
#include "hrl/harness/svg.hpp"

using namespace hrl;
using namespace hrl::harness;

namespace {

Config parse(const std::string& text) {
    std::istringstream in(text);
    return Config::parse(in);
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("hrl_unit_" + name);
    std::filesystem::remove_all(p);
    return p;
}

} // namespace

TEST(Config, ParsesValuesCommentsAndLists) {
    Config c = parse("# comment\nalpha = 0.25  # trailing\nagents = a, b ,c\nseeds = 0-2, 7\nflag = true\n");
    EXPECT_DOUBLE_EQ(c.get_double("alpha", 0.0), 0.25);
    EXPECT_EQ(c.get_list("agents", {}), (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_EQ(c.get_seeds("seeds", {}), (std::vector<std::uint64_t>{0, 1, 2, 7}));
    EXPECT_TRUE(c.get_bool("flag", false));
    EXPECT_EQ(c.get_size("missing", 9), 9u);
    EXPECT_NO_THROW(c.reject_unused());
}

TEST(Config, ErrorsAreConfigErrors) {
    EXPECT_THROW(parse("a = 1\na = 2\n"), ConfigError);
    EXPECT_THROW(parse("novalue\n"), ConfigError);
    Config c = parse("n = 1.5\nx = abc\nr = 5-2\n");
    EXPECT_THROW(c.get_size("n", 0), ConfigError);
    EXPECT_THROW(c.get_double("x", 0), ConfigError);
    EXPECT_THROW(c.get_seeds("r", {}), ConfigError);
    EXPECT_THROW(c.require_string("absent"), ConfigError);
}

TEST(Config, UnknownKeysRejected) {
    Config c = parse("maze.episodes = 5\nmaze.epsiodes = 6\n");
    c.get_size("maze.episodes", 0);
    EXPECT_EQ(c.unused_keys(), (std::vector<std::string>{"maze.epsiodes"}));
    EXPECT_THROW(c.reject_unused(), ConfigError);
}

TEST(Config, OverridesReplaceValues) {
    Config c = parse("a = 1\n");
    c.set_override("a=2");
    c.set_override("b = x");
    EXPECT_EQ(c.get_string("a", ""), "2");
    EXPECT_EQ(c.get_string("b", ""), "x");
    EXPECT_THROW(c.set_override("noequals"), ConfigError);
}

TEST(Stats, MeanMedian) {
    EXPECT_DOUBLE_EQ(mean({1, 2, 6}), 3.0);
    EXPECT_DOUBLE_EQ(median({5, 1, 3}), 3.0);
    EXPECT_DOUBLE_EQ(median({4, 1, 3, 2}), 2.5);
    EXPECT_THROW(median({}), InvalidArgument);
}

TEST(Stats, ConvergenceEpisode) {
    // Tail of the last 3 is 10; 1.05 * 10 = 10.5 and episode 4 (value 11) is
    // the last one above it.
    std::vector<double> steps{50, 30, 10, 20, 11, 10, 10, 10, 10};
    EXPECT_EQ(convergence_episode(steps, 3), 5u);
    EXPECT_EQ(convergence_episode({10, 10, 10}, 3), 0u);
    EXPECT_EQ(convergence_episode({40}, 10), 0u);
}

TEST(Stats, HistogramBinsAndClamp) {
    HistogramSpec spec{250.0, 0.0, 0.0};
    Histogram h = histogram({10, 260, 510, 600}, spec);
    EXPECT_EQ(h.counts, (std::vector<std::size_t>{1, 1, 2}));
    EXPECT_DOUBLE_EQ(h.bin_start(2), 500.0);
    Histogram clamped = histogram({-5, 5000}, {250.0, 0.0, 500.0});
    EXPECT_EQ(clamped.counts, (std::vector<std::size_t>{1, 0, 1}));
    EXPECT_THROW(histogram({1.0}, {0.0, 0.0, 0.0}), InvalidArgument);
}

TEST(Stats, SummaryCsv) {
    AgentRuns a{"x", {{0, {5, 3}, {0, 1}}, {1, {4, 1}, {0, 1}}}};
    auto rows = summarize({a});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_DOUBLE_EQ(rows[0].median, 2.0);
    EXPECT_DOUBLE_EQ(rows[0].min, 1.0);
    EXPECT_EQ(a.mean_curve(false), (std::vector<double>{4.5, 2.0}));
    std::ostringstream out;
    write_summary_csv(out, rows);
    EXPECT_EQ(out.str(), "agent,runs,mean_duration,median_duration,min_duration,max_duration,median_convergence_episode\n"
                         "x,2,2,2,1,3,1\n");
}

TEST(Svg, NumberFormatting) {
    EXPECT_EQ(svg::num(1.0 / 3.0), "0.33");
    EXPECT_EQ(svg::num(-0.001), "0.00");
    EXPECT_EQ(svg::escape("a<b&\"c\""), "a&lt;b&amp;&quot;c&quot;");
}

TEST(Svg, RenderersAreDeterministic) {
    std::vector<Curve> curves{{"a", {1, 2, 3}}, {"b", {3, 2, 1}}};
    EXPECT_EQ(render_curves(curves, "t", "y"), render_curves(curves, "t", "y"));
    auto s = render_histogram({{"a", {1, 300, 700}}}, {}, "h");
    EXPECT_NE(s.find("a (mean 333.67)"), std::string::npos);
    EXPECT_THROW(render_curves({{"a", {}}}, "t", "y"), InvalidArgument);
}

TEST(Experiments, MazeConfigParsing) {
    Config c = parse(std::string("maze.file = ") + HRL_DATA_DIR + "/fixture_maze.txt\nmaze.episodes = 7\nagents = flat_q\n");
    auto e = parse_maze_experiment(c);
    EXPECT_EQ(e.run.episodes, 7u);
    EXPECT_EQ(e.agents, (std::vector<std::string>{"flat_q"}));
    EXPECT_NO_THROW(c.reject_unused());
    EXPECT_THROW(parse_maze_experiment(parse("maze.file = /nonexistent/maze.txt\n")), ConfigError);
    EXPECT_THROW(parse_maze_experiment(parse(std::string("maze.file = ") + HRL_DATA_DIR +
                                             "/fixture_maze.txt\nagents = bogus\n")),
                 ConfigError);
}

TEST(Experiments, MarketConfigValidation) {
    EXPECT_THROW(parse_market_experiment(parse("dqn.reward = pnl\n")), ConfigError);
    EXPECT_THROW(parse_market_experiment(parse("market.alpha = 2\n")), ConfigError);
    EXPECT_THROW(parse_market_experiment(parse("market.prices = /nonexistent.csv\nmarket.sectors = x\n")), ConfigError);
    auto e = parse_market_experiment(parse("market.length = 50\n"));
    EXPECT_EQ(e.length, 50u);
    EXPECT_DOUBLE_EQ(e.feudal.worker_params.alpha, e.run.params.alpha);
}

TEST(Experiments, RunLogsReadBackForReport) {
    auto dir = scratch("report");
    Config c = parse("market.length = 60\nmarket.train_episodes = 1\ndqn.train_episodes = 1\nagents = random, tabular_q\n");
    auto e = parse_market_experiment(c);
    RunContext ctx{dir, {0, 1}};
    auto runs = run_market_experiment(e, ctx);
    auto back = read_run_logs((dir / "tabular_q.csv").string());
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].agent, "tabular_q");
    EXPECT_EQ(back[0].durations(), runs[1].durations());
    for (const char* f : {"summary.csv", "steps.svg", "reward.svg", "durations.csv", "durations.svg", "random.csv"})
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
    std::filesystem::remove_all(dir);
}

TEST(Experiments, ReadRunLogsRejectsUnknownHeader) {
    auto dir = scratch("badlog");
    std::filesystem::create_directories(dir);
    write_file(dir / "x.csv", "a,b\n1,2\n");
    EXPECT_THROW(read_run_logs((dir / "x.csv").string()), ConfigError);
    std::filesystem::remove_all(dir);
}
