#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hrl/embed/kmeans.hpp"
#include "hrl/embed/telemetry.hpp"
#include "hrl/embed/tsne.hpp"
#include "hrl/error.hpp"
#include "hrl/harness/config.hpp"
#include "hrl/harness/stats.hpp"
#include "hrl/harness/svg.hpp"
#include "hrl/market/agents.hpp"
#include "hrl/market/data.hpp"
#include "hrl/maze/agents.hpp"
#include "hrl/maze/maze.hpp"

namespace hrl::harness {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void require_file(const std::string& path, const std::string& what) {
    if (!std::filesystem::is_regular_file(path)) throw ConfigError(what + " '" + path + "' does not exist");
}

struct RunContext {
    std::filesystem::path out_dir;
    std::vector<std::uint64_t> seeds;
};

/// Seeds, output directory and CLI overrides shared by every subcommand.
inline RunContext run_context(const Config& cfg, std::optional<std::uint64_t> seed_override,
                              std::optional<std::string> out_override) {
    RunContext ctx;
    ctx.seeds = cfg.get_seeds("seeds", {0});
    if (seed_override) ctx.seeds = {*seed_override};
    if (ctx.seeds.empty()) throw ConfigError("seed list is empty");
    ctx.out_dir = cfg.get_string("out", "out");
    if (out_override) ctx.out_dir = *out_override;
    return ctx;
}

inline void prepare_out_dir(const RunContext& ctx) {
    std::error_code ec;
    std::filesystem::create_directories(ctx.out_dir, ec);
    if (ec) throw Error("cannot create output directory '" + ctx.out_dir.string() + "': " + ec.message());
}

// ---------------------------------------------------------------------------
// Maze

/// Schedule used by the maze experiments: exploration decays to zero so the
/// steps-per-episode curves settle and convergence is measurable.
inline maze::MazeRunConfig maze_preset() {
    maze::MazeRunConfig cfg;
    cfg.params = {0.3, 0.95};
    cfg.schedule = {1.0, 0.98, 0.0};
    cfg.episodes = 500;
    return cfg;
}

struct MazeExperiment {
    maze::MazeSpec spec;
    maze::MazeRunConfig run = maze_preset();
    std::vector<std::string> agents{"flat_q", "feudal_direction", "feudal_quadrant"};
};

inline MazeExperiment parse_maze_experiment(const Config& cfg) {
    MazeExperiment e;
    std::string path = cfg.resolve_path(cfg.require_string("maze.file"));
    require_file(path, "maze file");
    try {
        std::istringstream in(read_file(path));
        e.spec = maze::parse_maze(in);
        e.spec.validate();
    } catch (const InvalidArgument& err) {
        throw ConfigError(std::string("maze file: ") + err.what());
    }
    auto& r = e.run;
    r.episodes = cfg.get_size("maze.episodes", r.episodes);
    r.params.alpha = cfg.get_double("maze.alpha", r.params.alpha);
    r.params.gamma = cfg.get_double("maze.gamma", r.params.gamma);
    r.schedule.epsilon0 = cfg.get_double("maze.epsilon0", r.schedule.epsilon0);
    r.schedule.decay = cfg.get_double("maze.epsilon_decay", r.schedule.decay);
    r.schedule.epsilon_min = cfg.get_double("maze.epsilon_min", r.schedule.epsilon_min);
    r.step_cap = cfg.get_size("maze.step_cap", r.step_cap);
    r.macro_step_cap = cfg.get_size("maze.macro_step_cap", r.macro_step_cap);
    r.disobedience_penalty = cfg.get_double("maze.disobedience_penalty", r.disobedience_penalty);
    e.agents = cfg.get_list("agents", e.agents);
    for (const auto& a : e.agents)
        if (a != "flat_q" && a != "feudal_direction" && a != "feudal_quadrant")
            throw ConfigError("unknown maze agent '" + a + "'");
    try {
        r.validate();
    } catch (const InvalidArgument& err) {
        throw ConfigError(err.what());
    }
    return e;
}

struct MazeAgentResult {
    std::vector<maze::EpisodeLog> fine;
    std::vector<maze::EpisodeLog> manager;
};

inline MazeAgentResult run_maze_agent(const MazeExperiment& e, const std::string& agent, std::uint64_t seed) {
    maze::MazeRunConfig cfg = e.run;
    cfg.seed = seed;
    if (agent == "flat_q") return {maze::run_flat_q(e.spec, cfg).log, {}};
    auto mode = agent == "feudal_direction" ? maze::GoalMode::Direction : maze::GoalMode::Quadrant;
    auto r = maze::run_feudal(e.spec, cfg, mode);
    return {std::move(r.worker), std::move(r.manager)};
}

inline SeedSeries to_series(std::uint64_t seed, const std::vector<maze::EpisodeLog>& log) {
    SeedSeries s{seed, {}, {}};
    for (const auto& e : log) {
        s.steps.push_back(static_cast<double>(e.steps));
        s.reward.push_back(e.reward);
    }
    return s;
}

inline void render_run_reports(const std::vector<AgentRuns>& runs, const RunContext& ctx, const std::string& step_label,
                               const std::string& title) {
    std::ostringstream summary;
    write_summary_csv(summary, summarize(runs));
    write_file(ctx.out_dir / "summary.csv", summary.str());
    std::vector<Curve> steps, reward;
    for (const auto& a : runs) {
        steps.push_back({a.agent, a.mean_curve(false)});
        reward.push_back({a.agent, a.mean_curve(true)});
    }
    write_file(ctx.out_dir / "steps.svg", render_curves(steps, title + ": " + step_label + " per episode", step_label));
    write_file(ctx.out_dir / "reward.svg", render_curves(reward, title + ": reward per episode", "reward"));
}

inline std::vector<AgentRuns> run_maze_experiment(const MazeExperiment& e, const RunContext& ctx) {
    prepare_out_dir(ctx);
    std::vector<AgentRuns> runs;
    for (const auto& agent : e.agents) {
        AgentRuns a{agent, {}};
        std::ostringstream csv;
        maze::write_episode_csv_header(csv);
        for (std::uint64_t seed : ctx.seeds) {
            auto r = run_maze_agent(e, agent, seed);
            maze::write_episode_csv_rows(csv, seed, r.fine);
            maze::write_episode_csv_rows(csv, seed, r.manager);
            a.seeds.push_back(to_series(seed, r.fine));
        }
        write_file(ctx.out_dir / (agent + ".csv"), csv.str());
        runs.push_back(std::move(a));
    }
    render_run_reports(runs, ctx, "steps", "maze");
    return runs;
}

// ---------------------------------------------------------------------------
// Market

inline const std::vector<std::string>& market_agent_names() {
    static const std::vector<std::string> names{"random", "hardcoded", "tabular_q", "dqn",
                                                "feudal", "multiworker_counts", "multiworker_behaviors"};
    return names;
}

struct MarketExperiment {
    bool synthetic = true;
    std::string prices_path;
    std::string sectors_path;
    std::size_t symbols = 6;
    std::size_t length = 4000;
    double drift = 0.0005;
    double volatility = 0.01;
    market::MarketRunConfig run;
    market::ThresholdConfig thresholds;
    market::DqnConfig dqn;
    market::FeudalStockConfig feudal;
    std::vector<std::size_t> worker_counts{1, 3, 5};
    HistogramSpec histogram;
    std::vector<std::string> agents = market_agent_names();
};

inline MarketExperiment parse_market_experiment(const Config& cfg) {
    MarketExperiment e;
    e.synthetic = !cfg.has("market.prices");
    if (!e.synthetic) {
        e.prices_path = cfg.resolve_path(cfg.require_string("market.prices"));
        e.sectors_path = cfg.resolve_path(cfg.require_string("market.sectors"));
        require_file(e.prices_path, "price file");
        require_file(e.sectors_path, "sector map");
    }
    e.symbols = cfg.get_size("market.symbols", e.symbols);
    e.length = cfg.get_size("market.length", e.length);
    e.drift = cfg.get_double("market.drift", e.drift);
    e.volatility = cfg.get_double("market.volatility", e.volatility);

    auto& r = e.run;
    r.env.initial_cash = cfg.get_double("market.initial_cash", r.env.initial_cash);
    r.env.target_multiplier = cfg.get_double("market.target_multiplier", r.env.target_multiplier);
    r.env.shares_per_trade = static_cast<long>(cfg.get_size("market.shares_per_trade", static_cast<std::size_t>(r.env.shares_per_trade)));
    r.params.alpha = cfg.get_double("market.alpha", r.params.alpha);
    r.params.gamma = cfg.get_double("market.gamma", r.params.gamma);
    r.schedule.epsilon0 = cfg.get_double("market.epsilon0", r.schedule.epsilon0);
    r.schedule.decay = cfg.get_double("market.epsilon_decay", r.schedule.decay);
    r.schedule.epsilon_min = cfg.get_double("market.epsilon_min", r.schedule.epsilon_min);
    r.train_episodes = cfg.get_size("market.train_episodes", r.train_episodes);
    r.start_tick = cfg.get_size("market.start_tick", r.start_tick);

    e.thresholds.buy_threshold = cfg.get_double("hardcoded.buy_threshold", e.thresholds.buy_threshold);
    e.thresholds.sell_threshold = cfg.get_double("hardcoded.sell_threshold", e.thresholds.sell_threshold);

    e.dqn.price_window = cfg.get_size("dqn.price_window", e.dqn.price_window);
    e.dqn.buffer_capacity = cfg.get_size("dqn.buffer_capacity", e.dqn.buffer_capacity);
    e.dqn.learning_rate = cfg.get_double("dqn.learning_rate", e.dqn.learning_rate);
    e.dqn.gamma = cfg.get_double("dqn.gamma", e.dqn.gamma);
    e.dqn.train_episodes = cfg.get_size("dqn.train_episodes", e.dqn.train_episodes);
    e.dqn.hidden_sizes = cfg.get_size_list("dqn.hidden_sizes", e.dqn.hidden_sizes);
    std::string reward = cfg.get_string("dqn.reward", "trade");
    if (reward == "trade") e.dqn.reward = market::DqnReward::Trade;
    else if (reward == "position") e.dqn.reward = market::DqnReward::Position;
    else throw ConfigError("dqn.reward must be 'trade' or 'position'");

    e.feudal.worker_steps_per_goal = cfg.get_size("feudal.worker_steps_per_goal", e.feudal.worker_steps_per_goal);
    e.feudal.manager_params = e.feudal.worker_params = r.params;
    e.worker_counts = cfg.get_size_list("multiworker.counts", e.worker_counts);

    e.histogram.bin_width = cfg.get_double("histogram.bin_width", e.histogram.bin_width);
    e.histogram.lo = cfg.get_double("histogram.lo", e.histogram.lo);
    e.histogram.hi = cfg.get_double("histogram.hi", e.histogram.hi);

    e.agents = cfg.get_list("agents", e.agents);
    for (const auto& a : e.agents)
        if (std::find(market_agent_names().begin(), market_agent_names().end(), a) == market_agent_names().end())
            throw ConfigError("unknown market agent '" + a + "'");
    try {
        r.validate();
        e.thresholds.validate();
        e.dqn.validate();
        e.feudal.validate();
        e.histogram.validate();
        require(e.symbols >= 1 && e.length >= r.start_tick + 2, "market data too short for the start tick");
        for (std::size_t c : e.worker_counts) require(c >= 1, "multiworker counts must be >= 1");
    } catch (const InvalidArgument& err) {
        throw ConfigError(err.what());
    }
    return e;
}

/// Market data for one trial: fresh GBM paths per seed, or the loaded CSV.
inline market::MarketData market_data_for(const MarketExperiment& e, std::uint64_t seed) {
    if (e.synthetic) return market::synth_gbm(e.symbols, e.length, e.drift, e.volatility, seed);
    try {
        return market::load_csv(e.prices_path, e.sectors_path);
    } catch (const ParseError& err) {
        throw ConfigError(err.what());
    }
}

inline market::RunLog run_market_agent(const MarketExperiment& e, const std::string& agent,
                                       const market::MarketData& data, std::uint64_t seed) {
    market::MarketRunConfig cfg = e.run;
    cfg.seed = seed;
    if (agent == "random") return market::run_random(data, cfg);
    if (agent == "hardcoded") return market::run_hardcoded(data, cfg, e.thresholds);
    if (agent == "tabular_q") return market::run_tabular_q(data, cfg);
    if (agent == "dqn") return market::run_dqn(data, cfg, e.dqn);
    if (agent == "feudal") return market::run_feudal(data, cfg, e.feudal);
    if (agent == "multiworker_counts") return market::run_multiworker_counts(data, cfg, e.worker_counts);
    if (agent == "multiworker_behaviors") return market::run_multiworker_behaviors(data, cfg);
    throw ConfigError("unknown market agent '" + agent + "'");
}

inline SeedSeries to_series(const market::RunLog& log) {
    SeedSeries s{log.trial, {}, {}};
    for (const auto& ep : log.episodes) {
        s.steps.push_back(static_cast<double>(ep.ticks));
        s.reward.push_back(ep.cumulative_reward);
    }
    return s;
}

inline void write_duration_reports(const std::vector<AgentRuns>& runs, const HistogramSpec& spec, const RunContext& ctx) {
    std::vector<std::pair<std::string, Histogram>> panels;
    std::vector<std::pair<std::string, std::vector<double>>> durations;
    for (const auto& a : runs) {
        panels.emplace_back(a.agent, histogram(a.durations(), spec));
        durations.emplace_back(a.agent, a.durations());
    }
    std::ostringstream csv;
    write_histogram_csv(csv, panels);
    write_file(ctx.out_dir / "durations.csv", csv.str());
    write_file(ctx.out_dir / "durations.svg", render_histogram(durations, spec, "ticks to double per trial"));
}

inline std::vector<AgentRuns> run_market_experiment(const MarketExperiment& e, const RunContext& ctx) {
    prepare_out_dir(ctx);
    std::vector<AgentRuns> runs;
    std::vector<std::ostringstream> csvs(e.agents.size());
    for (std::size_t k = 0; k < e.agents.size(); ++k) {
        runs.push_back({e.agents[k], {}});
        market::write_run_log_header(csvs[k]);
    }
    for (std::uint64_t seed : ctx.seeds) {
        market::MarketData data = market_data_for(e, seed);
        for (std::size_t k = 0; k < e.agents.size(); ++k) {
            market::RunLog log = run_market_agent(e, e.agents[k], data, seed);
            market::write_run_log_rows(csvs[k], log);
            runs[k].seeds.push_back(to_series(log));
        }
    }
    for (std::size_t k = 0; k < e.agents.size(); ++k) write_file(ctx.out_dir / (e.agents[k] + ".csv"), csvs[k].str());
    render_run_reports(runs, ctx, "ticks", "market");
    write_duration_reports(runs, e.histogram, ctx);
    return runs;
}

// ---------------------------------------------------------------------------
// Driving telemetry embedding

struct EmbedExperiment {
    bool synthetic = true;
    std::string telemetry_path;
    std::size_t windows = 300;
    std::size_t clusters = 3;
    double separation = 1.0;
    double noise = 0.5;
    std::size_t m = 10;
    embed::TsneConfig tsne;
    embed::KMeansConfig kmeans;
    double sign_eps = 0.05;
    std::size_t report_examples = 5;
};

inline EmbedExperiment parse_embed_experiment(const Config& cfg) {
    EmbedExperiment e;
    e.synthetic = !cfg.has("embed.telemetry");
    if (!e.synthetic) {
        e.telemetry_path = cfg.resolve_path(cfg.require_string("embed.telemetry"));
        require_file(e.telemetry_path, "telemetry file");
    }
    e.windows = cfg.get_size("embed.windows", e.windows);
    e.clusters = cfg.get_size("embed.clusters", e.clusters);
    e.separation = cfg.get_double("embed.separation", e.separation);
    e.noise = cfg.get_double("embed.noise", e.noise);
    e.m = cfg.get_size("embed.m", e.m);
    e.tsne.perplexity = cfg.get_double("tsne.perplexity", e.tsne.perplexity);
    e.tsne.iterations = cfg.get_size("tsne.iterations", e.tsne.iterations);
    e.tsne.learning_rate = cfg.get_double("tsne.learning_rate", e.tsne.learning_rate);
    e.tsne.exaggeration = cfg.get_double("tsne.exaggeration", e.tsne.exaggeration);
    e.tsne.exaggeration_iters = cfg.get_size("tsne.exaggeration_iters", e.tsne.exaggeration_iters);
    e.kmeans.k = cfg.get_size("kmeans.k", e.kmeans.k);
    e.kmeans.max_iters = cfg.get_size("kmeans.max_iters", e.kmeans.max_iters);
    e.sign_eps = cfg.get_double("embed.sign_eps", e.sign_eps);
    e.report_examples = cfg.get_size("report.examples", e.report_examples);
    try {
        e.tsne.validate();
        require(e.m >= 1, "embed.m must be >= 1");
        require(e.kmeans.k >= 1, "kmeans.k must be >= 1");
        require(e.report_examples >= 1, "report.examples must be >= 1");
        require(e.sign_eps >= 0.0, "embed.sign_eps must be >= 0");
    } catch (const InvalidArgument& err) {
        throw ConfigError(err.what());
    }
    return e;
}

struct EmbedResult {
    std::vector<embed::TelemetryWindow> windows;
    std::vector<std::size_t> labels;
    embed::TsneEmbedding embedding;
    embed::CentroidSet centroids;
};

inline EmbedResult run_embed_seed(const EmbedExperiment& e, std::uint64_t seed) {
    EmbedResult r;
    embed::TelemetrySeries series;
    if (e.synthetic) {
        auto lt = embed::synth_telemetry_clusters(e.windows, e.m, e.clusters, e.separation, e.noise, seed);
        series = std::move(lt.series);
        r.labels = std::move(lt.labels);
    } else {
        try {
            series = embed::load_telemetry(e.telemetry_path);
        } catch (const ParseError& err) {
            throw ConfigError(err.what());
        }
    }
    r.windows = embed::window_telemetry(series, e.m);
    r.embedding = embed::tsne_fit(embed::window_vectors(r.windows), e.tsne, seed);
    r.centroids = embed::kmeans_fit(embed::as_points(r.embedding.coords), e.kmeans, seed);
    return r;
}

inline std::vector<EmbedResult> run_embed_experiment(const EmbedExperiment& e, const RunContext& ctx) {
    prepare_out_dir(ctx);
    std::vector<EmbedResult> results;
    std::ostringstream summary;
    summary.precision(17);
    summary << "seed,windows,initial_kl,final_kl,inertia\n";
    std::vector<Curve> kl_curves;
    for (std::uint64_t seed : ctx.seeds) {
        EmbedResult r = run_embed_seed(e, seed);
        const std::string tag = std::to_string(seed);
        std::ostringstream emb, rep, kl;
        embed::write_embedding_csv(emb, r.embedding, r.centroids, r.windows, e.sign_eps);
        embed::write_report_csv(rep, embed::nearest_windows_report(r.embedding, r.centroids, r.windows, e.report_examples, e.sign_eps));
        kl.precision(17);
        kl << "iteration,kl\n";
        for (std::size_t i = 0; i < r.embedding.kl_trace.size(); ++i) kl << i << ',' << r.embedding.kl_trace[i] << '\n';
        write_file(ctx.out_dir / ("embedding_" + tag + ".csv"), emb.str());
        write_file(ctx.out_dir / ("report_" + tag + ".csv"), rep.str());
        write_file(ctx.out_dir / ("kl_" + tag + ".csv"), kl.str());
        write_file(ctx.out_dir / ("embedding_" + tag + ".svg"),
                   render_scatter(r.embedding.coords, r.centroids.assignment, "t-SNE embedding, seed " + tag));
        summary << seed << ',' << r.windows.size() << ',' << r.embedding.kl_trace.front() << ','
                << r.embedding.kl_trace.back() << ',' << r.centroids.inertia_trace.back() << '\n';
        kl_curves.push_back({"seed " + tag, r.embedding.kl_trace});
        results.push_back(std::move(r));
    }
    write_file(ctx.out_dir / "summary.csv", summary.str());
    write_file(ctx.out_dir / "kl.svg", render_curves(kl_curves, "KL(P||Q) per iteration", "KL"));
    return results;
}

// ---------------------------------------------------------------------------
// Report over existing logs

/// Reads maze episode CSVs (`seed,episode,steps,reward,role`, manager rows
/// skipped) or market run logs (`trial,agent,...`). Maze agents are named
/// after the file stem.
inline std::vector<AgentRuns> read_run_logs(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string header;
    std::getline(in, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    const bool is_maze = header == "seed,episode,steps,reward,role";
    const bool is_market = header == "trial,agent,episode,ticks_to_double,final_value,cumulative_reward";
    if (!is_maze && !is_market) throw ConfigError("'" + path + "' is neither a maze episode log nor a market run log");

    std::map<std::string, std::map<std::uint64_t, SeedSeries>> grouped;
    std::vector<std::string> order;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = detail::split(line, ',');
        try {
            if (is_maze) {
                if (f.size() != 5) throw ConfigError("bad row");
                if (f[4] == "manager") continue;
                std::string agent = std::filesystem::path(path).stem().string();
                auto seed = std::stoull(f[0]);
                if (!grouped.count(agent)) order.push_back(agent);
                auto& s = grouped[agent][seed];
                s.seed = seed;
                s.steps.push_back(std::stod(f[2]));
                s.reward.push_back(std::stod(f[3]));
            } else {
                if (f.size() != 6) throw ConfigError("bad row");
                auto seed = std::stoull(f[0]);
                if (!grouped.count(f[1])) order.push_back(f[1]);
                auto& s = grouped[f[1]][seed];
                s.seed = seed;
                s.steps.push_back(std::stod(f[3]));
                s.reward.push_back(std::stod(f[5]));
            }
        } catch (const std::exception&) {
            throw ConfigError("'" + path + "' line " + std::to_string(line_no) + ": malformed row");
        }
    }
    std::vector<AgentRuns> out;
    for (const auto& name : order) {
        AgentRuns a{name, {}};
        for (auto& [seed, s] : grouped[name]) a.seeds.push_back(std::move(s));
        out.push_back(std::move(a));
    }
    return out;
}

struct ReportExperiment {
    std::vector<std::string> inputs;
    HistogramSpec histogram;
};

inline ReportExperiment parse_report_experiment(const Config& cfg) {
    ReportExperiment e;
    for (const auto& p : cfg.get_list("report.inputs", {})) {
        std::string path = cfg.resolve_path(p);
        require_file(path, "report input");
        e.inputs.push_back(path);
    }
    if (e.inputs.empty()) throw ConfigError("report.inputs lists no files");
    e.histogram.bin_width = cfg.get_double("histogram.bin_width", e.histogram.bin_width);
    e.histogram.lo = cfg.get_double("histogram.lo", e.histogram.lo);
    e.histogram.hi = cfg.get_double("histogram.hi", e.histogram.hi);
    try {
        e.histogram.validate();
    } catch (const InvalidArgument& err) {
        throw ConfigError(err.what());
    }
    return e;
}

inline std::vector<AgentRuns> run_report(const ReportExperiment& e, const RunContext& ctx) {
    std::vector<AgentRuns> runs;
    for (const auto& path : e.inputs)
        for (auto& a : read_run_logs(path)) runs.push_back(std::move(a));
    prepare_out_dir(ctx);
    render_run_reports(runs, ctx, "steps", "report");
    write_duration_reports(runs, e.histogram, ctx);
    return runs;
}

} // namespace hrl::harness
