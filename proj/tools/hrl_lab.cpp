#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hrl/error.hpp"
#include "hrl/harness/config.hpp"
#include "hrl/harness/experiments.hpp"

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Options& opt) {
    cmd->add_option("--config", opt.config, "key = value experiment config")->required();
    cmd->add_option("--seed", opt.seed, "run this single seed instead of the config's seed list");
    cmd->add_option("--out", opt.out, "output directory (overrides 'out')");
    cmd->add_option("--set", opt.overrides, "override a config entry, key=value (repeatable)");
}

int run(const std::string& command, const Options& opt) {
    using namespace hrl::harness;
    Config cfg = Config::load(opt.config);
    for (const auto& o : opt.overrides) cfg.set_override(o);
    std::string declared = cfg.get_string("experiment", command);
    if (declared != command)
        throw hrl::ConfigError("config is for '" + declared + "' but the '" + command + "' command was given");

    RunContext ctx = run_context(cfg, opt.seed, opt.out);
    if (command == "maze") {
        auto e = parse_maze_experiment(cfg);
        cfg.reject_unused();
        for (const auto& row : summarize(run_maze_experiment(e, ctx)))
            std::cout << row.agent << ": median final steps " << row.median << ", median convergence episode "
                      << row.median_convergence << '\n';
    } else if (command == "market") {
        auto e = parse_market_experiment(cfg);
        cfg.reject_unused();
        for (const auto& row : summarize(run_market_experiment(e, ctx)))
            std::cout << row.agent << ": median ticks to double " << row.median << " (mean " << row.mean << ")\n";
    } else if (command == "embed") {
        auto e = parse_embed_experiment(cfg);
        cfg.reject_unused();
        for (const auto& r : run_embed_experiment(e, ctx))
            std::cout << r.windows.size() << " windows, KL " << r.embedding.kl_trace.front() << " -> "
                      << r.embedding.kl_trace.back() << '\n';
    } else {
        auto e = parse_report_experiment(cfg);
        cfg.reject_unused();
        run_report(e, ctx);
    }
    std::cout << "wrote " << ctx.out_dir.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical RL experiments: maze, market, telemetry embedding"};
    app.require_subcommand(1);
    Options opt;
    std::string command;
    for (const char* name : {"maze", "market", "embed", "report"}) {
        auto* cmd = app.add_subcommand(name, std::string("run the ") + name + " experiment");
        add_common(cmd, opt);
        cmd->callback([&command, name] { command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return run(command, opt);
    } catch (const hrl::ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
