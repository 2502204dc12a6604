#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hrl/error.hpp"
#include "hrl/market/data.hpp"
#include "hrl/market/environment.hpp"
#include "hrl/nn/adam.hpp"
#include "hrl/nn/mlp.hpp"
#include "hrl/rl/q_learning.hpp"
#include "hrl/rl/q_table.hpp"
#include "hrl/rl/replay_buffer.hpp"

namespace hrl::market {

// ---------------------------------------------------------------------------
// Run bookkeeping

struct MarketEpisode {
    std::size_t episode = 0;
    std::size_t ticks = 0;
    double final_value = 0.0;
    double cumulative_reward = 0.0;
    bool doubled = false;
};

/// Per-episode results of one agent on one trial. The last episode is the
/// trial's reported duration.
struct RunLog {
    std::string agent;
    std::uint64_t trial = 0;
    std::vector<MarketEpisode> episodes;

    std::size_t ticks_to_double() const {
        if (episodes.empty()) throw InvalidArgument("empty run log");
        return episodes.back().ticks;
    }
};

inline void write_run_log_header(std::ostream& out) {
    out << "trial,agent,episode,ticks_to_double,final_value,cumulative_reward\n";
}

inline void write_run_log_rows(std::ostream& out, const RunLog& log) {
    auto prec = out.precision(17);
    for (const auto& e : log.episodes)
        out << log.trial << ',' << log.agent << ',' << e.episode << ',' << e.ticks << ',' << e.final_value << ','
            << e.cumulative_reward << '\n';
    out.precision(prec);
}

/// Learning rate of the market presets. Per-tick value changes are mostly
/// noise, so tables need a long averaging window.
inline constexpr double kMarketAlpha = 0.01;

struct MarketRunConfig {
    EnvConfig env;
    rl::LearningParams params{kMarketAlpha, 0.95};
    rl::ExplorationSchedule schedule{1.0, 0.8, 0.0};
    /// Training episodes before the final greedy (epsilon = 0) episode.
    std::size_t train_episodes = 20;
    /// First tick of every episode; 3 leaves room for the DQN price window.
    std::size_t start_tick = 3;
    std::uint64_t seed = 0;

    std::size_t total_episodes() const { return train_episodes + 1; }
    double epsilon(std::size_t episode) const { return episode >= train_episodes ? 0.0 : schedule.epsilon(episode); }

    void validate() const {
        env.validate();
        params.validate();
        schedule.validate();
    }
};

/// Drives any agent exposing begin_episode(eps), act(env) and
/// observe(env, result) through every episode of a run.
template <typename Agent>
RunLog run_agent(const MarketData& data, const MarketRunConfig& cfg, Agent& agent, std::string name) {
    cfg.validate();
    MarketEnv env(data, cfg.env);
    RunLog log{std::move(name), cfg.seed, {}};
    for (std::size_t ep = 0; ep < cfg.total_episodes(); ++ep) {
        env.reset(cfg.start_tick);
        agent.begin_episode(cfg.epsilon(ep));
        MarketEpisode e{ep, 0, env.value(), 0.0, false};
        while (!env.done()) {
            std::vector<TradeAction> actions = agent.act(env);
            StepResult r = env.step(actions);
            agent.observe(env, r);
            e.cumulative_reward += r.reward;
            e.final_value = r.total_value;
            e.doubled = r.doubled;
        }
        e.ticks = env.ticks_elapsed();
        log.episodes.push_back(e);
    }
    return log;
}

// ---------------------------------------------------------------------------
// Baselines

struct ThresholdConfig {
    double buy_threshold = 0.05;
    double sell_threshold = -0.05;

    void validate() const { require(sell_threshold < 0.0 && 0.0 < buy_threshold, "need sell_threshold < 0 < buy_threshold"); }
};

/// Buy when the open rose by more than buy_threshold, sell when it fell past
/// sell_threshold, hold otherwise.
inline TradeAction hardcoded_policy(const ThresholdConfig& cfg, double price_change) {
    if (price_change > cfg.buy_threshold) return TradeAction::Buy;
    if (price_change < cfg.sell_threshold) return TradeAction::Sell;
    return TradeAction::Hold;
}

class HardcodedTrader {
public:
    explicit HardcodedTrader(ThresholdConfig cfg) : cfg_(cfg) { cfg_.validate(); }
    void begin_episode(double) {}
    std::vector<TradeAction> act(const MarketEnv& env) const {
        const auto& d = env.data();
        std::vector<TradeAction> out(d.n_symbols(), TradeAction::Hold);
        std::size_t t = env.tick();
        if (t == 0) return out;
        for (std::size_t i = 0; i < d.n_symbols(); ++i) out[i] = hardcoded_policy(cfg_, d.open(i, t) - d.open(i, t - 1));
        return out;
    }
    void observe(const MarketEnv&, const StepResult&) {}

private:
    ThresholdConfig cfg_;
};

class RandomTrader {
public:
    explicit RandomTrader(std::uint64_t seed) : rng_(seed) {}
    void begin_episode(double) {}
    std::vector<TradeAction> act(const MarketEnv& env) {
        std::vector<TradeAction> out(env.data().n_symbols());
        for (auto& a : out) a = static_cast<TradeAction>(rl::uniform_index(rng_, kTradeActions));
        return out;
    }
    void observe(const MarketEnv&, const StepResult&) {}

private:
    rl::Rng rng_;
};

inline RunLog run_hardcoded(const MarketData& data, const MarketRunConfig& cfg, const ThresholdConfig& thresholds = {}) {
    HardcodedTrader agent(thresholds);
    return run_agent(data, cfg, agent, "hardcoded");
}

inline RunLog run_random(const MarketData& data, const MarketRunConfig& cfg) {
    RandomTrader agent(cfg.seed);
    return run_agent(data, cfg, agent, "random");
}

// ---------------------------------------------------------------------------
// Tabular Q

/// Row of the four-state table: price up/down crossed with holding or not.
inline rl::StateId tabular_state(Trend trend, bool has_shares) {
    if (trend == Trend::Up) return has_shares ? 0 : 1;
    return has_shares ? 2 : 3;
}

inline constexpr std::size_t kTabularStates = 4;

/// One 4x3 Q-table per symbol. `act_on` restricts which symbols it trades;
/// the rest hold and are not updated.
class TabularTrader {
public:
    TabularTrader(std::size_t n_symbols, rl::LearningParams params, std::uint64_t seed)
        : params_(params), rng_(seed), tables_(n_symbols, rl::QTable(kTabularStates, kTradeActions)),
          pending_(n_symbols) {}

    void begin_episode(double epsilon) {
        epsilon_ = epsilon;
        std::fill(pending_.begin(), pending_.end(), std::nullopt);
    }

    static rl::StateId state_of(const MarketEnv& env, std::size_t symbol) {
        return tabular_state(trend_state(env.data(), symbol, env.tick()), env.portfolio().shares[symbol] > 0);
    }

    std::vector<TradeAction> act(const MarketEnv& env, const std::vector<bool>* act_on = nullptr) {
        std::vector<TradeAction> out(tables_.size(), TradeAction::Hold);
        for (std::size_t i = 0; i < tables_.size(); ++i) {
            pending_[i].reset();
            if (act_on && !(*act_on)[i]) continue;
            rl::StateId s = state_of(env, i);
            rl::ActionId a = rl::select_action(tables_[i], s, epsilon_, rng_);
            pending_[i] = Pending{s, a};
            out[i] = static_cast<TradeAction>(a);
        }
        return out;
    }

    /// Applies per-symbol rewards to the symbols that acted last tick.
    void observe(const MarketEnv& env, const StepResult& r, std::span<const double> rewards) {
        for (std::size_t i = 0; i < tables_.size(); ++i) {
            if (!pending_[i]) continue;
            rl::q_update(tables_[i], params_, {pending_[i]->s, pending_[i]->a, rewards[i], state_of(env, i), r.done});
        }
    }

    void observe(const MarketEnv& env, const StepResult& r) { observe(env, r, r.symbol_rewards); }

    const std::vector<rl::QTable>& tables() const noexcept { return tables_; }

private:
    struct Pending {
        rl::StateId s;
        rl::ActionId a;
    };
    rl::LearningParams params_;
    rl::Rng rng_;
    double epsilon_ = 0.0;
    std::vector<rl::QTable> tables_;
    std::vector<std::optional<Pending>> pending_;
};

inline RunLog run_tabular_q(const MarketData& data, const MarketRunConfig& cfg, std::vector<rl::QTable>* tables_out = nullptr) {
    TabularTrader agent(data.n_symbols(), cfg.params, cfg.seed);
    RunLog log = run_agent(data, cfg, agent, "tabular_q");
    if (tables_out) *tables_out = agent.tables();
    return log;
}

// ---------------------------------------------------------------------------
// DQN

/// Reward stored with each DQN transition. Trade: value change the executed
/// trade itself caused over the next tick (the network never sees holdings).
/// Position: value change of the whole position in that symbol.
enum class DqnReward : std::uint8_t { Trade, Position };

struct DqnConfig {
    std::size_t price_window = 3;
    DqnReward reward = DqnReward::Trade;
    std::vector<std::size_t> hidden_sizes{32, 64, 64};
    std::size_t buffer_capacity = 10000;
    double learning_rate = 1e-3;
    double gamma = 0.95;
    /// Replaces MarketRunConfig::train_episodes for this agent.
    std::size_t train_episodes = 8;

    void validate() const {
        require(price_window >= 1, "price window must be >= 1");
        require(buffer_capacity >= 1, "buffer capacity must be >= 1");
        require(gamma >= 0.0 && gamma < 1.0, "gamma must lie in [0,1)");
    }

    nn::MlpSpec network(std::size_t n_symbols) const {
        nn::MlpSpec spec;
        spec.layer_sizes.push_back(price_window * n_symbols + n_symbols);
        for (std::size_t h : hidden_sizes) spec.layer_sizes.push_back(h);
        spec.layer_sizes.push_back(kTradeActions);
        return spec;
    }
};

/// Last `window` opens before t for every symbol (symbol-major), each
/// divided by that symbol's normalizer.
inline std::vector<double> dqn_encode_state(const MarketData& data, std::size_t t, std::span<const double> normalizer,
                                            std::size_t window = 3) {
    if (t < window) throw InvalidArgument("dqn_encode_state: t must be >= price window");
    if (t > data.length()) throw InvalidArgument("dqn_encode_state: t beyond data");
    if (normalizer.size() != data.n_symbols()) throw InvalidArgument("dqn_encode_state: one normalizer per symbol");
    std::vector<double> out;
    out.reserve(window * data.n_symbols());
    for (std::size_t i = 0; i < data.n_symbols(); ++i)
        for (std::size_t k = t - window; k < t; ++k) out.push_back(data.open(i, k) / normalizer[i]);
    return out;
}

/// Each symbol's first price in the data.
inline std::vector<double> first_price_normalizer(const MarketData& data) {
    std::vector<double> n(data.n_symbols());
    for (std::size_t i = 0; i < n.size(); ++i) n[i] = data.open(i, 0);
    return n;
}

struct DqnTransition {
    std::vector<double> s0;
    std::size_t a = 0;
    double r = 0.0;
    std::vector<double> s;
    bool done = false;
};

/// One network shared by all symbols; the input is the encoded price window
/// plus a one-hot of the symbol being decided.
class DqnTrader {
public:
    DqnTrader(const MarketData& data, DqnConfig cfg, std::uint64_t seed)
        : cfg_((cfg.validate(), std::move(cfg))), spec_(cfg_.network(data.n_symbols())),
          params_(nn::init_params(spec_, seed)), adam_(nn::AdamState::for_spec(spec_, cfg_.learning_rate)),
          buffer_(cfg_.buffer_capacity), rng_(seed ^ 0xD1B54A32D192ED03ULL), normalizer_(first_price_normalizer(data)),
          pending_(data.n_symbols()), grads_(nn::MlpParams::zeros(spec_)) {}

    void begin_episode(double epsilon) {
        epsilon_ = epsilon;
        std::fill(pending_.begin(), pending_.end(), std::nullopt);
    }

    std::vector<double> input(const MarketData& data, std::size_t t, std::size_t symbol) const {
        std::vector<double> x = dqn_encode_state(data, t, normalizer_, cfg_.price_window);
        for (std::size_t i = 0; i < data.n_symbols(); ++i) x.push_back(i == symbol ? 1.0 : 0.0);
        return x;
    }

    std::vector<TradeAction> act(const MarketEnv& env) {
        const auto& d = env.data();
        std::vector<TradeAction> out(d.n_symbols());
        for (std::size_t i = 0; i < d.n_symbols(); ++i) {
            std::vector<double> x = input(d, env.tick(), i);
            std::size_t a;
            if (rl::uniform01(rng_) < epsilon_) {
                a = rl::uniform_index(rng_, kTradeActions);
            } else {
                nn::forward_trace_into(params_, spec_, x, trace_);
                const auto& q = trace_.output;
                a = 0;
                for (std::size_t k = 1; k < q.size(); ++k)
                    if (q[k] > q[a]) a = k;
            }
            pending_[i] = Pending{std::move(x), a};
            out[i] = static_cast<TradeAction>(a);
        }
        return out;
    }

    void observe(const MarketEnv& env, const StepResult& r) {
        const auto& d = env.data();
        for (std::size_t i = 0; i < d.n_symbols(); ++i) {
            if (!pending_[i]) continue;
            double reward = r.symbol_rewards[i];
            if (cfg_.reward == DqnReward::Trade) {
                const double dp = d.open(i, env.tick()) - d.open(i, env.tick() - 1);
                const double q = static_cast<double>(env.config().shares_per_trade);
                reward = r.executed[i] == TradeAction::Buy ? q * dp : r.executed[i] == TradeAction::Sell ? -q * dp : 0.0;
            }
            buffer_.push({std::move(pending_[i]->x), pending_[i]->a, reward, input(d, env.tick(), i), r.done});
            pending_[i].reset();
        }
        if (epsilon_ > 0.0 || training_in_greedy_) train_step();
    }

    /// One sampled transition, one Adam step. Skipped while the buffer is empty.
    bool train_step() {
        if (buffer_.empty()) return false;
        const DqnTransition& t = buffer_.sample(rng_);
        double target = t.r;
        if (!t.done) {
            nn::forward_trace_into(params_, spec_, t.s, trace_);
            double best = trace_.output[0];
            for (double v : trace_.output) best = std::max(best, v);
            target += cfg_.gamma * best;
        }
        nn::forward_trace_into(params_, spec_, t.s0, trace_);
        std::vector<double> grad_out(kTradeActions, 0.0);
        grad_out[t.a] = 2.0 * (trace_.output[t.a] - target);
        nn::backward_into(params_, trace_, grad_out, grads_, delta_, upstream_);
        nn::adam_step(adam_, params_, grads_);
        ++updates_;
        return true;
    }

    void set_train_when_greedy(bool on) { training_in_greedy_ = on; }
    const nn::MlpSpec& spec() const noexcept { return spec_; }
    const nn::MlpParams& params() const noexcept { return params_; }
    const rl::ReplayBuffer<DqnTransition>& buffer() const noexcept { return buffer_; }
    std::size_t updates() const noexcept { return updates_; }

private:
    struct Pending {
        std::vector<double> x;
        std::size_t a;
    };
    DqnConfig cfg_;
    nn::MlpSpec spec_;
    nn::MlpParams params_;
    nn::AdamState adam_;
    rl::ReplayBuffer<DqnTransition> buffer_;
    rl::Rng rng_;
    std::vector<double> normalizer_;
    std::vector<std::optional<Pending>> pending_;
    double epsilon_ = 0.0;
    bool training_in_greedy_ = false;
    std::size_t updates_ = 0;
    nn::ForwardTrace trace_;
    nn::MlpParams grads_;
    std::vector<double> delta_, upstream_;
};

inline RunLog run_dqn(const MarketData& data, const MarketRunConfig& cfg, const DqnConfig& dqn = {}) {
    DqnTrader agent(data, dqn, cfg.seed);
    MarketRunConfig c = cfg;
    c.train_episodes = dqn.train_episodes;
    return run_agent(data, c, agent, "dqn");
}

// ---------------------------------------------------------------------------
// Feudal

struct FeudalStockConfig {
    /// Ticks the worker trades under one manager goal.
    std::size_t worker_steps_per_goal = 5;
    rl::LearningParams manager_params{kMarketAlpha, 0.95};
    rl::LearningParams worker_params{kMarketAlpha, 0.95};

    void validate() const {
        require(worker_steps_per_goal >= 1, "worker steps per goal must be >= 1");
        manager_params.validate();
        worker_params.validate();
    }
};

/// Up iff the summed open of the sector's symbols rose.
inline Trend sector_trend(const MarketData& data, Sector sector, std::size_t t) {
    if (t == 0) throw InvalidArgument("sector_trend: t must be >= 1");
    double now = 0.0, before = 0.0;
    for (std::size_t i : data.symbols_in(sector)) {
        now += data.open(i, t);
        before += data.open(i, t - 1);
    }
    return now > before ? Trend::Up : Trend::Down;
}

enum class SectorGoal : std::uint8_t { Trade = 0, Skip = 1 };

/// Manager: one two-action learner per sector, keyed on that sector's trend,
/// re-deciding every k ticks. The resulting sector mask is the goal vector.
/// Worker: per-symbol four-state tabular learners trading only inside masked sectors,
/// rewarded with its sector's value change each tick. The manager is
/// rewarded with the total value change over its k-tick span.
class FeudalTrader {
public:
    FeudalTrader(const MarketData& data, FeudalStockConfig cfg, std::uint64_t seed)
        : cfg_((cfg.validate(), cfg)), worker_(data.n_symbols(), cfg_.worker_params, seed),
          managers_(kSectors.size(), rl::QTable(2, 2)), rng_(seed ^ 0x94D049BB133111EBULL) {}

    void begin_episode(double epsilon) {
        epsilon_ = epsilon;
        worker_.begin_episode(epsilon);
        remaining_ = 0;
        span_reward_ = 0.0;
        decided_ = false;
    }

    std::vector<TradeAction> act(const MarketEnv& env) {
        const auto& d = env.data();
        if (remaining_ == 0) decide(d, env.tick());
        --remaining_;
        std::vector<bool> act_on(d.n_symbols());
        for (std::size_t i = 0; i < d.n_symbols(); ++i)
            act_on[i] = goals_[static_cast<std::size_t>(d.sector_of[i])] == SectorGoal::Trade;
        return worker_.act(env, &act_on);
    }

    void observe(const MarketEnv& env, const StepResult& r) {
        const auto& d = env.data();
        std::vector<double> sector_reward(kSectors.size(), 0.0);
        for (std::size_t i = 0; i < d.n_symbols(); ++i)
            sector_reward[static_cast<std::size_t>(d.sector_of[i])] += r.symbol_rewards[i];
        std::vector<double> rewards(d.n_symbols());
        for (std::size_t i = 0; i < d.n_symbols(); ++i) rewards[i] = sector_reward[static_cast<std::size_t>(d.sector_of[i])];
        worker_.observe(env, r, rewards);

        span_reward_ += r.reward;
        if (remaining_ == 0 || r.done) update_managers(d, env.tick(), r.done);
    }

    const std::array<SectorGoal, 6>& goals() const noexcept { return goals_; }
    const std::vector<rl::QTable>& manager_tables() const noexcept { return managers_; }
    const TabularTrader& worker() const noexcept { return worker_; }

private:
    void decide(const MarketData& d, std::size_t t) {
        for (std::size_t k = 0; k < kSectors.size(); ++k) {
            if (d.symbols_in(kSectors[k]).empty()) {
                goals_[k] = SectorGoal::Skip;
                continue;
            }
            rl::StateId s = sector_trend(d, kSectors[k], t) == Trend::Up ? 0 : 1;
            rl::ActionId a = rl::select_action(managers_[k], s, epsilon_, rng_);
            states_[k] = s;
            goals_[k] = static_cast<SectorGoal>(a);
        }
        remaining_ = cfg_.worker_steps_per_goal;
        span_reward_ = 0.0;
        decided_ = true;
    }

    void update_managers(const MarketData& d, std::size_t t, bool done) {
        if (!decided_) return;
        for (std::size_t k = 0; k < kSectors.size(); ++k) {
            if (d.symbols_in(kSectors[k]).empty()) continue;
            rl::StateId next = sector_trend(d, kSectors[k], t) == Trend::Up ? 0 : 1;
            rl::q_update(managers_[k], cfg_.manager_params,
                         {states_[k], static_cast<rl::ActionId>(goals_[k]), span_reward_, next, done});
        }
        decided_ = false;
        remaining_ = 0;
    }

    FeudalStockConfig cfg_;
    TabularTrader worker_;
    std::vector<rl::QTable> managers_;
    rl::Rng rng_;
    double epsilon_ = 0.0;
    std::array<SectorGoal, 6> goals_{};
    std::array<rl::StateId, 6> states_{};
    std::size_t remaining_ = 0;
    double span_reward_ = 0.0;
    bool decided_ = false;
};

inline RunLog run_feudal(const MarketData& data, const MarketRunConfig& cfg, const FeudalStockConfig& feudal = {}) {
    FeudalTrader agent(data, feudal, cfg.seed);
    return run_agent(data, cfg, agent, "feudal");
}

// ---------------------------------------------------------------------------
// One manager, several workers

/// Up iff more than half of the symbols rose this tick.
inline Trend majority_trend(const MarketData& data, std::size_t t) {
    std::size_t up = 0;
    for (std::size_t i = 0; i < data.n_symbols(); ++i) up += trend_state(data, i, t) == Trend::Up;
    return 2 * up > data.n_symbols() ? Trend::Up : Trend::Down;
}

inline rl::StateId trend_id(Trend t) { return t == Trend::Up ? 0 : 1; }

/// The manager picks which tabular worker trades next; worker j then trades
/// for counts[j] consecutive ticks before control returns.
class MultiWorkerCountsTrader {
public:
    MultiWorkerCountsTrader(const MarketData& data, std::vector<std::size_t> counts, rl::LearningParams params,
                            std::uint64_t seed)
        : counts_(std::move(counts)), params_(params), manager_(2, counts_.size()), rng_(seed ^ 0xBF58476D1CE4E5B9ULL) {
        require(!counts_.empty(), "need at least one worker");
        for (std::size_t i = 0; i < counts_.size(); ++i) {
            require(counts_[i] >= 1, "transaction counts must be >= 1");
            for (std::size_t j = 0; j < i; ++j) require(counts_[i] != counts_[j], "transaction counts must be distinct");
            workers_.emplace_back(data.n_symbols(), params, seed + 1 + i);
        }
    }

    void begin_episode(double epsilon) {
        epsilon_ = epsilon;
        for (auto& w : workers_) w.begin_episode(epsilon);
        remaining_ = 0;
        active_.reset();
    }

    std::vector<TradeAction> act(const MarketEnv& env) {
        if (remaining_ == 0) {
            state_ = trend_id(majority_trend(env.data(), env.tick()));
            active_ = rl::select_action(manager_, state_, epsilon_, rng_);
            remaining_ = counts_[*active_];
            span_reward_ = 0.0;
            span_ticks_ = 0;
            decision_ticks_.push_back(env.tick());
        }
        --remaining_;
        return workers_[*active_].act(env);
    }

    void observe(const MarketEnv& env, const StepResult& r) {
        workers_[*active_].observe(env, r);
        span_reward_ += r.reward;
        ++span_ticks_;
        if (remaining_ == 0 || r.done) {
            rl::q_update(manager_, params_,
                         {state_, *active_, span_reward_, trend_id(majority_trend(env.data(), env.tick())), r.done});
            spans_.push_back(span_ticks_);
            remaining_ = 0;
        }
    }

    /// Ticks consumed by each completed manager decision.
    const std::vector<std::size_t>& spans() const noexcept { return spans_; }
    const std::vector<std::size_t>& counts() const noexcept { return counts_; }

private:
    std::vector<std::size_t> counts_;
    rl::LearningParams params_;
    rl::QTable manager_;
    std::vector<TabularTrader> workers_;
    rl::Rng rng_;
    double epsilon_ = 0.0;
    std::optional<rl::ActionId> active_;
    rl::StateId state_ = 0;
    std::size_t remaining_ = 0;
    double span_reward_ = 0.0;
    std::size_t span_ticks_ = 0;
    std::vector<std::size_t> spans_;
    std::vector<std::size_t> decision_ticks_;
};

inline RunLog run_multiworker_counts(const MarketData& data, const MarketRunConfig& cfg,
                                     std::vector<std::size_t> counts = {1, 3, 5}) {
    MultiWorkerCountsTrader agent(data, std::move(counts), cfg.params, cfg.seed);
    return run_agent(data, cfg, agent, "multiworker_counts");
}

enum class WorkerBehavior : std::uint8_t { Momentum = 0, Contrarian = 1, Random = 2 };

/// Fixed worker rules. Momentum buys rising symbols and sells falling ones,
/// Contrarian does the reverse, Random draws uniformly.
inline TradeAction behavior_action(WorkerBehavior b, Trend trend, rl::Rng& rng) {
    switch (b) {
    case WorkerBehavior::Momentum: return trend == Trend::Up ? TradeAction::Buy : TradeAction::Sell;
    case WorkerBehavior::Contrarian: return trend == Trend::Up ? TradeAction::Sell : TradeAction::Buy;
    case WorkerBehavior::Random: return static_cast<TradeAction>(rl::uniform_index(rng, kTradeActions));
    }
    return TradeAction::Hold;
}

/// The manager picks one of the three fixed workers every tick.
class MultiWorkerBehaviorsTrader {
public:
    MultiWorkerBehaviorsTrader(rl::LearningParams params, std::uint64_t seed)
        : params_(params), manager_(2, 3), rng_(seed), worker_rng_(seed ^ 0x2545F4914F6CDD1DULL) {}

    void begin_episode(double epsilon) { epsilon_ = epsilon; }

    std::vector<TradeAction> act(const MarketEnv& env) {
        const auto& d = env.data();
        state_ = trend_id(majority_trend(d, env.tick()));
        choice_ = rl::select_action(manager_, state_, epsilon_, rng_);
        std::vector<TradeAction> out(d.n_symbols());
        for (std::size_t i = 0; i < d.n_symbols(); ++i)
            out[i] = behavior_action(static_cast<WorkerBehavior>(choice_), trend_state(d, i, env.tick()), worker_rng_);
        return out;
    }

    void observe(const MarketEnv& env, const StepResult& r) {
        rl::q_update(manager_, params_, {state_, choice_, r.reward, trend_id(majority_trend(env.data(), env.tick())), r.done});
    }

    const rl::QTable& manager() const noexcept { return manager_; }

private:
    rl::LearningParams params_;
    rl::QTable manager_;
    rl::Rng rng_;
    rl::Rng worker_rng_;
    double epsilon_ = 0.0;
    rl::StateId state_ = 0;
    rl::ActionId choice_ = 0;
};

inline RunLog run_multiworker_behaviors(const MarketData& data, const MarketRunConfig& cfg) {
    MultiWorkerBehaviorsTrader agent(cfg.params, cfg.seed);
    return run_agent(data, cfg, agent, "multiworker_behaviors");
}

} // namespace hrl::market
