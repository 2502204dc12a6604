#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hrl/error.hpp"
#include "hrl/market/data.hpp"

namespace hrl::market {

/// Action order matches the Q-table columns: Buy, Hold, Sell.
enum class TradeAction : std::uint8_t { Buy = 0, Hold = 1, Sell = 2 };
inline constexpr std::size_t kTradeActions = 3;

inline const char* action_name(TradeAction a) {
    switch (a) {
    case TradeAction::Buy: return "buy";
    case TradeAction::Hold: return "hold";
    case TradeAction::Sell: return "sell";
    }
    return "?";
}

enum class Trend : std::uint8_t { Up, Down };

/// Up iff open(t) > open(t-1); a flat tick counts as Down.
inline Trend trend_state(const MarketData& data, std::size_t symbol, std::size_t t) {
    if (t == 0) throw InvalidArgument("trend_state: t must be >= 1");
    return data.open(symbol, t) > data.open(symbol, t - 1) ? Trend::Up : Trend::Down;
}

struct Portfolio {
    double cash = 0.0;
    std::vector<long> shares;
};

inline double portfolio_value(const Portfolio& p, std::span<const double> prices) {
    if (prices.size() != p.shares.size()) throw InvalidArgument("portfolio_value: missing price for a held symbol");
    double v = p.cash;
    for (std::size_t i = 0; i < prices.size(); ++i) v += static_cast<double>(p.shares[i]) * prices[i];
    return v;
}

/// Marked-to-market value of the holdings in one sector; cash excluded.
inline double sector_value(const Portfolio& p, const MarketData& data, Sector sector, std::span<const double> prices) {
    if (prices.size() != p.shares.size()) throw InvalidArgument("sector_value: price vector has the wrong length");
    double v = 0.0;
    for (std::size_t i = 0; i < prices.size(); ++i)
        if (data.sector_of.at(i) == sector) v += static_cast<double>(p.shares[i]) * prices[i];
    return v;
}

struct EnvConfig {
    double initial_cash = 1000.0;
    double target_multiplier = 2.0;
    long shares_per_trade = 1;

    void validate() const {
        require(initial_cash > 0.0, "initial cash must be > 0");
        require(target_multiplier > 1.0, "target multiplier must be > 1");
        require(shares_per_trade >= 1, "shares per trade must be >= 1");
    }
};

struct StepResult {
    std::vector<TradeAction> executed;
    /// Value change of each symbol's position across the tick.
    std::vector<double> symbol_rewards;
    double reward = 0.0;
    double total_value = 0.0;
    bool done = false;
    bool doubled = false;
};

/// Buy/hold/sell market over one MarketData. Trades fill at open(t), the
/// clock then advances to t+1 and the portfolio is revalued at the new opens.
class MarketEnv {
public:
    MarketEnv(const MarketData& data, EnvConfig cfg) : data_(data), cfg_(cfg) {
        data_.validate();
        cfg_.validate();
        reset(0);
    }

    void reset(std::size_t start_tick) {
        require(start_tick + 1 < data_.length(), "start tick leaves no room to trade");
        portfolio_ = Portfolio{cfg_.initial_cash, std::vector<long>(data_.n_symbols(), 0)};
        t_ = start_tick;
        start_ = start_tick;
        done_ = false;
    }

    const MarketData& data() const noexcept { return data_; }
    const EnvConfig& config() const noexcept { return cfg_; }
    const Portfolio& portfolio() const noexcept { return portfolio_; }
    std::size_t tick() const noexcept { return t_; }
    std::size_t ticks_elapsed() const noexcept { return t_ - start_; }
    bool done() const noexcept { return done_; }

    double value() const { return portfolio_value(portfolio_, data_.prices_at(t_)); }
    double target_value() const { return cfg_.target_multiplier * cfg_.initial_cash; }

    /// Symbols are processed in index order; unaffordable buys and sells
    /// without enough shares are coerced to Hold.
    StepResult step(std::span<const TradeAction> actions) {
        if (done_) throw InvalidArgument("market episode already finished");
        if (actions.size() != data_.n_symbols()) throw InvalidArgument("one action per symbol is required");
        if (t_ + 1 >= data_.length()) throw InvalidArgument("no price data after the current tick");

        const auto now = data_.prices_at(t_);
        const auto next = data_.prices_at(t_ + 1);
        const double before = portfolio_value(portfolio_, now);
        const long q = cfg_.shares_per_trade;

        StepResult r;
        r.executed.assign(actions.begin(), actions.end());
        for (std::size_t i = 0; i < actions.size(); ++i) {
            const double cost = static_cast<double>(q) * now[i];
            if (actions[i] == TradeAction::Buy) {
                if (portfolio_.cash >= cost) {
                    portfolio_.cash -= cost;
                    portfolio_.shares[i] += q;
                } else {
                    r.executed[i] = TradeAction::Hold;
                }
            } else if (actions[i] == TradeAction::Sell) {
                if (portfolio_.shares[i] >= q) {
                    portfolio_.cash += cost;
                    portfolio_.shares[i] -= q;
                } else {
                    r.executed[i] = TradeAction::Hold;
                }
            }
        }
        ++t_;
        r.symbol_rewards.resize(actions.size());
        for (std::size_t i = 0; i < actions.size(); ++i)
            r.symbol_rewards[i] = static_cast<double>(portfolio_.shares[i]) * (next[i] - now[i]);
        r.total_value = portfolio_value(portfolio_, next);
        r.reward = r.total_value - before;
        r.doubled = r.total_value >= target_value();
        r.done = r.doubled || t_ + 1 >= data_.length();
        done_ = r.done;
        return r;
    }

private:
    const MarketData& data_;
    EnvConfig cfg_;
    Portfolio portfolio_;
    std::size_t t_ = 0;
    std::size_t start_ = 0;
    bool done_ = false;
};

} // namespace hrl::market
