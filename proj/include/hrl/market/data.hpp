#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hrl/error.hpp"

namespace hrl::market {

enum class Sector : std::uint8_t { Technology, Energy, Finance, Healthcare, Utilities, Transportation };

inline constexpr std::array<Sector, 6> kSectors{Sector::Technology, Sector::Energy,    Sector::Finance,
                                                Sector::Healthcare, Sector::Utilities, Sector::Transportation};

inline const char* sector_name(Sector s) {
    switch (s) {
    case Sector::Technology: return "technology";
    case Sector::Energy: return "energy";
    case Sector::Finance: return "finance";
    case Sector::Healthcare: return "healthcare";
    case Sector::Utilities: return "utilities";
    case Sector::Transportation: return "transportation";
    }
    return "?";
}

inline Sector parse_sector(const std::string& name) {
    for (Sector s : kSectors)
        if (name == sector_name(s)) return s;
    throw ParseError("unknown sector '" + name + "'");
}

/// Aligned open-price series, one per symbol, on a shared timestamp index.
/// Immutable once built; symbol order is fixed and used everywhere.
struct MarketData {
    std::vector<std::string> symbols;
    std::vector<Sector> sector_of;
    std::vector<std::vector<double>> opens;
    std::vector<std::string> timestamps;

    std::size_t n_symbols() const noexcept { return symbols.size(); }
    std::size_t length() const noexcept { return timestamps.size(); }

    double open(std::size_t symbol, std::size_t t) const { return opens.at(symbol).at(t); }

    std::vector<double> prices_at(std::size_t t) const {
        std::vector<double> p(n_symbols());
        for (std::size_t i = 0; i < n_symbols(); ++i) p[i] = open(i, t);
        return p;
    }

    std::size_t symbol_index(const std::string& name) const {
        auto it = std::find(symbols.begin(), symbols.end(), name);
        if (it == symbols.end()) throw LookupError("unknown symbol '" + name + "'");
        return static_cast<std::size_t>(it - symbols.begin());
    }

    std::vector<std::size_t> symbols_in(Sector s) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < n_symbols(); ++i)
            if (sector_of[i] == s) out.push_back(i);
        return out;
    }

    void validate() const {
        require(!symbols.empty(), "market data has no symbols");
        require(sector_of.size() == symbols.size() && opens.size() == symbols.size(), "market data shape mismatch");
        require(length() >= 2, "market data needs at least two timestamps");
        for (const auto& series : opens) {
            require(series.size() == length(), "price series lengths differ");
            for (double p : series) require(std::isfinite(p) && p > 0.0, "prices must be positive and finite");
        }
    }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        auto b = field.find_first_not_of(" \t\r");
        auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline bool looks_like_iso_date(const std::string& s) {
    if (s.size() < 10) return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return s[4] == '-' && s[7] == '-';
}

inline double parse_price(const std::string& text, std::size_t line_no) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v))
        throw ParseError("unparseable price '" + text + "' at line " + std::to_string(line_no));
    return v;
}

} // namespace detail

/// Reads `symbol,sector` rows (header required). Order of rows fixes the
/// symbol order.
inline std::vector<std::pair<std::string, Sector>> read_sector_map(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || detail::split_csv_line(line) != std::vector<std::string>{"symbol", "sector"})
        throw ParseError("sector map: expected header 'symbol,sector'");
    std::vector<std::pair<std::string, Sector>> out;
    std::set<std::string> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto f = detail::split_csv_line(line);
        if (f.size() != 2) throw ParseError("sector map: bad row at line " + std::to_string(line_no));
        if (!seen.insert(f[0]).second) throw ParseError("sector map: duplicate symbol '" + f[0] + "'");
        out.emplace_back(f[0], parse_sector(f[1]));
    }
    return out;
}

/// Builds MarketData from a `date,symbol,open` price table and a sector map.
/// Timestamps missing a price for any symbol are dropped for every symbol.
inline MarketData load_market(std::istream& prices, std::istream& sectors) {
    auto sector_rows = read_sector_map(sectors);
    std::map<std::string, Sector> sector_lookup(sector_rows.begin(), sector_rows.end());

    std::string line;
    if (!std::getline(prices, line) || detail::split_csv_line(line) != std::vector<std::string>{"date", "symbol", "open"})
        throw ParseError("price csv: expected header 'date,symbol,open'");
    std::map<std::string, std::map<std::string, double>> by_date;
    std::set<std::string> seen_symbols;
    std::size_t line_no = 1;
    while (std::getline(prices, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto f = detail::split_csv_line(line);
        if (f.size() != 3) throw ParseError("price csv: expected 3 fields at line " + std::to_string(line_no));
        if (!detail::looks_like_iso_date(f[0]))
            throw ParseError("price csv: bad date '" + f[0] + "' at line " + std::to_string(line_no));
        if (!sector_lookup.count(f[1])) throw ParseError("price csv: symbol '" + f[1] + "' missing from sector map");
        seen_symbols.insert(f[1]);
        auto& row = by_date[f[0]];
        if (f[2].empty()) continue;
        double p = detail::parse_price(f[2], line_no);
        if (p <= 0.0) throw ParseError("price csv: non-positive price at line " + std::to_string(line_no));
        row[f[1]] = p;
    }

    MarketData data;
    for (const auto& [sym, sector] : sector_rows) {
        if (!seen_symbols.count(sym)) continue;
        data.symbols.push_back(sym);
        data.sector_of.push_back(sector);
    }
    data.opens.resize(data.symbols.size());
    for (const auto& [date, row] : by_date) {
        if (row.size() != data.symbols.size()) continue;
        data.timestamps.push_back(date);
        for (std::size_t i = 0; i < data.symbols.size(); ++i) data.opens[i].push_back(row.at(data.symbols[i]));
    }
    if (data.symbols.empty()) throw ParseError("price csv: no symbols");
    if (data.length() < 2) throw ParseError("price csv: fewer than two complete timestamps");
    data.validate();
    return data;
}

inline MarketData load_csv(const std::string& price_path, const std::string& sector_map_path) {
    std::ifstream prices(price_path);
    if (!prices) throw ParseError("cannot open price file '" + price_path + "'");
    std::ifstream sectors(sector_map_path);
    if (!sectors) throw ParseError("cannot open sector map '" + sector_map_path + "'");
    return load_market(prices, sectors);
}

inline void write_price_csv(std::ostream& out, const MarketData& data) {
    out << "date,symbol,open\n";
    char buf[64];
    for (std::size_t t = 0; t < data.length(); ++t)
        for (std::size_t i = 0; i < data.n_symbols(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", data.open(i, t));
            out << data.timestamps[t] << ',' << data.symbols[i] << ',' << buf << '\n';
        }
}

inline void write_sector_map(std::ostream& out, const MarketData& data) {
    out << "symbol,sector\n";
    for (std::size_t i = 0; i < data.n_symbols(); ++i) out << data.symbols[i] << ',' << sector_name(data.sector_of[i]) << '\n';
}

/// Consecutive calendar days from 2000-01-01.
inline std::vector<std::string> daily_timestamps(std::size_t n) {
    using namespace std::chrono;
    std::vector<std::string> out;
    out.reserve(n);
    sys_days day = year{2000} / January / 1;
    char buf[16];
    for (std::size_t i = 0; i < n; ++i, day += days{1}) {
        year_month_day ymd{day};
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                      static_cast<unsigned>(ymd.day()));
        out.emplace_back(buf);
    }
    return out;
}

/// Seeded log-normal random walks: log p(t+1) = log p(t) + drift + vol * z.
/// Starting prices are drawn from [20, 60). Symbols SYM0, SYM1, ... go
/// round-robin over the six sectors.
inline MarketData synth_gbm(std::size_t n_symbols, std::size_t length, double drift, double volatility,
                            std::uint64_t seed) {
    require(n_symbols >= 1, "synth_gbm: need at least one symbol");
    require(length >= 2, "synth_gbm: length must be >= 2");
    require(volatility >= 0.0 && std::isfinite(drift), "synth_gbm: bad drift/volatility");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> start(20.0, 60.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    MarketData data;
    data.timestamps = daily_timestamps(length);
    for (std::size_t i = 0; i < n_symbols; ++i) {
        data.symbols.push_back("SYM" + std::to_string(i));
        data.sector_of.push_back(kSectors[i % kSectors.size()]);
        std::vector<double> series(length);
        series[0] = start(rng);
        for (std::size_t t = 1; t < length; ++t) series[t] = series[t - 1] * std::exp(drift + volatility * normal(rng));
        data.opens.push_back(std::move(series));
    }
    return data;
}

/// Trailing mean over the last min(w, i+1) samples.
inline std::vector<double> moving_average(const std::vector<double>& series, std::size_t w) {
    require(w >= 1, "moving_average: window must be >= 1");
    std::vector<double> out(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::size_t n = std::min(w, i + 1);
        double sum = 0.0;
        for (std::size_t j = i + 1 - n; j <= i; ++j) sum += series[j];
        out[i] = sum / static_cast<double>(n);
    }
    return out;
}

/// Mean squared error of predicting each sample by its predecessor.
inline double persistence_mse(const std::vector<double>& series) {
    require(series.size() >= 2, "persistence_mse: need at least two samples");
    double sum = 0.0;
    for (std::size_t i = 1; i < series.size(); ++i) {
        double d = series[i] - series[i - 1];
        sum += d * d;
    }
    return sum / static_cast<double>(series.size() - 1);
}

} // namespace hrl::market
