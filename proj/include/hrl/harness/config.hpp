#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hrl/error.hpp"

namespace hrl::harness {

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

} // namespace detail

/// Flat `key = value` configuration. `#` starts a comment. Keys are read
/// through typed getters with defaults; anything never read is reported by
/// unused_keys() so typos fail loudly.
class Config {
public:
    Config() = default;

    static Config parse(std::istream& in, const std::string& origin = "<config>") {
        Config cfg;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = detail::trim(line);
            if (line.empty()) continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
            std::string key = detail::trim(line.substr(0, eq));
            std::string value = detail::trim(line.substr(eq + 1));
            if (key.empty()) throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
            if (cfg.values_.count(key)) throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        Config cfg = parse(in, path);
        cfg.base_dir_ = std::filesystem::path(path).parent_path();
        return cfg;
    }

    /// Command-line override in `key=value` form.
    void set_override(const std::string& assignment) {
        auto eq = assignment.find('=');
        if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
        set(detail::trim(assignment.substr(0, eq)), detail::trim(assignment.substr(eq + 1)));
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        used_.insert(key);
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    std::string require_string(const std::string& key) const {
        used_.insert(key);
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
        return it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        if (!has(key)) {
            used_.insert(key);
            return fallback;
        }
        std::string v = get_string(key, "");
        std::size_t used = 0;
        double out = 0.0;
        try {
            out = std::stod(v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != v.size()) throw ConfigError("key '" + key + "': '" + v + "' is not a number");
        return out;
    }

    std::size_t get_size(const std::string& key, std::size_t fallback) const {
        if (!has(key)) {
            used_.insert(key);
            return fallback;
        }
        return parse_size(key, get_string(key, ""));
    }

    bool get_bool(const std::string& key, bool fallback) const {
        if (!has(key)) {
            used_.insert(key);
            return fallback;
        }
        std::string v = get_string(key, "");
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError("key '" + key + "': '" + v + "' is not a boolean");
    }

    std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback) const {
        if (!has(key)) {
            used_.insert(key);
            return fallback;
        }
        std::vector<std::string> out;
        for (auto& item : detail::split(get_string(key, ""), ','))
            if (!item.empty()) out.push_back(item);
        if (out.empty()) throw ConfigError("key '" + key + "' is an empty list");
        return out;
    }

    std::vector<std::size_t> get_size_list(const std::string& key, const std::vector<std::size_t>& fallback) const {
        if (!has(key)) {
            used_.insert(key);
            return fallback;
        }
        std::vector<std::size_t> out;
        for (const auto& item : get_list(key, {})) out.push_back(parse_size(key, item));
        return out;
    }

    /// Seed list: comma-separated values and inclusive ranges like `0-19`.
    std::vector<std::uint64_t> get_seeds(const std::string& key, const std::vector<std::uint64_t>& fallback) const {
        if (!has(key)) {
            used_.insert(key);
            return fallback;
        }
        std::vector<std::uint64_t> out;
        for (const auto& item : get_list(key, {})) {
            auto dash = item.find('-');
            if (dash == std::string::npos) {
                out.push_back(parse_size(key, item));
                continue;
            }
            std::uint64_t lo = parse_size(key, item.substr(0, dash)), hi = parse_size(key, item.substr(dash + 1));
            if (hi < lo) throw ConfigError("key '" + key + "': empty range '" + item + "'");
            for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
        }
        return out;
    }

    /// Path relative to the config file's directory unless absolute.
    std::string resolve_path(const std::string& p) const {
        std::filesystem::path path(p);
        if (path.is_absolute() || base_dir_.empty()) return path.string();
        return (base_dir_ / path).string();
    }

    std::vector<std::string> unused_keys() const {
        std::vector<std::string> out;
        for (const auto& [k, v] : values_)
            if (!used_.count(k)) out.push_back(k);
        return out;
    }

    /// Throws ConfigError naming every key no getter asked for.
    void reject_unused() const {
        auto unused = unused_keys();
        if (unused.empty()) return;
        std::string msg = "unknown config key(s):";
        for (const auto& k : unused) msg += " " + k;
        throw ConfigError(msg);
    }

private:
    static std::size_t parse_size(const std::string& key, const std::string& v) {
        std::size_t used = 0;
        unsigned long long out = 0;
        try {
            out = std::stoull(v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != v.size() || v.front() == '-')
            throw ConfigError("key '" + key + "': '" + v + "' is not a non-negative integer");
        return static_cast<std::size_t>(out);
    }

    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;
    std::filesystem::path base_dir_;
};

} // namespace hrl::harness
