#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hrl/error.hpp"

namespace hrl::rl {

using StateId = std::uint64_t;
using ActionId = std::size_t;

/// State-indexed rows of action values.
///
/// Rows are created explicitly (all states of a fixed range at construction,
/// or one at a time through ensure()). A new row starts at zero. Reading a
/// state that was never created is a LookupError; that keeps typos in state
/// encodings from silently spawning fresh rows.
class QTable {
public:
    explicit QTable(std::size_t n_actions) : n_actions_(n_actions) {
        require(n_actions >= 1, "QTable needs at least one action");
    }

    QTable(std::size_t n_states, std::size_t n_actions) : QTable(n_actions) {
        for (StateId s = 0; s < n_states; ++s) ensure(s);
    }

    std::size_t n_actions() const noexcept { return n_actions_; }
    std::size_t n_states() const noexcept { return rows_.size(); }
    bool contains(StateId s) const { return rows_.count(s) != 0; }

    std::vector<double>& ensure(StateId s) {
        auto [it, inserted] = rows_.try_emplace(s, n_actions_, 0.0);
        return it->second;
    }

    const std::vector<double>& row(StateId s) const {
        auto it = rows_.find(s);
        if (it == rows_.end()) throw LookupError("unknown state id " + std::to_string(s));
        return it->second;
    }

    std::vector<double>& row(StateId s) {
        auto it = rows_.find(s);
        if (it == rows_.end()) throw LookupError("unknown state id " + std::to_string(s));
        return it->second;
    }

    double value(StateId s, ActionId a) const {
        check_action(a);
        return row(s)[a];
    }

    void set(StateId s, ActionId a, double v) {
        check_action(a);
        row(s)[a] = v;
    }

    double max_value(StateId s) const {
        const auto& r = row(s);
        double best = r.front();
        for (double v : r) best = std::max(best, v);
        return best;
    }

    /// Lowest-index argmax of the row.
    ActionId greedy_action(StateId s) const {
        const auto& r = row(s);
        ActionId best = 0;
        for (ActionId a = 1; a < r.size(); ++a)
            if (r[a] > r[best]) best = a;
        return best;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& [s, r] : rows_)
            for (double v : r) m = std::max(m, std::abs(v));
        return m;
    }

    const std::map<StateId, std::vector<double>>& rows() const noexcept { return rows_; }

    /// `state_id,action_id,value` rows, states ascending.
    void write_csv(std::ostream& out) const {
        out << "state_id,action_id,value\n";
        out << std::setprecision(std::numeric_limits<double>::max_digits10);
        for (const auto& [s, r] : rows_)
            for (ActionId a = 0; a < r.size(); ++a) out << s << ',' << a << ',' << r[a] << '\n';
    }

    static QTable read_csv(std::istream& in, std::size_t n_actions) {
        QTable table(n_actions);
        std::string line;
        if (!std::getline(in, line) || line.rfind("state_id,action_id,value", 0) != 0)
            throw ParseError("q-table csv: missing header");
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            std::istringstream fields(line);
            StateId s{};
            ActionId a{};
            double v{};
            char c1{}, c2{};
            if (!(fields >> s >> c1 >> a >> c2 >> v) || c1 != ',' || c2 != ',')
                throw ParseError("q-table csv: bad row at line " + std::to_string(line_no));
            if (a >= n_actions)
                throw ParseError("q-table csv: action out of range at line " + std::to_string(line_no));
            table.ensure(s)[a] = v;
        }
        return table;
    }

private:
    void check_action(ActionId a) const {
        if (a >= n_actions_) throw InvalidArgument("action id " + std::to_string(a) + " out of range");
    }

    std::size_t n_actions_;
    std::map<StateId, std::vector<double>> rows_;
};

} // namespace hrl::rl
