#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hrl/maze/maze.hpp"
#include "hrl/rl/q_learning.hpp"
#include "hrl/rl/q_table.hpp"

namespace hrl::maze {

enum class Role { Flat, Manager, Worker };

inline const char* role_name(Role r) {
    switch (r) {
    case Role::Flat: return "flat";
    case Role::Manager: return "manager";
    case Role::Worker: return "worker";
    }
    return "?";
}

/// Steps and cumulative reward of one episode for one agent role. For the
/// flat agent and the feudal worker `steps` counts fine-level actions; for the
/// feudal manager it counts coarse decisions.
struct EpisodeLog {
    std::size_t episode = 0;
    std::size_t steps = 0;
    double reward = 0.0;
    bool solved = false;
    Role role = Role::Flat;
};

struct MazeRunConfig {
    rl::LearningParams params;
    rl::ExplorationSchedule schedule;
    std::size_t episodes = 500;
    std::uint64_t seed = 0;
    std::size_t step_cap = 1000;
    /// Manager reward added when the worker finds the goal outside the
    /// quadrant it was told to search.
    double disobedience_penalty = -0.1;
    /// Fine-step cap per manager instruction; 0 means 2 * (x_dim + y_dim).
    std::size_t macro_step_cap = 0;

    void validate() const {
        params.validate();
        schedule.validate();
        require(episodes >= 1, "episodes must be >= 1");
        require(step_cap >= 1, "step cap must be >= 1");
    }
};

struct FlatQResult {
    std::vector<EpisodeLog> log;
    rl::QTable table;
};

/// Tabular Q-learning over the fine grid, one row per cell.
inline FlatQResult run_flat_q(const MazeSpec& spec, const MazeRunConfig& cfg) {
    spec.validate();
    cfg.validate();
    const MazeLevel level{0, spec.grid, spec.goal};
    FlatQResult result{{}, rl::QTable(spec.grid.n_cells(), kMazeActions)};
    rl::Rng rng(cfg.seed);
    for (std::size_t ep = 0; ep < cfg.episodes; ++ep) {
        const double eps = cfg.schedule.epsilon(ep);
        EpisodeLog log{ep, 0, 0.0, false, Role::Flat};
        Cell pos = spec.start;
        while (log.steps < cfg.step_cap) {
            rl::StateId s0 = spec.grid.index(pos);
            rl::ActionId a = rl::select_action(result.table, s0, eps, rng);
            StepOutcome out = step(level, pos, static_cast<MazeAction>(a));
            rl::q_update(result.table, cfg.params, {s0, a, out.reward, spec.grid.index(out.next), out.done});
            ++log.steps;
            log.reward += out.reward;
            pos = out.next;
            if (out.done) {
                log.solved = true;
                break;
            }
        }
        result.log.push_back(log);
    }
    return result;
}

/// Moves taken by the greedy policy of a flat table before it declares on
/// the goal. Empty if it declares elsewhere or exceeds `max_moves`.
inline std::optional<int> greedy_path_length(const rl::QTable& table, const MazeSpec& spec, int max_moves = 1000) {
    const MazeLevel level{0, spec.grid, spec.goal};
    Cell pos = spec.start;
    for (int moves = 0; moves <= max_moves; ++moves) {
        auto a = static_cast<MazeAction>(table.greedy_action(spec.grid.index(pos)));
        if (a == MazeAction::Declare) {
            if (pos == spec.goal) return moves;
            return std::nullopt;
        }
        pos = step(level, pos, a).next;
    }
    return std::nullopt;
}

enum class GoalMode { Direction, Quadrant };

/// Manager-to-worker instruction.
struct GoalVector {
    enum class Kind : std::uint8_t { Direction, GotoQuadrant, SearchQuadrant };
    Kind kind = Kind::Direction;
    /// Direction index for Kind::Direction, coarse cell index otherwise.
    std::size_t value = 0;

    friend bool operator==(const GoalVector&, const GoalVector&) = default;
};

struct FeudalResult {
    std::vector<EpisodeLog> worker;
    std::vector<EpisodeLog> manager;
    rl::QTable manager_table{1};
    /// Goal-conditioned movement table: rows (fine cell, instruction), moves only.
    rl::QTable move_table{1};
    /// Goal-conditioned search table: rows (fine cell, quadrant), moves + Declare.
    rl::QTable search_table{1};
};

namespace detail {

inline constexpr std::size_t kMoveActions = 4;

/// Two-level feudal agent state shared by both goal modes.
class FeudalRunner {
public:
    FeudalRunner(const MazeSpec& spec, const MazeRunConfig& cfg, GoalMode mode)
        : spec_(spec), cfg_(cfg), mode_(mode), levels_(build_levels(spec, 2)), rng_(cfg.seed) {
        const std::size_t fine_cells = fine().grid.n_cells();
        const std::size_t coarse_cells = coarse().grid.n_cells();
        result_.manager_table = rl::QTable(coarse_cells, kMazeActions);
        // Direction mode keys moves on 4 directions, quadrant mode on the
        // coarse cells.
        instruction_count_ = mode_ == GoalMode::Direction ? kMoveActions : coarse_cells;
        result_.move_table = rl::QTable(fine_cells * instruction_count_, kMoveActions);
        result_.search_table = rl::QTable(fine_cells * coarse_cells, kMazeActions);
        macro_cap_ = cfg.macro_step_cap ? cfg.macro_step_cap : 2 * (spec.x_dim() + spec.y_dim());
    }

    FeudalResult run() {
        for (std::size_t ep = 0; ep < cfg_.episodes; ++ep) run_episode(ep);
        return std::move(result_);
    }

    /// Instruction the manager's action turns into, given its coarse cell.
    GoalVector instruction(Cell quadrant, MazeAction action) const {
        if (action == MazeAction::Declare)
            return {GoalVector::Kind::SearchQuadrant, coarse().grid.index(quadrant)};
        auto d = static_cast<Direction>(static_cast<std::uint8_t>(action));
        if (mode_ == GoalMode::Direction) return {GoalVector::Kind::Direction, static_cast<std::size_t>(d)};
        Cell target = step(coarse(), quadrant, action).next;
        return {GoalVector::Kind::GotoQuadrant, coarse().grid.index(target)};
    }

    struct MacroOutcome {
        std::size_t fine_steps = 0;
        double env_reward = 0.0;
        bool found_goal = false;
        bool disobeyed = false;
    };

    /// Runs the worker on one instruction, updating its tables, until the
    /// instruction is satisfied, the goal is found, or a cap is hit.
    MacroOutcome execute(Cell& pos, const GoalVector& goal, std::size_t budget) {
        MacroOutcome out;
        const Cell start_quadrant = MazeLevel::parent_of(pos);
        if (goal.kind == GoalVector::Kind::GotoQuadrant && quadrant_index(pos) == goal.value) return out;

        const bool searching = goal.kind == GoalVector::Kind::SearchQuadrant;
        rl::QTable& table = searching ? result_.search_table : result_.move_table;
        const std::size_t cap = std::min(budget, macro_cap_);
        const std::size_t n_fine = fine().grid.n_cells();
        auto row_of = [&](Cell c) { return goal.value * n_fine + fine().grid.index(c); };
        const double eps = cfg_.schedule.epsilon(instructions_++);

        while (out.fine_steps < cap) {
            rl::StateId s0 = row_of(pos);
            rl::ActionId a = rl::select_action(table, s0, eps, rng_);
            StepOutcome env = step(fine(), pos, static_cast<MazeAction>(a));
            ++out.fine_steps;
            out.env_reward += env.reward;
            pos = env.next;

            double learn_reward = env.reward;
            bool terminal = env.done;
            if (env.done) {
                out.found_goal = true;
                out.disobeyed = searching && quadrant_index(pos) != goal.value;
            } else if (goal.kind == GoalVector::Kind::GotoQuadrant) {
                terminal = quadrant_index(pos) == goal.value;
            } else if (goal.kind == GoalVector::Kind::Direction) {
                Cell now = MazeLevel::parent_of(pos);
                if (!(now == start_quadrant)) {
                    terminal = true;
                    Cell wanted = neighbor(start_quadrant, static_cast<Direction>(goal.value));
                    if (!(now == wanted)) learn_reward += cfg_.disobedience_penalty;
                }
            }
            rl::q_update(table, cfg_.params, {s0, a, learn_reward, row_of(pos), terminal});
            if (terminal) break;
        }
        return out;
    }

private:
    const MazeLevel& fine() const { return levels_[0]; }
    const MazeLevel& coarse() const { return levels_[1]; }
    std::size_t quadrant_index(Cell fine_cell) const { return coarse().grid.index(MazeLevel::parent_of(fine_cell)); }

    void run_episode(std::size_t ep) {
        const double eps = cfg_.schedule.epsilon(ep);
        const double coarse_base = base_reward(coarse());
        EpisodeLog worker{ep, 0, 0.0, false, Role::Worker};
        EpisodeLog manager{ep, 0, 0.0, false, Role::Manager};
        Cell pos = spec_.start;
        // Zero-step instructions do not advance the fine clock, so decisions
        // get their own cap.
        while (worker.steps < cfg_.step_cap && manager.steps < cfg_.step_cap) {
            Cell quadrant = MazeLevel::parent_of(pos);
            rl::StateId m0 = coarse().grid.index(quadrant);
            rl::ActionId ma = rl::select_action(result_.manager_table, m0, eps, rng_);
            GoalVector goal = instruction(quadrant, static_cast<MazeAction>(ma));
            MacroOutcome macro = execute(pos, goal, cfg_.step_cap - worker.steps);

            worker.steps += macro.fine_steps;
            worker.reward += macro.env_reward;

            double m_reward = macro.found_goal ? 1.0 : coarse_base;
            if (macro.disobeyed) m_reward += cfg_.disobedience_penalty;
            rl::q_update(result_.manager_table, cfg_.params,
                         {m0, ma, m_reward, quadrant_index(pos), macro.found_goal});
            ++manager.steps;
            manager.reward += m_reward;
            if (macro.found_goal) {
                worker.solved = manager.solved = true;
                break;
            }
        }
        result_.worker.push_back(worker);
        result_.manager.push_back(manager);
    }

    const MazeSpec& spec_;
    const MazeRunConfig& cfg_;
    GoalMode mode_;
    std::vector<MazeLevel> levels_;
    rl::Rng rng_;
    FeudalResult result_;
    std::size_t instruction_count_ = 0;
    std::size_t macro_cap_ = 0;
    std::size_t instructions_ = 0;
};

} // namespace detail

/// Two-level feudal Q-learning on the fine maze and its 2x2-coarsened
/// manager view. The manager picks N/S/E/W/Declare on the coarse grid; the
/// worker turns that into fine moves.
///
/// Direction mode: the worker is told a direction and is done after one
/// quadrant change (its own penalty if the change went elsewhere).
/// Quadrant mode: the worker is told the target quadrant (the coarse cell the
/// manager's move leads to) and routes itself there.
/// Declare becomes SearchQuadrant on the manager's cell in both modes; the
/// worker then looks for the goal for at most the macro step cap.
inline FeudalResult run_feudal(const MazeSpec& spec, const MazeRunConfig& cfg, GoalMode mode) {
    spec.validate();
    cfg.validate();
    detail::FeudalRunner runner(spec, cfg, mode);
    return runner.run();
}

/// `seed,episode,steps,reward,role` rows.
inline void write_episode_csv_header(std::ostream& out) { out << "seed,episode,steps,reward,role\n"; }

inline void write_episode_csv_rows(std::ostream& out, std::uint64_t seed, const std::vector<EpisodeLog>& log) {
    auto flags = out.flags();
    auto prec = out.precision();
    out.precision(17);
    for (const auto& e : log)
        out << seed << ',' << e.episode << ',' << e.steps << ',' << e.reward << ',' << role_name(e.role) << '\n';
    out.flags(flags);
    out.precision(prec);
}

} // namespace hrl::maze
