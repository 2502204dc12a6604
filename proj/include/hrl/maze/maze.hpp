#pragma once

#include <array>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hrl/error.hpp"

namespace hrl::maze {

enum class Direction : std::uint8_t { North = 0, South = 1, East = 2, West = 3 };

inline constexpr std::array<Direction, 4> kDirections{Direction::North, Direction::South, Direction::East,
                                                      Direction::West};

/// Wall bit per direction in the hex-nibble encoding N|S|E|W. A set bit is a
/// closed side.
constexpr std::uint8_t wall_bit(Direction d) {
    switch (d) {
    case Direction::North: return 0x8;
    case Direction::South: return 0x4;
    case Direction::East: return 0x2;
    case Direction::West: return 0x1;
    }
    return 0;
}

constexpr Direction opposite(Direction d) {
    switch (d) {
    case Direction::North: return Direction::South;
    case Direction::South: return Direction::North;
    case Direction::East: return Direction::West;
    case Direction::West: return Direction::East;
    }
    return d;
}

inline const char* direction_name(Direction d) {
    switch (d) {
    case Direction::North: return "N";
    case Direction::South: return "S";
    case Direction::East: return "E";
    case Direction::West: return "W";
    }
    return "?";
}

/// North/South/East/West move, Declare claims the current cell is the goal.
enum class MazeAction : std::uint8_t { North = 0, South = 1, East = 2, West = 3, Declare = 4 };
inline constexpr std::size_t kMazeActions = 5;

inline MazeAction move_action(Direction d) { return static_cast<MazeAction>(static_cast<std::uint8_t>(d)); }

/// Column x grows eastward, row y grows southward.
struct Cell {
    int x = 0;
    int y = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

constexpr Cell neighbor(Cell c, Direction d) {
    switch (d) {
    case Direction::North: return {c.x, c.y - 1};
    case Direction::South: return {c.x, c.y + 1};
    case Direction::East: return {c.x + 1, c.y};
    case Direction::West: return {c.x - 1, c.y};
    }
    return c;
}

/// One resolution of a maze: a grid of cells with closed/open sides.
class Grid {
public:
    Grid() = default;
    Grid(std::size_t x_dim, std::size_t y_dim) : x_dim_(x_dim), y_dim_(y_dim), walls_(x_dim * y_dim, 0) {
        require(x_dim >= 1 && y_dim >= 1, "maze dimensions must be >= 1");
        close_boundary();
    }

    std::size_t x_dim() const noexcept { return x_dim_; }
    std::size_t y_dim() const noexcept { return y_dim_; }
    std::size_t n_cells() const noexcept { return walls_.size(); }

    bool in_bounds(Cell c) const {
        return c.x >= 0 && c.y >= 0 && static_cast<std::size_t>(c.x) < x_dim_ && static_cast<std::size_t>(c.y) < y_dim_;
    }

    std::size_t index(Cell c) const {
        if (!in_bounds(c)) throw InvalidArgument("cell (" + std::to_string(c.x) + "," + std::to_string(c.y) + ") out of bounds");
        return static_cast<std::size_t>(c.y) * x_dim_ + static_cast<std::size_t>(c.x);
    }

    Cell cell(std::size_t index) const {
        return {static_cast<int>(index % x_dim_), static_cast<int>(index / x_dim_)};
    }

    std::uint8_t bits(Cell c) const { return walls_[index(c)]; }
    void set_bits(Cell c, std::uint8_t b) { walls_[index(c)] = b & 0xF; }

    bool is_open(Cell c, Direction d) const { return (bits(c) & wall_bit(d)) == 0; }

    /// Opens or closes the side between `c` and its neighbor, keeping both
    /// cells' flags in agreement.
    void set_wall(Cell c, Direction d, bool closed) {
        Cell n = neighbor(c, d);
        if (!in_bounds(n)) throw InvalidArgument("cannot change a boundary wall");
        auto apply = [&](Cell at, Direction side) {
            std::uint8_t b = bits(at);
            b = closed ? (b | wall_bit(side)) : (b & ~wall_bit(side));
            set_bits(at, b);
        };
        apply(c, d);
        apply(n, opposite(d));
    }

    void close_boundary() {
        for (std::size_t y = 0; y < y_dim_; ++y)
            for (std::size_t x = 0; x < x_dim_; ++x) {
                Cell c{static_cast<int>(x), static_cast<int>(y)};
                std::uint8_t b = walls_[index(c)];
                if (y == 0) b |= wall_bit(Direction::North);
                if (y + 1 == y_dim_) b |= wall_bit(Direction::South);
                if (x == 0) b |= wall_bit(Direction::West);
                if (x + 1 == x_dim_) b |= wall_bit(Direction::East);
                walls_[index(c)] = b;
            }
    }

    /// Boundary closed and every interior side agreed on by both cells.
    std::optional<std::string> consistency_error() const {
        for (std::size_t i = 0; i < n_cells(); ++i) {
            Cell c = cell(i);
            for (Direction d : kDirections) {
                Cell n = neighbor(c, d);
                if (!in_bounds(n)) {
                    if (is_open(c, d)) return "boundary side open at (" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
                } else if (is_open(c, d) != is_open(n, opposite(d))) {
                    return "asymmetric wall at (" + std::to_string(c.x) + "," + std::to_string(c.y) + ") " + direction_name(d);
                }
            }
        }
        return std::nullopt;
    }

    /// Move count from `from` to every cell; -1 when unreachable.
    std::vector<int> bfs_distances(Cell from) const {
        std::vector<int> dist(n_cells(), -1);
        std::deque<Cell> frontier{from};
        dist[index(from)] = 0;
        while (!frontier.empty()) {
            Cell c = frontier.front();
            frontier.pop_front();
            for (Direction d : kDirections) {
                if (!is_open(c, d)) continue;
                Cell n = neighbor(c, d);
                if (dist[index(n)] >= 0) continue;
                dist[index(n)] = dist[index(c)] + 1;
                frontier.push_back(n);
            }
        }
        return dist;
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t x_dim_ = 0;
    std::size_t y_dim_ = 0;
    std::vector<std::uint8_t> walls_;
};

/// Worker-resolution maze plus start and goal cells.
struct MazeSpec {
    Grid grid;
    Cell start;
    Cell goal;

    std::size_t x_dim() const { return grid.x_dim(); }
    std::size_t y_dim() const { return grid.y_dim(); }

    void validate() const {
        if (auto err = grid.consistency_error()) throw InvalidArgument("maze: " + *err);
        if (!grid.in_bounds(start)) throw InvalidArgument("maze: start out of bounds");
        if (!grid.in_bounds(goal)) throw InvalidArgument("maze: goal out of bounds");
        if (grid.bfs_distances(start)[grid.index(goal)] < 0) throw InvalidArgument("maze: goal unreachable from start");
    }

    static MazeSpec open(std::size_t x_dim, std::size_t y_dim, Cell start, Cell goal) {
        MazeSpec spec{Grid(x_dim, y_dim), start, goal};
        spec.validate();
        return spec;
    }
};

/// Exact minimal number of moves from start to goal.
inline int shortest_path_len(const MazeSpec& spec) {
    int d = spec.grid.bfs_distances(spec.start)[spec.grid.index(spec.goal)];
    if (d < 0) throw InvalidArgument("maze: goal unreachable from start");
    return d;
}

/// One resolution of the maze hierarchy. Level 0 is the worker's grid; each
/// coarser level halves both dimensions and every coarse cell covers a 2x2
/// block of the next finer level.
struct MazeLevel {
    std::size_t depth = 0;
    Grid grid;
    Cell goal;

    std::size_t x_dim() const { return grid.x_dim(); }
    std::size_t y_dim() const { return grid.y_dim(); }

    /// Cells of the next finer level covered by `c`.
    std::array<Cell, 4> children(Cell c) const {
        if (depth == 0) throw InvalidArgument("the finest level has no children");
        grid.index(c);
        return {Cell{2 * c.x, 2 * c.y}, Cell{2 * c.x + 1, 2 * c.y}, Cell{2 * c.x, 2 * c.y + 1},
                Cell{2 * c.x + 1, 2 * c.y + 1}};
    }

    /// Cell of this level that contains finer-level cell `fine`.
    static Cell parent_of(Cell fine) { return {fine.x / 2, fine.y / 2}; }
};

/// The per-move penalty -0.1 / (X_dim * Y_dim) of a level.
inline double base_reward(std::size_t x_dim, std::size_t y_dim) {
    return -0.1 / (static_cast<double>(x_dim) * static_cast<double>(y_dim));
}

inline double base_reward(const MazeLevel& level) { return base_reward(level.x_dim(), level.y_dim()); }

/// Coarsens `fine` by 2 in each dimension. A coarse side is open iff at least
/// one fine passage crosses it.
inline MazeLevel coarsen(const MazeLevel& fine) {
    require(fine.x_dim() % 2 == 0 && fine.y_dim() % 2 == 0, "maze dimensions must be even to coarsen");
    MazeLevel coarse;
    coarse.depth = fine.depth + 1;
    coarse.grid = Grid(fine.x_dim() / 2, fine.y_dim() / 2);
    coarse.goal = MazeLevel::parent_of(fine.goal);
    for (std::size_t y = 0; y < coarse.y_dim(); ++y) {
        for (std::size_t x = 0; x < coarse.x_dim(); ++x) {
            Cell c{static_cast<int>(x), static_cast<int>(y)};
            if (x + 1 < coarse.x_dim()) {
                bool open = fine.grid.is_open({2 * c.x + 1, 2 * c.y}, Direction::East) ||
                            fine.grid.is_open({2 * c.x + 1, 2 * c.y + 1}, Direction::East);
                coarse.grid.set_wall(c, Direction::East, !open);
            }
            if (y + 1 < coarse.y_dim()) {
                bool open = fine.grid.is_open({2 * c.x, 2 * c.y + 1}, Direction::South) ||
                            fine.grid.is_open({2 * c.x + 1, 2 * c.y + 1}, Direction::South);
                coarse.grid.set_wall(c, Direction::South, !open);
            }
        }
    }
    return coarse;
}

/// Level 0 is `spec` itself; level i halves each dimension of level i-1.
/// A 1x1 level is never built.
inline std::vector<MazeLevel> build_levels(const MazeSpec& spec, std::size_t n_levels) {
    require(n_levels >= 1, "need at least one maze level");
    std::size_t factor = std::size_t{1} << (n_levels - 1);
    if (spec.x_dim() % factor != 0 || spec.y_dim() % factor != 0)
        throw InvalidArgument("maze dimensions are not divisible by 2^(n_levels-1)");
    if (n_levels > 1 && spec.x_dim() / factor == 1 && spec.y_dim() / factor == 1)
        throw InvalidArgument("a 1x1 maze level is not built");
    std::vector<MazeLevel> levels;
    levels.push_back(MazeLevel{0, spec.grid, spec.goal});
    for (std::size_t i = 1; i < n_levels; ++i) levels.push_back(coarsen(levels.back()));
    return levels;
}

struct StepOutcome {
    Cell next;
    double reward = 0.0;
    bool done = false;
};

/// Moves pay the base reward even when a wall blocks them. Declare on the
/// goal pays 1 and ends the episode; elsewhere it pays the base reward.
inline StepOutcome step(const MazeLevel& level, Cell state, MazeAction action) {
    if (!level.grid.in_bounds(state)) throw InvalidArgument("maze step: state out of bounds");
    const double base = base_reward(level);
    if (action == MazeAction::Declare) {
        if (state == level.goal) return {state, 1.0, true};
        return {state, base, false};
    }
    auto d = static_cast<Direction>(static_cast<std::uint8_t>(action));
    Cell next = level.grid.is_open(state, d) ? neighbor(state, d) : state;
    return {next, base, false};
}

// Maze text format:
//
//   # comment
//   start=0,0
//   goal=2,0
//   9 A D A
//   5 2 9 2
//   ...
//
// Each non key=value line is one row (y = 0 first); each token is a hex
// nibble of closed sides, N=8 S=4 E=2 W=1.
inline Cell parse_cell(const std::string& text) {
    auto comma = text.find(',');
    if (comma == std::string::npos) throw ParseError("maze: expected x,y but got '" + text + "'");
    try {
        return {std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
    } catch (const std::exception&) {
        throw ParseError("maze: bad coordinate '" + text + "'");
    }
}

inline MazeSpec parse_maze(std::istream& in) {
    std::vector<std::vector<std::uint8_t>> rows;
    std::optional<Cell> start, goal;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
        auto eq = line.find('=');
        if (eq != std::string::npos) {
            std::string key = line.substr(0, eq);
            std::string value = line.substr(eq + 1);
            if (key == "start") start = parse_cell(value);
            else if (key == "goal") goal = parse_cell(value);
            else throw ParseError("maze: unknown key '" + key + "'");
            continue;
        }
        std::istringstream tokens(line);
        std::string tok;
        std::vector<std::uint8_t> row;
        while (tokens >> tok) {
            if (tok.size() != 1 || !std::isxdigit(static_cast<unsigned char>(tok[0])))
                throw ParseError("maze: bad wall token '" + tok + "'");
            row.push_back(static_cast<std::uint8_t>(std::stoi(tok, nullptr, 16)));
        }
        if (!rows.empty() && row.size() != rows.front().size()) throw ParseError("maze: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("maze: no grid rows");
    if (!start || !goal) throw ParseError("maze: start= and goal= are required");
    MazeSpec spec{Grid(rows.front().size(), rows.size()), *start, *goal};
    for (std::size_t y = 0; y < rows.size(); ++y)
        for (std::size_t x = 0; x < rows[y].size(); ++x)
            spec.grid.set_bits({static_cast<int>(x), static_cast<int>(y)}, rows[y][x]);
    try {
        spec.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
    return spec;
}

inline void write_maze(std::ostream& out, const MazeSpec& spec) {
    out << "start=" << spec.start.x << ',' << spec.start.y << '\n';
    out << "goal=" << spec.goal.x << ',' << spec.goal.y << '\n';
    const char* hex = "0123456789ABCDEF";
    for (std::size_t y = 0; y < spec.y_dim(); ++y) {
        for (std::size_t x = 0; x < spec.x_dim(); ++x) {
            if (x) out << ' ';
            out << hex[spec.grid.bits({static_cast<int>(x), static_cast<int>(y)})];
        }
        out << '\n';
    }
}

} // namespace hrl::maze
