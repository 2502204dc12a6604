#include <fstream>
#include <utility>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "hrl/harness/experiments.hpp"
#include "hrl/maze/agents.hpp"
#include "hrl/maze/maze.hpp"

using namespace hrl;
using namespace hrl::maze;

namespace {

MazeSpec fixture() {
    std::ifstream in(std::string(HRL_DATA_DIR) + "/fixture_maze.txt");
    return parse_maze(in);
}

} // namespace

TEST(Maze, FixtureShortestPath) {
    MazeSpec m = fixture();
    EXPECT_EQ(m.x_dim(), 4u);
    EXPECT_EQ(m.y_dim(), 4u);
    EXPECT_EQ(shortest_path_len(m), 10);
}

TEST(Maze, OpenGridShortestPathIsManhattan) {
    EXPECT_EQ(shortest_path_len(MazeSpec::open(5, 3, {0, 0}, {4, 2})), 6);
}

TEST(Maze, WriteParseRoundTrip) {
    MazeSpec m = fixture();
    std::stringstream ss;
    write_maze(ss, m);
    MazeSpec back = parse_maze(ss);
    EXPECT_EQ(back.grid, m.grid);
    EXPECT_EQ(back.start, m.start);
    EXPECT_EQ(back.goal, m.goal);
}

TEST(Maze, ParseErrors) {
    std::stringstream ragged("start=0,0\ngoal=1,0\n9 A\n5\n");
    EXPECT_THROW(parse_maze(ragged), ParseError);
    std::stringstream missing("9 A\n5 6\n");
    EXPECT_THROW(parse_maze(missing), ParseError);
    // East side of (0,0) closed but West side of (1,0) open.
    std::stringstream asym("start=0,0\ngoal=1,0\nB 8\n5 6\n");
    EXPECT_THROW(parse_maze(asym), ParseError);
    std::stringstream token("start=0,0\ngoal=1,0\n9 AX\n5 6\n");
    EXPECT_THROW(parse_maze(token), ParseError);
}

TEST(Maze, UnreachableGoalRejected) {
    Grid g(2, 1);
    g.set_wall({0, 0}, Direction::East, true);
    MazeSpec spec{g, {0, 0}, {1, 0}};
    EXPECT_THROW(spec.validate(), InvalidArgument);
}

TEST(Maze, BaseRewardsPerLevel) {
    EXPECT_DOUBLE_EQ(base_reward(4, 4), -0.00625);
    EXPECT_DOUBLE_EQ(base_reward(2, 2), -0.025);
}

TEST(Maze, StepIntoWallStaysAndPays) {
    MazeSpec m = fixture();
    MazeLevel level{0, m.grid, m.goal};
    auto out = step(level, {1, 0}, MazeAction::East);
    EXPECT_EQ(out.next, (Cell{1, 0}));
    EXPECT_DOUBLE_EQ(out.reward, -0.00625);
    EXPECT_FALSE(out.done);
    auto miss = step(level, {0, 0}, MazeAction::Declare);
    EXPECT_DOUBLE_EQ(miss.reward, -0.00625);
    EXPECT_FALSE(miss.done);
    auto hit = step(level, m.goal, MazeAction::Declare);
    EXPECT_DOUBLE_EQ(hit.reward, 1.0);
    EXPECT_TRUE(hit.done);
}

TEST(Maze, CoarseLevelIsTheFixtureU) {
    auto levels = build_levels(fixture(), 2);
    const Grid& g = levels[1].grid;
    EXPECT_EQ(g.x_dim(), 2u);
    EXPECT_FALSE(g.is_open({0, 0}, Direction::East));
    EXPECT_TRUE(g.is_open({0, 0}, Direction::South));
    EXPECT_TRUE(g.is_open({0, 1}, Direction::East));
    EXPECT_TRUE(g.is_open({1, 1}, Direction::North));
    EXPECT_EQ(levels[1].goal, (Cell{1, 0}));
    EXPECT_FALSE(g.consistency_error().has_value());
}

TEST(Maze, BuildLevelsRefusesOneByOne) {
    EXPECT_THROW(build_levels(MazeSpec::open(2, 2, {0, 0}, {1, 1}), 2), InvalidArgument);
    EXPECT_THROW(build_levels(MazeSpec::open(3, 2, {0, 0}, {1, 1}), 2), InvalidArgument);
}

namespace {

// Walks the BFS shortest path, optionally bumping into the north boundary
// first, then declares. Returns (moves, total reward).
std::pair<int, double> walk_and_declare(const MazeSpec& m, bool bump_first) {
    MazeLevel level{0, m.grid, m.goal};
    auto to_goal = m.grid.bfs_distances(m.goal);
    Cell pos = m.start;
    double reward = 0.0;
    int moves = 0;
    if (bump_first) {
        auto out = step(level, pos, MazeAction::North);
        EXPECT_EQ(out.next, pos);
        reward += out.reward;
        ++moves;
    }
    while (!(pos == m.goal)) {
        for (Direction d : kDirections) {
            if (!m.grid.is_open(pos, d)) continue;
            Cell n = neighbor(pos, d);
            if (to_goal[m.grid.index(n)] != to_goal[m.grid.index(pos)] - 1) continue;
            auto out = step(level, pos, move_action(d));
            reward += out.reward;
            pos = out.next;
            ++moves;
            break;
        }
    }
    auto end = step(level, pos, MazeAction::Declare);
    EXPECT_TRUE(end.done);
    return {moves, reward + end.reward};
}

} // namespace

TEST(Maze, SolvedEpisodeRewardIsOneMinusMovesTimesBase) {
    MazeSpec m = fixture();
    auto [moves, reward] = walk_and_declare(m, false);
    EXPECT_EQ(moves, 10);
    EXPECT_NEAR(reward, 1.0 - 10 * 0.00625, 1e-12);
    auto [moves2, reward2] = walk_and_declare(m, true);
    EXPECT_EQ(moves2, 11);
    EXPECT_NEAR(reward2, 1.0 - 11 * 0.00625, 1e-12);
}

TEST(FlatQ, LearnsShortestPathOnFixture) {
    MazeSpec m = fixture();
    auto cfg = harness::maze_preset();
    cfg.seed = 3;
    auto r = run_flat_q(m, cfg);
    ASSERT_EQ(r.log.size(), cfg.episodes);
    auto len = greedy_path_length(r.table, m);
    ASSERT_TRUE(len.has_value());
    EXPECT_EQ(*len, shortest_path_len(m));
}

TEST(FlatQ, SolvedEpisodeRewardMatchesMoveCount) {
    MazeSpec m = fixture();
    auto cfg = harness::maze_preset();
    cfg.episodes = 60;
    auto r = run_flat_q(m, cfg);
    for (const auto& e : r.log) {
        if (!e.solved) continue;
        EXPECT_NEAR(e.reward, 1.0 - static_cast<double>(e.steps - 1) * 0.00625, 1e-12);
    }
}

TEST(FlatQ, SameSeedSameLog) {
    MazeSpec m = fixture();
    auto cfg = harness::maze_preset();
    cfg.episodes = 30;
    auto a = run_flat_q(m, cfg), b = run_flat_q(m, cfg);
    ASSERT_EQ(a.log.size(), b.log.size());
    for (std::size_t i = 0; i < a.log.size(); ++i) {
        EXPECT_EQ(a.log[i].steps, b.log[i].steps);
        EXPECT_EQ(a.log[i].reward, b.log[i].reward);
    }
}

TEST(Feudal, WorkerRewardMatchesMoveCount) {
    MazeSpec m = fixture();
    auto cfg = harness::maze_preset();
    cfg.episodes = 80;
    for (auto mode : {GoalMode::Direction, GoalMode::Quadrant}) {
        auto r = run_feudal(m, cfg, mode);
        ASSERT_EQ(r.worker.size(), r.manager.size());
        for (const auto& e : r.worker) {
            if (!e.solved) continue;
            EXPECT_NEAR(e.reward, 1.0 - static_cast<double>(e.steps - 1) * 0.00625, 1e-12);
        }
    }
}

TEST(Feudal, ManagerDecisionsNeverExceedWorkerSteps) {
    MazeSpec m = fixture();
    auto cfg = harness::maze_preset();
    cfg.episodes = 100;
    auto r = run_feudal(m, cfg, GoalMode::Direction);
    for (std::size_t i = 0; i < r.worker.size(); ++i) {
        EXPECT_EQ(r.worker[i].solved, r.manager[i].solved);
        EXPECT_EQ(r.manager[i].role, Role::Manager);
        EXPECT_GE(r.worker[i].steps, r.manager[i].steps);
    }
}

TEST(Feudal, QuadrantModeSolvesFixture) {
    MazeSpec m = fixture();
    auto cfg = harness::maze_preset();
    auto r = run_feudal(m, cfg, GoalMode::Quadrant);
    ASSERT_TRUE(r.worker.back().solved);
    EXPECT_LE(r.worker.back().steps, 2u * (static_cast<std::size_t>(shortest_path_len(m)) + 1));
}

TEST(Feudal, EpisodeCsvHasSeedColumn) {
    std::ostringstream out;
    write_episode_csv_header(out);
    write_episode_csv_rows(out, 4, {{0, 12, 0.5, true, Role::Worker}});
    EXPECT_EQ(out.str(), "seed,episode,steps,reward,role\n4,0,12,0.5,worker\n");
}
