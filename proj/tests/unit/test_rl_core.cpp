#include <array>
#include <sstream>

#include <gtest/gtest.h>

#include "hrl/rl/q_learning.hpp"
#include "hrl/rl/q_table.hpp"
#include "hrl/rl/replay_buffer.hpp"

using namespace hrl;
using namespace hrl::rl;

TEST(QUpdate, FirstRewardFromZeroTable) {
    QTable t(2, 2);
    double q = q_update(t, {0.1, 0.95}, {0, 0, 1.0, 1, false});
    EXPECT_DOUBLE_EQ(q, 0.1);
    EXPECT_DOUBLE_EQ(t.value(0, 0), 0.1);
}

TEST(QUpdate, BootstrapsFromNextStateMax) {
    QTable t(2, 2);
    t.set(1, 0, 0.2);
    t.set(1, 1, 0.5);
    // 0.1 * (0 + 0.95 * 0.5 - 0)
    EXPECT_NEAR(q_update(t, {0.1, 0.95}, {0, 1, 0.0, 1, false}), 0.0475, 1e-15);
}

TEST(QUpdate, TerminalIgnoresBootstrap) {
    QTable t(2, 2);
    t.set(0, 0, 0.1);
    t.set(1, 0, 100.0);
    // 0.1 + 0.1 * (1 - 0.1)
    EXPECT_NEAR(q_update(t, {0.1, 0.95}, {0, 0, 1.0, 1, true}), 0.19, 1e-15);
}

TEST(QUpdate, RejectsNonFiniteReward) {
    QTable t(1, 2);
    EXPECT_THROW(q_update(t, {}, {0, 0, std::nan(""), 0, false}), InvalidArgument);
}

TEST(QTable, UnknownStateIsLookupError) {
    QTable t(3, 2);
    EXPECT_THROW(t.row(3), LookupError);
    EXPECT_THROW(t.value(0, 2), InvalidArgument);
    t.ensure(7);
    EXPECT_EQ(t.n_states(), 4u);
    EXPECT_EQ(t.value(7, 1), 0.0);
}

TEST(QTable, GreedyTiesGoToLowestIndex) {
    QTable t(1, 4);
    EXPECT_EQ(t.greedy_action(0), 0u);
    t.set(0, 2, 1.0);
    t.set(0, 3, 1.0);
    EXPECT_EQ(t.greedy_action(0), 2u);
}

TEST(QTable, CsvRoundTripIsExact) {
    QTable t(3, 2);
    t.set(0, 1, 0.1);
    t.set(2, 0, -1.0 / 3.0);
    std::stringstream ss;
    t.write_csv(ss);
    QTable back = QTable::read_csv(ss, 2);
    EXPECT_EQ(back.rows(), t.rows());
}

TEST(QTable, CsvRejectsBadAction) {
    std::stringstream ss("state_id,action_id,value\n0,5,1.0\n");
    EXPECT_THROW(QTable::read_csv(ss, 2), ParseError);
}

TEST(Exploration, MultiplicativeDecayWithFloor) {
    ExplorationSchedule s{1.0, 0.5, 0.1};
    EXPECT_DOUBLE_EQ(s.epsilon(0), 1.0);
    EXPECT_DOUBLE_EQ(s.epsilon(1), 0.5);
    EXPECT_DOUBLE_EQ(s.epsilon(3), 0.125);
    EXPECT_DOUBLE_EQ(s.epsilon(4), 0.1);
    EXPECT_THROW((ExplorationSchedule{0.1, 0.9, 0.5}.validate()), InvalidArgument);
}

TEST(SelectAction, GreedyAtZeroEpsilon) {
    QTable t(1, 3);
    t.set(0, 1, 0.3);
    Rng rng(1);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(select_action(t, 0, 0.0, rng), 1u);
}

TEST(SelectAction, UniformAtFullEpsilon) {
    QTable t(1, 3);
    t.set(0, 1, 0.3);
    Rng rng(2);
    std::array<int, 3> counts{};
    const int n = 30000;
    for (int i = 0; i < n; ++i) ++counts[select_action(t, 0, 1.0, rng)];
    for (int c : counts) EXPECT_NEAR(c / double(n), 1.0 / 3.0, 0.015);
}

TEST(ReplayBuffer, OverwritesOldestWhenFull) {
    ReplayBuffer<int> b(3);
    for (int i = 0; i < 5; ++i) b.push(i);
    EXPECT_EQ(b.size(), 3u);
    EXPECT_EQ(b[0], 2);
    EXPECT_EQ(b[1], 3);
    EXPECT_EQ(b[2], 4);
    EXPECT_THROW(b[3], LookupError);
}

TEST(ReplayBuffer, EmptySampleThrows) {
    ReplayBuffer<int> b(2);
    Rng rng(0);
    EXPECT_THROW(b.sample(rng), InvalidArgument);
    EXPECT_THROW(ReplayBuffer<int>(0), InvalidArgument);
}

TEST(ReplayBuffer, SamplingIsUniformChiSquare) {
    ReplayBuffer<int> b(4);
    for (int i = 0; i < 6; ++i) b.push(i);
    Rng rng(12345);
    std::array<double, 6> counts{};
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(b.sample(rng))];
    EXPECT_EQ(counts[0] + counts[1], 0.0);
    double chi2 = 0.0;
    for (std::size_t v = 2; v < 6; ++v) chi2 += (counts[v] - n / 4.0) * (counts[v] - n / 4.0) / (n / 4.0);
    // 0.999 quantile of chi-square with 3 dof.
    EXPECT_LT(chi2, 16.266);
}
