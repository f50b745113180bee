#include "osc/perception.hpp"
#include "osc/reward.hpp"
#include "osc/world.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace osc;

namespace {

SpocMap map_with(int transformed, int actionable, int width = 32)
{
    SpocMap m{CellGrid(GridSpec{width, width, 1.0}), 0};
    int i = 0;
    for (int k = 0; k < transformed; ++k)
        m.grid.cells[i++] = CellState::Transformed;
    for (int k = 0; k < actionable; ++k)
        m.grid.cells[i++] = CellState::Actionable;
    return m;
}

} // namespace

TEST(SpocReward, HandComputedCases)
{
    // 140 object cells: 40 transformed, 100 actionable, then 15 more transformed.
    EXPECT_DOUBLE_EQ(spoc_reward(map_with(40, 100), map_with(55, 85)), 0.15);
    EXPECT_EQ(spoc_reward(map_with(40, 100), map_with(40, 100)), 0.0);
    EXPECT_EQ(spoc_reward(map_with(40, 100), map_with(140, 0)), 1.0);
    EXPECT_EQ(spoc_reward(map_with(140, 0), map_with(140, 0)), 0.0);
    EXPECT_DOUBLE_EQ(spoc_reward(map_with(55, 85), map_with(40, 100)), -15.0 / 85.0);
}

TEST(SpocReward, DimensionMismatchRejected)
{
    EXPECT_THROW(spoc_reward(map_with(1, 1, 16), map_with(1, 1, 32)), std::invalid_argument);
}

TEST(SuccessReward, StrictThreshold)
{
    EXPECT_EQ(success_reward(map_with(96, 4)), 1.0);
    EXPECT_EQ(success_reward(map_with(95, 5)), 0.0);
    EXPECT_EQ(success_reward(map_with(0, 100)), 0.0);
}

TEST(TotalReward, WeightedSum)
{
    const RewardWeights w;
    const RewardBreakdown b = total_reward(w, 0.15, 0.0, 2.0);
    EXPECT_NEAR(b.total, 0.152, 1e-12);
    EXPECT_EQ(b.r_spoc, 0.15);
    EXPECT_EQ(b.r_entropy, 2.0);
    EXPECT_EQ(total_reward(w, 0.0, 1.0, 0.0).total, 1.0);
    EXPECT_EQ(total_reward({0, 0, 0}, 0.7, 1.0, -3.0).total, 0.0);
    EXPECT_NEAR(total_reward({0.5, 2.0, 0.1}, 0.3, 1.0, -4.0).total, 0.15 + 2.0 - 0.4, 1e-12);
}

TEST(TotalReward, RejectsNonFinite)
{
    const RewardWeights w;
    EXPECT_THROW(total_reward(w, std::nan(""), 0, 0), std::invalid_argument);
    EXPECT_THROW(total_reward(w, 0, 0, std::numeric_limits<double>::infinity()), std::invalid_argument);
    EXPECT_THROW(total_reward({std::nan(""), 1, 1}, 0, 0, 0), std::invalid_argument);
}

TEST(Coverage, Counts)
{
    EXPECT_EQ(coverage(map_with(0, 200)).coverage, 0.0);
    EXPECT_EQ(coverage(map_with(200, 0)).coverage, 1.0);
    const CoverageReport r = coverage(map_with(55, 145));
    EXPECT_EQ(r.coverage, 0.275);
    EXPECT_EQ(r.transformed_cells + r.actionable_cells, r.object_cells);
    EXPECT_THROW(coverage(map_with(0, 0)), std::invalid_argument);
}

TEST(Coverage, NoiselessSuccessMatchesGroundTruth)
{
    WorldConfig c;
    c.task = TaskKind::Mash;
    c.object.extent = {20, 20};
    WorldState s = reset_episode(c, 0);
    const NoiseModel noise;
    PerceptionState ps = init_perception(0, noise);
    Rng rng(2);
    for (int t = 0; t < 200; ++t) {
        s.ee_pos = {rng.uniform(20, 44), rng.uniform(20, 44)};
        apply_primitive(s, {});
        const SpocMap m = observe(s, ps, noise);
        ASSERT_EQ(success_reward(m) == 1.0, is_success(s));
    }
}

TEST(SpocReward, TelescopesAndStaysInUnitIntervalWhenNoiseless)
{
    for (TaskKind task : {TaskKind::Spread, TaskKind::Mash, TaskKind::Slice}) {
        WorldConfig c;
        c.task = task;
        c.object.shape = ShapeKind::Ellipse;
        c.object.extent = {36, 28};
        WorldState s = reset_episode(c, 1);
        const NoiseModel noise;
        PerceptionState ps = init_perception(1, noise);
        SpocMap prev = observe(s, ps, noise);
        const auto t0 = prev.grid.count(CellState::Transformed);
        long long numerators = 0;
        Rng rng(task == TaskKind::Spread ? 1 : 2);
        for (int t = 0; t < 60; ++t) {
            apply_primitive(s, {rng.uniform(-16, 16), rng.uniform(-16, 16)});
            const SpocMap cur = observe(s, ps, noise);
            const double r = spoc_reward(prev, cur);
            EXPECT_GE(r, 0.0);
            EXPECT_LE(r, 1.0);
            numerators += static_cast<long long>(cur.grid.count(CellState::Transformed)) -
                          static_cast<long long>(prev.grid.count(CellState::Transformed));
            prev = cur;
        }
        EXPECT_EQ(numerators, static_cast<long long>(s.transformed()) - static_cast<long long>(t0));
    }
}

TEST(SpocReward, RepeatingSpentFootprintGivesZero)
{
    WorldConfig c;
    c.task = TaskKind::Mash;
    c.object.extent = {40, 30};
    WorldState s = reset_episode(c, 0);
    s.ee_pos = {32, 32};
    const NoiseModel noise;
    PerceptionState ps = init_perception(0, noise);
    SpocMap prev = observe(s, ps, noise);
    apply_primitive(s, {});
    prev = observe(s, ps, noise);
    for (int t = 0; t < 5; ++t) {
        apply_primitive(s, {});
        const SpocMap cur = observe(s, ps, noise);
        EXPECT_EQ(spoc_reward(prev, cur), 0.0);
        prev = cur;
    }
}

TEST(GoalDistance, ZeroAtGoalAndPooledArithmetic)
{
    // 64x64 grid, pool 16 -> 4x4 blocks; one object block of 16 cells.
    SpocMap m{CellGrid(GridSpec{}), 0};
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x)
            m.grid.at(x, y) = CellState::Actionable;
    EXPECT_DOUBLE_EQ(goal_distance(m.grid), 1.0 / 256.0);
    SpocMap n = m;
    n.grid.at(0, 0) = CellState::Transformed;
    EXPECT_DOUBLE_EQ(goal_distance(n.grid), (15.0 / 16.0) / 256.0);
    EXPECT_DOUBLE_EQ(goaldist_reward(m, n), (1.0 / 16.0) / 256.0);
    for (auto& c : n.grid.cells)
        if (c == CellState::Actionable)
            c = CellState::Transformed;
    EXPECT_EQ(goal_distance(n.grid), 0.0);
}
