#include "osc/policy.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace osc;

namespace {

Observation obs_of(const CellGrid& g, Vec2 ee)
{
    const SpocMap m{g, 0};
    return {m, m, ee, 0};
}

GreedyConfig cfg16(double radius = 4.0)
{
    GreedyConfig c;
    c.step_mag = 16.0;
    c.neighborhood_radius = radius;
    return c;
}

// Independent recount: brute force over every cell for each candidate.
std::vector<int> recount(const CellGrid& g, Vec2 ee, const GreedyConfig& cfg, bool object_mask)
{
    std::vector<int> out;
    for (int i = 0; i < cfg.num_directions; ++i) {
        const double th = 2.0 * std::numbers::pi * i / cfg.num_directions;
        const double ex = std::clamp(ee.x + cfg.step_mag * std::cos(th), 0.0, g.spec.extent_x());
        const double ey = std::clamp(ee.y + cfg.step_mag * std::sin(th), 0.0, g.spec.extent_y());
        int n = 0;
        for (int idx = 0; idx < static_cast<int>(g.cells.size()); ++idx) {
            const CellState s = g.cells[idx];
            const bool want = object_mask ? s != CellState::Background : s == CellState::Actionable;
            const double dx = (idx % g.spec.width + 0.5) - ex, dy = (idx / g.spec.width + 0.5) - ey;
            if (want && std::sqrt(dx * dx + dy * dy) <= cfg.neighborhood_radius)
                ++n;
        }
        out.push_back(n);
    }
    return out;
}

} // namespace

TEST(Greedy, ActionableEastPicksPlusX)
{
    CellGrid g{GridSpec{}};
    for (int y = 20; y < 44; ++y)
        for (int x = 40; x < 60; ++x)
            g.at(x, y) = CellState::Actionable;
    EXPECT_EQ(greedy_direction(obs_of(g, {30, 32}), cfg16(), false), 0);
    const Action a = greedy_action(obs_of(g, {30, 32}), cfg16());
    EXPECT_DOUBLE_EQ(a.dx, 16.0);
    EXPECT_NEAR(a.dy, 0.0, 1e-12);
}

TEST(Greedy, UniformFieldTiesToIndexZero)
{
    CellGrid g{GridSpec{}, CellState::Actionable};
    EXPECT_EQ(greedy_direction(obs_of(g, {32, 32}), cfg16(), false), 0);
}

TEST(Greedy, FullyTransformedGivesZeroAction)
{
    CellGrid g{GridSpec{}};
    for (int y = 20; y < 44; ++y)
        for (int x = 20; x < 44; ++x)
            g.at(x, y) = CellState::Transformed;
    EXPECT_EQ(greedy_action(obs_of(g, {1, 1}), cfg16()), Action{});
}

TEST(Greedy, EmptyNeighborhoodsHeadForNearestActionable)
{
    CellGrid g{GridSpec{}};
    g.at(60, 2) = CellState::Actionable;
    // From (1,1) every endpoint neighborhood is empty; +x lands nearest.
    EXPECT_EQ(greedy_direction(obs_of(g, {1, 1}), cfg16(), false), 0);
    CellGrid h{GridSpec{}};
    h.at(2, 60) = CellState::Actionable;
    EXPECT_EQ(greedy_direction(obs_of(h, {1, 1}), cfg16(), false), 2);
}

TEST(ObjMask, ObjectNorthPicksPlusY)
{
    CellGrid g{GridSpec{}};
    for (int y = 44; y < 56; ++y)
        for (int x = 26; x < 38; ++x)
            g.at(x, y) = (x + y) % 2 ? CellState::Transformed : CellState::Actionable;
    EXPECT_EQ(greedy_direction(obs_of(g, {32, 32}), cfg16(), true), 2);
}

TEST(ObjMask, ActsOnTransformedHalf)
{
    CellGrid g{GridSpec{}};
    for (int y = 22; y < 42; ++y)
        for (int x = 20; x < 44; ++x)
            g.at(x, y) = x < 32 ? CellState::Transformed : CellState::Actionable;
    // ee left of the object: the transformed half is adjacent.
    const Observation o = obs_of(g, {6, 32});
    const int om = greedy_direction(o, cfg16(6), true);
    EXPECT_EQ(om, 0);
    const auto counts = recount(g, {6, 32}, cfg16(6), false);
    EXPECT_EQ(counts[om], 0); // all transformed there
}

TEST(Greedy, ArgmaxOracleOnRandomObservations)
{
    Rng rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
        CellGrid g{GridSpec{}};
        const int blobs = 1 + static_cast<int>(rng.below(6));
        for (int b = 0; b < blobs; ++b) {
            const int cx = static_cast<int>(rng.below(64)), cy = static_cast<int>(rng.below(64));
            const int r = 2 + static_cast<int>(rng.below(10));
            for (int y = std::max(0, cy - r); y < std::min(64, cy + r); ++y)
                for (int x = std::max(0, cx - r); x < std::min(64, cx + r); ++x)
                    g.at(x, y) = rng.bernoulli(0.6) ? CellState::Actionable : CellState::Transformed;
        }
        GreedyConfig cfg = cfg16(1.0 + rng.uniform(0, 6));
        cfg.num_directions = rng.bernoulli(0.5) ? 8 : 4 + static_cast<int>(rng.below(9));
        const Vec2 ee{rng.uniform(0, 64), rng.uniform(0, 64)};
        const auto counts = recount(g, ee, cfg, false);
        const int best = *std::max_element(counts.begin(), counts.end());
        const int i = greedy_direction(obs_of(g, ee), cfg, false);
        if (best > 0) {
            ASSERT_GE(i, 0);
            EXPECT_EQ(counts[i], best);
            EXPECT_EQ(i, static_cast<int>(std::find(counts.begin(), counts.end(), best) - counts.begin()));
        }
    }
}

TEST(Greedy, SpocSensitivitySeparation)
{
    Rng rng(5);
    int differing = 0;
    for (int trial = 0; trial < 50; ++trial) {
        CellGrid g{GridSpec{}};
        const int split = 20 + static_cast<int>(rng.below(9));
        for (int y = 18; y < 46; ++y)
            for (int x = 14; x < 50; ++x)
                g.at(x, y) = x < split ? CellState::Transformed : CellState::Actionable;
        const Vec2 ee{rng.uniform(2, 14), rng.uniform(18, 46)};
        const GreedyConfig cfg = cfg16(5.0);
        const int gi = greedy_direction(obs_of(g, ee), cfg, false);
        const int oi = greedy_direction(obs_of(g, ee), cfg, true);
        const auto counts = recount(g, ee, cfg, false);
        // All-zero neighborhoods go to the nearest-cell fallback instead.
        if (*std::max_element(counts.begin(), counts.end()) == 0)
            continue;
        if (gi != oi) {
            ++differing;
            EXPECT_GT(counts[gi], counts[oi]);
        }
    }
    EXPECT_GT(differing, 0);
}

TEST(Greedy, RotationConsistency)
{
    Rng rng(77);
    int checked = 0;
    for (int trial = 0; trial < 200 && checked < 50; ++trial) {
        CellGrid g{GridSpec{}};
        for (int k = 0; k < 300; ++k)
            g.at(static_cast<int>(rng.below(64)), static_cast<int>(rng.below(64))) = CellState::Actionable;
        const GreedyConfig cfg = cfg16(5.0);
        const auto counts = recount(g, {32, 32}, cfg, false);
        const int best = *std::max_element(counts.begin(), counts.end());
        if (std::count(counts.begin(), counts.end(), best) != 1)
            continue;
        CellGrid r{GridSpec{}};
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x)
                r.at(63 - y, x) = g.at(x, y);
        const int a = greedy_direction(obs_of(g, {32, 32}), cfg, false);
        const int b = greedy_direction(obs_of(r, {32, 32}), cfg, false);
        EXPECT_EQ(b, (a + cfg.num_directions / 4) % cfg.num_directions);
        ++checked;
    }
    EXPECT_GE(checked, 20);
}

TEST(Greedy, DeterministicAndSeededTieBreak)
{
    CellGrid g{GridSpec{}, CellState::Actionable};
    GreedyConfig cfg = cfg16();
    EXPECT_EQ(greedy_action(obs_of(g, {32, 32}), cfg), greedy_action(obs_of(g, {32, 32}), cfg));
    cfg.tie_break = TieBreak::SeededRandom;
    Rng a(1), b(1);
    std::vector<int> seen;
    for (int i = 0; i < 40; ++i) {
        const int x = greedy_direction(obs_of(g, {32, 32}), cfg, false, &a);
        EXPECT_EQ(x, greedy_direction(obs_of(g, {32, 32}), cfg, false, &b));
        seen.push_back(x);
    }
    std::sort(seen.begin(), seen.end());
    EXPECT_GT(std::unique(seen.begin(), seen.end()) - seen.begin(), 1);
}

TEST(GreedyConfig, ValidationAndDefaults)
{
    EXPECT_THROW((GreedyConfig{1, 16, 4, TieBreak::LowestIndex}.validate(16)), std::invalid_argument);
    EXPECT_THROW((GreedyConfig{8, 17, 4, TieBreak::LowestIndex}.validate(16)), std::invalid_argument);
    EXPECT_THROW((GreedyConfig{8, 0, 4, TieBreak::LowestIndex}.validate(16)), std::invalid_argument);
    EXPECT_THROW((GreedyConfig{8, 16, 0.5, TieBreak::LowestIndex}.validate(16)), std::invalid_argument);
    WorldConfig w;
    w.task = TaskKind::Mash;
    const GreedyConfig d = default_greedy_config(w);
    EXPECT_EQ(d.num_directions, 8);
    EXPECT_EQ(d.step_mag, w.a_max());
    EXPECT_EQ(d.neighborhood_radius, w.tool.mash_radius);
    EXPECT_NEAR(footprint_equivalent_radius(TaskKind::Spread, w.tool),
                std::sqrt(w.tool.brush_length * w.tool.brush_width / std::numbers::pi), 1e-12);
}

TEST(Random, ReproducibleBoundedCentered)
{
    Rng a(9), b(9);
    double sx = 0, sy = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const Action x = random_action(a, 16.0);
        EXPECT_EQ(x, random_action(b, 16.0));
        ASSERT_LE(std::abs(x.dx), 16.0);
        ASSERT_LE(std::abs(x.dy), 16.0);
        sx += x.dx;
        sy += x.dy;
    }
    const double tol = 3 * 16.0 / std::sqrt(3.0 * n);
    EXPECT_LT(std::abs(sx / n), tol);
    EXPECT_LT(std::abs(sy / n), tol);
}
