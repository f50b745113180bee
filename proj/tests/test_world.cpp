#include "osc/grid.hpp"
#include "osc/world.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <set>

using namespace osc;

namespace {

WorldConfig rect_config(double w, double h, double initial = 0.0)
{
    WorldConfig c;
    c.object.shape = ShapeKind::Rectangle;
    c.object.extent = {w, h};
    c.object.initial_coverage = initial;
    return c;
}

bool four_connected(const CellGrid& g, CellState label)
{
    std::vector<int> cells;
    for (std::size_t i = 0; i < g.cells.size(); ++i)
        if (g.cells[i] == label)
            cells.push_back(static_cast<int>(i));
    if (cells.empty())
        return true;
    std::vector<char> seen(g.cells.size(), 0);
    std::queue<int> q;
    q.push(cells.front());
    seen[cells.front()] = 1;
    std::size_t reached = 0;
    while (!q.empty()) {
        const int c = q.front();
        q.pop();
        ++reached;
        const int x = g.spec.col(c), y = g.spec.row(c);
        const int nb[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (auto& d : nb) {
            const int nx = x + d[0], ny = y + d[1];
            if (!g.spec.contains(nx, ny))
                continue;
            const int n = g.spec.index(nx, ny);
            if (!seen[n] && g.cells[n] == label) {
                seen[n] = 1;
                q.push(n);
            }
        }
    }
    return reached == cells.size();
}

WorldState state_with_counts(int transformed, int actionable)
{
    WorldState s = reset_episode(rect_config(20, 10), 0);
    int t = 0, a = 0;
    for (auto& c : s.grid.cells) {
        if (c == CellState::Background)
            continue;
        if (t < transformed) {
            c = CellState::Transformed;
            ++t;
        } else if (a < actionable) {
            c = CellState::Actionable;
            ++a;
        } else {
            c = CellState::Background;
        }
    }
    return s;
}

} // namespace

TEST(Spawn, RectangleAreaArithmetic)
{
    const WorldState s = spawn_object(rect_config(20, 10), 0);
    EXPECT_EQ(s.grid.count(CellState::Actionable), 200u);
    EXPECT_EQ(s.grid.count(CellState::Transformed), 0u);
    EXPECT_EQ(s.grid.count(CellState::Background), 64u * 64u - 200u);
}

TEST(Spawn, HalfCoverageIsContiguous)
{
    const WorldState s = spawn_object(rect_config(20, 10, 0.5), 0);
    EXPECT_EQ(s.grid.count(CellState::Actionable), 100u);
    EXPECT_EQ(s.grid.count(CellState::Transformed), 100u);
    EXPECT_TRUE(four_connected(s.grid, CellState::Transformed));
}

TEST(Spawn, InitialCoverageRoundsCellCount)
{
    for (double f : {0.1, 0.25, 0.33, 0.9}) {
        const WorldState s = spawn_object(rect_config(24, 20, f), 0);
        EXPECT_EQ(s.grid.count(CellState::Transformed), static_cast<std::size_t>(std::lround(f * 480)));
        EXPECT_TRUE(four_connected(s.grid, CellState::Transformed));
    }
}

TEST(Spawn, EllipseMatchesDiscArea)
{
    for (double r : {10.0, 12.0, 15.0, 20.0, 25.0}) {
        WorldConfig c;
        c.object.shape = ShapeKind::Ellipse;
        c.object.extent = {2 * r, 2 * r};
        const WorldState s = spawn_object(c, 0);
        const double expected = std::numbers::pi * r * r;
        EXPECT_NEAR(static_cast<double>(s.actionable()), expected, 0.02 * expected) << "r=" << r;
    }
}

TEST(Spawn, EllipseCountMatchesCellCenterOracle)
{
    WorldConfig c;
    c.object.shape = ShapeKind::Ellipse;
    c.object.extent = {30, 18};
    const WorldState s = spawn_object(c, 0);
    std::size_t n = 0;
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) {
            const double u = (x + 0.5 - 32.0) / 15.0, v = (y + 0.5 - 32.0) / 9.0;
            if (u * u + v * v <= 1.0)
                ++n;
        }
    EXPECT_EQ(s.actionable(), n);
}

TEST(Spawn, AreaWithinTwoPercentOfAnalytic)
{
    for (ShapeKind shape : {ShapeKind::Rectangle, ShapeKind::Ellipse, ShapeKind::Blob}) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            WorldConfig c;
            c.object.shape = shape;
            c.object.extent = {40, 30};
            c.object.blob_seed = 11;
            const WorldState s = spawn_object(c, seed);
            const double a = analytic_area(c.object, seed);
            EXPECT_NEAR(static_cast<double>(s.actionable()), a, 0.02 * a) << to_string(shape) << " seed " << seed;
        }
    }
}

TEST(Spawn, Rejections)
{
    WorldConfig c = rect_config(70, 10);
    EXPECT_THROW(spawn_object(c, 0), std::invalid_argument);
    c = rect_config(20, 10);
    c.object.center = {2, 32};
    EXPECT_THROW(spawn_object(c, 0), std::invalid_argument);
    c = rect_config(20, 10, 1.0);
    EXPECT_THROW(spawn_object(c, 0), std::invalid_argument);
    c = rect_config(20, 10, -0.1);
    EXPECT_THROW(spawn_object(c, 0), std::invalid_argument);
}

TEST(Reset, DeterministicAndCornerStart)
{
    WorldConfig c;
    c.object.shape = ShapeKind::Blob;
    c.object.extent = {34, 28};
    EXPECT_EQ(reset_episode(c, 7), reset_episode(c, 7));
    EXPECT_NE(reset_episode(c, 7).grid, reset_episode(c, 8).grid);
    for (std::uint64_t seed : {0ULL, 7ULL, 12345ULL}) {
        const WorldState s = reset_episode(c, seed);
        EXPECT_EQ(s.ee_pos, (Vec2{c.grid.cell_size, c.grid.cell_size}));
        EXPECT_EQ(s.step, 0);
        EXPECT_EQ(s.brush_charge, 2);
    }
    c.grid.cell_size = 0.5;
    EXPECT_EQ(reset_episode(rect_config(20, 10), 0).ee_pos, (Vec2{1.0, 1.0}));
}

TEST(Footprint, MashDiscMatchesExhaustiveScan)
{
    const GridSpec g;
    const ToolParams tool;
    const Vec2 pos{32.0, 32.0};
    const auto fp = footprint_cells(TaskKind::Mash, tool, g, pos, {1, 0}, 0, {});
    std::set<int> expected;
    for (int i = 0; i < static_cast<int>(g.cell_count()); ++i) {
        const Vec2 c = g.cell_center(i);
        if (std::hypot(c.x - pos.x, c.y - pos.y) <= tool.mash_radius)
            expected.insert(i);
    }
    EXPECT_EQ(std::set<int>(fp.begin(), fp.end()), expected);
}

TEST(Footprint, DepletedBrushIsHalfLength)
{
    const GridSpec g;
    for (const ToolParams tool : {ToolParams{}, ToolParams{8, 3, 6, 2, 2, 2}}) {
        for (Vec2 dir : {Vec2{1, 0}, Vec2{0, 1}, Vec2{0.6, 0.8}, Vec2{-0.7071, 0.7071}}) {
            const auto full = footprint_cells(TaskKind::Spread, tool, g, {30.3, 29.7}, dir, 2, {});
            const auto half = footprint_cells(TaskKind::Spread, tool, g, {30.3, 29.7}, dir, 0, {});
            const std::set<int> fs(full.begin(), full.end());
            for (int c : half)
                EXPECT_TRUE(fs.count(c));
            EXPECT_LE(half.size(), (full.size() + 1) / 2 + static_cast<std::size_t>(std::ceil(tool.brush_width)));
            EXPECT_GT(half.size(), 0u);
        }
    }
}

TEST(Footprint, SliceStripSpansObject)
{
    const WorldState s = reset_episode(rect_config(12, 20), 0);
    const ToolParams tool;
    const auto fp = footprint_cells(TaskKind::Slice, tool, s.grid.spec, {32.0, 40.0}, {1, 0}, 0, s.object_box);
    std::set<int> cols, rows;
    for (int c : fp) {
        cols.insert(s.grid.spec.col(c));
        rows.insert(s.grid.spec.row(c));
        EXPECT_NE(s.grid.cells[c], CellState::Background);
    }
    EXPECT_EQ(cols.size(), 2u);
    EXPECT_EQ(rows.size(), 20u);
    EXPECT_EQ(fp.size(), 40u);
}

TEST(Footprint, ZeroDirectionIsPlusX)
{
    const GridSpec g;
    const ToolParams tool;
    EXPECT_EQ(footprint_cells(TaskKind::Spread, tool, g, {32, 32}, {0, 0}, 2, {}),
              footprint_cells(TaskKind::Spread, tool, g, {32, 32}, {1, 0}, 2, {}));
}

TEST(Primitive, TransformedGridIsAbsorbing)
{
    WorldState s = reset_episode(rect_config(24, 20), 0);
    for (auto& c : s.grid.cells)
        if (c == CellState::Actionable)
            c = CellState::Transformed;
    Rng rng(3);
    for (int i = 0; i < 20; ++i)
        EXPECT_EQ(apply_primitive(s, {rng.uniform(-16, 16), rng.uniform(-16, 16)}).cells_transformed, 0u);
}

TEST(Primitive, BackgroundIsImmune)
{
    WorldConfig c = rect_config(10, 10);
    c.task = TaskKind::Mash;
    WorldState s = reset_episode(c, 0);
    const auto before = s.grid;
    const PrimitiveOutcome out = apply_primitive(s, {5.0, 0.0});
    EXPECT_EQ(out.cells_transformed, 0u);
    EXPECT_EQ(s.grid, before);
}

TEST(Primitive, MashInsideActionableTransformsWholeDisc)
{
    WorldConfig c = rect_config(40, 30);
    c.task = TaskKind::Mash;
    WorldState s = reset_episode(c, 0);
    s.ee_pos = {20.0, 20.0};
    const PrimitiveOutcome out = apply_primitive(s, {12.0, 12.0});
    EXPECT_EQ(out.new_ee, (Vec2{32.0, 32.0}));
    std::size_t disc = 0;
    for (int i = 0; i < static_cast<int>(s.grid.spec.cell_count()); ++i) {
        const Vec2 p = s.grid.spec.cell_center(i);
        if (std::hypot(p.x - 32.0, p.y - 32.0) <= c.tool.mash_radius)
            ++disc;
    }
    EXPECT_EQ(out.cells_transformed, disc);
    EXPECT_EQ(out.footprint.size(), disc);
}

TEST(Primitive, BrushChargeCycle)
{
    WorldState s = reset_episode(rect_config(24, 20), 0);
    std::vector<int> charges;
    for (int i = 0; i < 6; ++i) {
        apply_primitive(s, {1.0, 1.0});
        charges.push_back(s.brush_charge);
        EXPECT_GE(s.brush_charge, 0);
    }
    EXPECT_EQ(charges, (std::vector<int>{1, 2, 1, 2, 1, 2}));
}

TEST(Primitive, DepletedBrushPaintsHalfLength)
{
    WorldConfig c = rect_config(40, 30);
    c.tool.refill_period = 100;
    WorldState s = reset_episode(c, 0);
    s.ee_pos = {10.0, 32.0};
    apply_primitive(s, {0.0, -6.0}); // charge 2 -> 1, outside-facing stroke
    apply_primitive(s, {0.0, 0.0});  // charge 1 -> 0
    s.ee_pos = {20.0, 32.0};
    const PrimitiveOutcome out = apply_primitive(s, {12.0, 0.0});
    EXPECT_EQ(s.brush_charge, 0);
    EXPECT_EQ(out.footprint, footprint_cells(TaskKind::Spread, c.tool, s.grid.spec, {32.0, 32.0}, {1, 0}, 0, s.object_box));
}

TEST(Success, StrictThreshold)
{
    EXPECT_TRUE(is_success(state_with_counts(96, 4)));
    EXPECT_FALSE(is_success(state_with_counts(95, 5)));
    EXPECT_FALSE(is_success(state_with_counts(0, 100)));
}

TEST(Action, ClampBoundsAndNonFinite)
{
    EXPECT_EQ(clamp_action({100.0, -100.0}, 16.0), (Action{16.0, -16.0}));
    EXPECT_EQ(clamp_action({std::nan(""), 3.0}, 16.0), (Action{0.0, 3.0}));
}

class RandomWalk : public ::testing::TestWithParam<TaskKind> {};

TEST_P(RandomWalk, MonotoneLocalClampedDeterministic)
{
    WorldConfig c;
    c.task = GetParam();
    c.object.shape = ShapeKind::Blob;
    c.object.extent = {40, 34};
    WorldState s = reset_episode(c, 5);
    WorldState replay = reset_episode(c, 5);
    std::size_t background = s.grid.count(CellState::Background);
    Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
        const Action a{rng.uniform(-16, 16), rng.uniform(-16, 16)};
        const CellGrid before = s.grid;
        const std::size_t t0 = s.transformed();
        const PrimitiveOutcome out = apply_primitive(s, a);
        apply_primitive(replay, a);
        ASSERT_GE(s.transformed(), t0);
        ASSERT_EQ(s.transformed() - t0, out.cells_transformed);
        ASSERT_EQ(s.grid.count(CellState::Background), background);
        ASSERT_GE(s.ee_pos.x, 0.0);
        ASSERT_LE(s.ee_pos.x, 64.0);
        ASSERT_GE(s.ee_pos.y, 0.0);
        ASSERT_LE(s.ee_pos.y, 64.0);
        const std::set<int> fp(out.footprint.begin(), out.footprint.end());
        for (std::size_t k = 0; k < s.grid.cells.size(); ++k)
            if (!fp.count(static_cast<int>(k)))
                ASSERT_EQ(s.grid.cells[k], before.cells[k]);
        if (i % 100 == 99) {
            // restart so the walk keeps finding actionable cells
            s = reset_episode(c, 5 + i);
            replay = reset_episode(c, 5 + i);
            background = s.grid.count(CellState::Background);
        }
    }
    EXPECT_EQ(s, replay);
}

INSTANTIATE_TEST_SUITE_P(Tasks, RandomWalk, ::testing::Values(TaskKind::Spread, TaskKind::Mash, TaskKind::Slice),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(GridFormat, RoundTripAndHeader)
{
    const WorldState s = reset_episode(rect_config(24, 20, 0.3), 0);
    const auto bytes = serialize_grid(s.grid);
    ASSERT_EQ(bytes.size(), 16u + 64u * 64u);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "OSCG");
    EXPECT_EQ(bytes[4], 64);
    EXPECT_EQ(bytes[5], 0);
    EXPECT_EQ(bytes[8], 64);
    EXPECT_EQ(deserialize_grid(bytes), s.grid);
}

TEST(GridFormat, RejectsCorruptInput)
{
    const WorldState s = reset_episode(rect_config(24, 20), 0);
    auto bytes = serialize_grid(s.grid);
    auto bad = bytes;
    bad[0] = 'X';
    EXPECT_THROW(deserialize_grid(bad), std::runtime_error);
    bad = bytes;
    bad.back() = 3;
    EXPECT_THROW(deserialize_grid(bad), std::runtime_error);
    bad = bytes;
    bad.pop_back();
    EXPECT_THROW(deserialize_grid(bad), std::runtime_error);
}

TEST(GridSpec, Validation)
{
    EXPECT_THROW((GridSpec{4, 64, 1.0}.validate()), std::invalid_argument);
    EXPECT_THROW((GridSpec{64, 64, 0.0}.validate()), std::invalid_argument);
    EXPECT_NO_THROW((GridSpec{8, 8, 0.5}.validate()));
}
