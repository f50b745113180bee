#pragma once

#include "osc/grid.hpp"
#include "osc/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace osc {

enum class TaskKind { Spread, Mash, Slice };
enum class ShapeKind { Rectangle, Ellipse, Blob };

const char* to_string(TaskKind t);
const char* to_string(ShapeKind s);
TaskKind parse_task(const std::string& s);
ShapeKind parse_shape(const std::string& s);

/// Default episode length per task: 10 for spreading, 5 otherwise.
int default_horizon(TaskKind task);

struct ObjectSpec {
    std::string name;
    ShapeKind shape = ShapeKind::Rectangle;
    Vec2 center{32.0, 32.0};
    Vec2 extent{24.0, 20.0}; ///< full width/height in workspace units
    std::uint64_t blob_seed = 0;
    double initial_coverage = 0.0;

    friend bool operator==(const ObjectSpec&, const ObjectSpec&) = default;
};

/// Tool footprint geometry, in cells.
struct ToolParams {
    double brush_length = 12.0;
    double brush_width = 4.0;
    double mash_radius = 6.0;
    double slice_width = 2.0;
    int brush_capacity = 2;
    int refill_period = 2;

    friend bool operator==(const ToolParams&, const ToolParams&) = default;
};

/// Inclusive cell-coordinate bounding box.
struct CellBox {
    int min_x = 0, min_y = 0, max_x = -1, max_y = -1;

    bool empty() const { return max_x < min_x || max_y < min_y; }
    friend bool operator==(const CellBox&, const CellBox&) = default;
};

struct Action {
    double dx = 0.0;
    double dy = 0.0;

    friend bool operator==(const Action&, const Action&) = default;
};

/// Everything needed to build a world, independent of the episode seed.
struct WorldConfig {
    TaskKind task = TaskKind::Spread;
    GridSpec grid;
    ObjectSpec object;
    ToolParams tool;
    double a_max_fraction = 0.25; ///< a_max as a fraction of the shorter workspace side

    double a_max() const;

    friend bool operator==(const WorldConfig&, const WorldConfig&) = default;
};

struct WorldState {
    WorldConfig config;
    CellGrid grid;
    CellBox object_box;
    Vec2 ee_pos;
    int step = 0;
    int brush_charge = 0;
    Rng rng;

    TaskKind task() const { return config.task; }
    std::size_t transformed() const { return grid.count(CellState::Transformed); }
    std::size_t actionable() const { return grid.count(CellState::Actionable); }

    friend bool operator==(const WorldState&, const WorldState&) = default;
};

struct PrimitiveOutcome {
    std::size_t cells_transformed = 0;
    Vec2 new_ee;
    std::vector<int> footprint;
};

/// Cells inside the object region, before any initial coverage is applied.
std::vector<int> rasterize_object(const ObjectSpec& spec, const GridSpec& grid, std::uint64_t seed);

/// Analytic area of the object in workspace units squared.
double analytic_area(const ObjectSpec& spec, std::uint64_t seed);

/// Blob boundary as a fraction of the half-extents at polar angle theta.
/// `blob_seed` is the per-episode seed, mix_seed(spec.blob_seed, seed).
double blob_radius_fraction(std::uint64_t blob_seed, double theta);

/// Builds the initial grid. Throws std::invalid_argument for objects that do
/// not fit with a one-cell margin, empty objects, or initial_coverage >= 1.
WorldState spawn_object(const WorldConfig& config, std::uint64_t seed);

/// Fresh spawn with the end-effector parked one cell in from the origin.
WorldState reset_episode(const WorldConfig& config, std::uint64_t seed);

/// Cell indices touched by one primitive at `pos`, moving along `dir`.
/// A zero `dir` is treated as +x.
std::vector<int> footprint_cells(TaskKind task, const ToolParams& tool, const GridSpec& grid,
                                 Vec2 pos, Vec2 dir, int brush_charge, const CellBox& object_box);

/// Moves the end-effector and executes the task primitive at the new location.
PrimitiveOutcome apply_primitive(WorldState& state, Action action);

bool is_success(const WorldState& state);

Action clamp_action(Action a, double a_max);

} // namespace osc
