#include "osc/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace osc {

namespace {

struct BlobHarmonics {
    double amp[3];
    double phase[3];
    double amp_sum;
};

BlobHarmonics blob_harmonics(std::uint64_t blob_seed)
{
    Rng rng(mix_seed(blob_seed, 0xb10b));
    BlobHarmonics h{};
    h.amp_sum = 0.0;
    for (int k = 0; k < 3; ++k) {
        h.amp[k] = rng.uniform(0.2, 1.0);
        h.phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
        h.amp_sum += h.amp[k];
    }
    return h;
}

std::uint64_t effective_blob_seed(const ObjectSpec& spec, std::uint64_t seed)
{
    return mix_seed(spec.blob_seed, seed);
}

bool inside_object(const ObjectSpec& spec, const BlobHarmonics& blob, double px, double py)
{
    const double hx = spec.extent.x / 2.0;
    const double hy = spec.extent.y / 2.0;
    const double dx = px - spec.center.x;
    const double dy = py - spec.center.y;
    switch (spec.shape) {
    case ShapeKind::Rectangle:
        // half-open so an extent of n cells covers exactly n cells when aligned
        return dx >= -hx && dx < hx && dy >= -hy && dy < hy;
    case ShapeKind::Ellipse:
        return (dx / hx) * (dx / hx) + (dy / hy) * (dy / hy) <= 1.0;
    case ShapeKind::Blob: {
        const double nx = dx / hx;
        const double ny = dy / hy;
        const double r = std::hypot(nx, ny);
        if (r == 0.0)
            return true;
        double s = 0.0;
        const double theta = std::atan2(ny, nx);
        for (int k = 0; k < 3; ++k)
            s += blob.amp[k] * std::cos((k + 2) * theta + blob.phase[k]);
        return r <= 0.8 + 0.2 * s / blob.amp_sum;
    }
    }
    return false;
}

void validate_object(const ObjectSpec& spec, const GridSpec& grid)
{
    if (!(spec.extent.x > 0.0) || !(spec.extent.y > 0.0))
        throw std::invalid_argument("object '" + spec.name + "' has non-positive extent");
    if (!(spec.initial_coverage >= 0.0) || spec.initial_coverage >= 1.0)
        throw std::invalid_argument("object '" + spec.name + "' initial_coverage must lie in [0, 1)");
    const double margin = grid.cell_size;
    const double lo_x = spec.center.x - spec.extent.x / 2.0;
    const double hi_x = spec.center.x + spec.extent.x / 2.0;
    const double lo_y = spec.center.y - spec.extent.y / 2.0;
    const double hi_y = spec.center.y + spec.extent.y / 2.0;
    if (lo_x < margin || lo_y < margin || hi_x > grid.extent_x() - margin ||
        hi_y > grid.extent_y() - margin) {
        throw std::invalid_argument("object '" + spec.name +
                                    "' does not fit inside the workspace with a one-cell margin");
    }
}

Vec2 normalized_or_x(Vec2 v)
{
    const double n = std::hypot(v.x, v.y);
    if (n == 0.0 || !std::isfinite(n))
        return {1.0, 0.0};
    return {v.x / n, v.y / n};
}

} // namespace

const char* to_string(TaskKind t)
{
    switch (t) {
    case TaskKind::Spread: return "spread";
    case TaskKind::Mash: return "mash";
    case TaskKind::Slice: return "slice";
    }
    return "?";
}

const char* to_string(ShapeKind s)
{
    switch (s) {
    case ShapeKind::Rectangle: return "rectangle";
    case ShapeKind::Ellipse: return "ellipse";
    case ShapeKind::Blob: return "blob";
    }
    return "?";
}

TaskKind parse_task(const std::string& s)
{
    if (s == "spread") return TaskKind::Spread;
    if (s == "mash") return TaskKind::Mash;
    if (s == "slice") return TaskKind::Slice;
    throw std::invalid_argument("unknown task '" + s + "'");
}

ShapeKind parse_shape(const std::string& s)
{
    if (s == "rectangle") return ShapeKind::Rectangle;
    if (s == "ellipse") return ShapeKind::Ellipse;
    if (s == "blob") return ShapeKind::Blob;
    throw std::invalid_argument("unknown shape '" + s + "'");
}

int default_horizon(TaskKind task)
{
    return task == TaskKind::Spread ? 10 : 5;
}

double WorldConfig::a_max() const
{
    return a_max_fraction * std::min(grid.extent_x(), grid.extent_y());
}

double blob_radius_fraction(std::uint64_t blob_seed, double theta)
{
    const auto h = blob_harmonics(blob_seed);
    double s = 0.0;
    for (int k = 0; k < 3; ++k)
        s += h.amp[k] * std::cos((k + 2) * theta + h.phase[k]);
    return 0.8 + 0.2 * s / h.amp_sum;
}

double analytic_area(const ObjectSpec& spec, std::uint64_t seed)
{
    const double hx = spec.extent.x / 2.0;
    const double hy = spec.extent.y / 2.0;
    switch (spec.shape) {
    case ShapeKind::Rectangle: return spec.extent.x * spec.extent.y;
    case ShapeKind::Ellipse: return std::numbers::pi * hx * hy;
    case ShapeKind::Blob: {
        // 1/2 * integral of (0.8 + 0.2 s)^2 with s a zero-mean sum of harmonics
        const auto h = blob_harmonics(effective_blob_seed(spec, seed));
        double sq = 0.0;
        for (double a : h.amp)
            sq += a * a;
        const double mean_s2 = 0.5 * sq / (h.amp_sum * h.amp_sum);
        return hx * hy * std::numbers::pi * (0.64 + 0.04 * mean_s2);
    }
    }
    return 0.0;
}

std::vector<int> rasterize_object(const ObjectSpec& spec, const GridSpec& grid, std::uint64_t seed)
{
    const auto blob = blob_harmonics(effective_blob_seed(spec, seed));
    std::vector<int> cells;
    for (int idx = 0; idx < static_cast<int>(grid.cell_count()); ++idx) {
        const Vec2 c = grid.cell_center(idx);
        if (inside_object(spec, blob, c.x, c.y))
            cells.push_back(idx);
    }
    return cells;
}

WorldState spawn_object(const WorldConfig& config, std::uint64_t seed)
{
    config.grid.validate();
    validate_object(config.object, config.grid);

    WorldState state;
    state.config = config;
    state.grid = CellGrid(config.grid);
    state.rng = Rng(seed);

    const auto cells = rasterize_object(config.object, config.grid, seed);
    if (cells.empty())
        throw std::invalid_argument("object '" + config.object.name + "' covers no cells");

    CellBox box{config.grid.width, config.grid.height, -1, -1};
    for (int idx : cells) {
        state.grid.cells[idx] = CellState::Actionable;
        box.min_x = std::min(box.min_x, config.grid.col(idx));
        box.max_x = std::max(box.max_x, config.grid.col(idx));
        box.min_y = std::min(box.min_y, config.grid.row(idx));
        box.max_y = std::max(box.max_y, config.grid.row(idx));
    }
    state.object_box = box;

    // Pre-transformed region grows outward from the object's low corner,
    // always through 4-connected object cells closest to that corner.
    const auto target =
        static_cast<std::size_t>(std::llround(config.object.initial_coverage * cells.size()));
    if (target > 0) {
        const auto& g = config.grid;
        const Vec2 corner{box.min_x * g.cell_size, box.min_y * g.cell_size};
        auto dist2 = [&](int idx) {
            const Vec2 c = g.cell_center(idx);
            return (c.x - corner.x) * (c.x - corner.x) + (c.y - corner.y) * (c.y - corner.y);
        };
        using Entry = std::pair<double, int>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
        std::vector<char> queued(g.cell_count(), 0);
        int start = cells.front();
        for (int idx : cells) {
            if (dist2(idx) < dist2(start))
                start = idx;
        }
        frontier.emplace(dist2(start), start);
        queued[start] = 1;
        std::size_t grown = 0;
        while (!frontier.empty() && grown < target) {
            const int idx = frontier.top().second;
            frontier.pop();
            state.grid.cells[idx] = CellState::Transformed;
            ++grown;
            const int cx = g.col(idx), cy = g.row(idx);
            const int nbr[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
            for (const auto& d : nbr) {
                const int nx = cx + d[0], ny = cy + d[1];
                if (!g.contains(nx, ny))
                    continue;
                const int n = g.index(nx, ny);
                if (!queued[n] && state.grid.cells[n] == CellState::Actionable) {
                    queued[n] = 1;
                    frontier.emplace(dist2(n), n);
                }
            }
        }
    }

    state.ee_pos = {config.grid.cell_size, config.grid.cell_size};
    state.step = 0;
    state.brush_charge = config.task == TaskKind::Spread ? config.tool.brush_capacity : 0;
    return state;
}

WorldState reset_episode(const WorldConfig& config, std::uint64_t seed)
{
    auto state = spawn_object(config, seed);
    state.ee_pos = {config.grid.cell_size, config.grid.cell_size};
    return state;
}

std::vector<int> footprint_cells(TaskKind task, const ToolParams& tool, const GridSpec& grid,
                                 Vec2 pos, Vec2 dir, int brush_charge, const CellBox& object_box)
{
    const double cs = grid.cell_size;
    const Vec2 d = normalized_or_x(dir);
    const Vec2 n{-d.y, d.x};
    std::vector<int> out;

    auto scan = [&](int x0, int y0, int x1, int y1, auto&& pred) {
        x0 = std::max(x0, 0);
        y0 = std::max(y0, 0);
        x1 = std::min(x1, grid.width - 1);
        y1 = std::min(y1, grid.height - 1);
        for (int cy = y0; cy <= y1; ++cy) {
            for (int cx = x0; cx <= x1; ++cx) {
                const int idx = grid.index(cx, cy);
                const Vec2 c = grid.cell_center(idx);
                if (pred(c.x - pos.x, c.y - pos.y))
                    out.push_back(idx);
            }
        }
    };

    switch (task) {
    case TaskKind::Spread: {
        const double length = (brush_charge > 0 ? tool.brush_length : tool.brush_length / 2.0) * cs;
        const double half_l = length / 2.0;
        const double half_w = tool.brush_width * cs / 2.0;
        const double reach = half_l + half_w + cs;
        scan(static_cast<int>(std::floor((pos.x - reach) / cs)),
             static_cast<int>(std::floor((pos.y - reach) / cs)),
             static_cast<int>(std::floor((pos.x + reach) / cs)),
             static_cast<int>(std::floor((pos.y + reach) / cs)), [&](double vx, double vy) {
                 const double t = vx * d.x + vy * d.y;
                 const double u = vx * n.x + vy * n.y;
                 return t >= -half_l && t < half_l && u >= -half_w && u < half_w;
             });
        break;
    }
    case TaskKind::Mash: {
        const double r = tool.mash_radius * cs;
        scan(static_cast<int>(std::floor((pos.x - r) / cs)),
             static_cast<int>(std::floor((pos.y - r) / cs)),
             static_cast<int>(std::floor((pos.x + r) / cs)),
             static_cast<int>(std::floor((pos.y + r) / cs)),
             [&](double vx, double vy) { return vx * vx + vy * vy <= r * r; });
        break;
    }
    case TaskKind::Slice: {
        if (object_box.empty())
            break;
        const double half_w = tool.slice_width * cs / 2.0;
        scan(object_box.min_x, object_box.min_y, object_box.max_x, object_box.max_y,
             [&](double vx, double vy) {
                 const double t = vx * d.x + vy * d.y;
                 return t >= -half_w && t < half_w;
             });
        break;
    }
    }
    return out;
}

Action clamp_action(Action a, double a_max)
{
    auto c = [a_max](double v) { return std::isfinite(v) ? std::clamp(v, -a_max, a_max) : 0.0; };
    return {c(a.dx), c(a.dy)};
}

PrimitiveOutcome apply_primitive(WorldState& state, Action action)
{
    const auto& cfg = state.config;
    const Action a = clamp_action(action, cfg.a_max());
    state.ee_pos = cfg.grid.clamp({state.ee_pos.x + a.dx, state.ee_pos.y + a.dy});

    PrimitiveOutcome outcome;
    outcome.new_ee = state.ee_pos;
    outcome.footprint = footprint_cells(cfg.task, cfg.tool, cfg.grid, state.ee_pos, {a.dx, a.dy},
                                        state.brush_charge, state.object_box);
    for (int idx : outcome.footprint) {
        if (state.grid.cells[idx] == CellState::Actionable) {
            state.grid.cells[idx] = CellState::Transformed;
            ++outcome.cells_transformed;
        }
    }

    ++state.step;
    if (cfg.task == TaskKind::Spread) {
        state.brush_charge = std::max(0, state.brush_charge - 1);
        if (cfg.tool.refill_period > 0 && state.step % cfg.tool.refill_period == 0)
            state.brush_charge = cfg.tool.brush_capacity;
    }
    return outcome;
}

bool is_success(const WorldState& state)
{
    const auto t = state.transformed();
    const auto obj = t + state.actionable();
    return obj > 0 && static_cast<double>(t) / static_cast<double>(obj) > 0.95;
}

} // namespace osc
