#include "osc/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace osc {

namespace {

template <typename Pred>
int count_where(const CellGrid& map, Vec2 p, double radius_cells, Pred pred)
{
    const auto& g = map.spec;
    const double r = radius_cells * g.cell_size;
    const int x0 = std::max(0, static_cast<int>(std::floor((p.x - r) / g.cell_size)));
    const int y0 = std::max(0, static_cast<int>(std::floor((p.y - r) / g.cell_size)));
    const int x1 = std::min(g.width - 1, static_cast<int>(std::floor((p.x + r) / g.cell_size)));
    const int y1 = std::min(g.height - 1, static_cast<int>(std::floor((p.y + r) / g.cell_size)));
    int n = 0;
    for (int cy = y0; cy <= y1; ++cy) {
        for (int cx = x0; cx <= x1; ++cx) {
            const double dx = (cx + 0.5) * g.cell_size - p.x;
            const double dy = (cy + 0.5) * g.cell_size - p.y;
            if (dx * dx + dy * dy <= r * r && pred(map.at(cx, cy)))
                ++n;
        }
    }
    return n;
}

} // namespace

void GreedyConfig::validate(double a_max) const
{
    if (num_directions < 2)
        throw std::invalid_argument("greedy num_directions must be >= 2");
    if (!(step_mag > 0.0) || step_mag > a_max + 1e-12)
        throw std::invalid_argument("greedy step_mag must lie in (0, a_max]");
    if (!(neighborhood_radius >= 1.0))
        throw std::invalid_argument("greedy neighborhood_radius must be >= 1");
}

double footprint_equivalent_radius(TaskKind task, const ToolParams& tool)
{
    switch (task) {
    case TaskKind::Spread:
        return std::max(1.0, std::sqrt(tool.brush_length * tool.brush_width / std::numbers::pi));
    case TaskKind::Mash: return std::max(1.0, tool.mash_radius);
    case TaskKind::Slice: return std::max(1.0, 2.0 * tool.slice_width);
    }
    return 1.0;
}

GreedyConfig default_greedy_config(const WorldConfig& world)
{
    GreedyConfig cfg;
    cfg.step_mag = world.a_max();
    cfg.neighborhood_radius = footprint_equivalent_radius(world.task, world.tool);
    return cfg;
}

Action candidate_action(const GreedyConfig& cfg, int i)
{
    const double theta = 2.0 * std::numbers::pi * i / cfg.num_directions;
    return {cfg.step_mag * std::cos(theta), cfg.step_mag * std::sin(theta)};
}

int count_near(const CellGrid& map, Vec2 p, double radius_cells, CellState label)
{
    return count_where(map, p, radius_cells, [label](CellState s) { return s == label; });
}

int count_object_near(const CellGrid& map, Vec2 p, double radius_cells)
{
    return count_where(map, p, radius_cells, [](CellState s) { return s != CellState::Background; });
}

int greedy_direction(const Observation& obs, const GreedyConfig& cfg, bool object_mask, Rng* rng)
{
    const auto& map = obs.cur_map.grid;
    const auto& g = map.spec;
    auto wanted = [object_mask](CellState s) {
        return object_mask ? s != CellState::Background : s == CellState::Actionable;
    };

    std::vector<Vec2> endpoints(cfg.num_directions);
    std::vector<int> counts(cfg.num_directions);
    for (int i = 0; i < cfg.num_directions; ++i) {
        const Action a = candidate_action(cfg, i);
        endpoints[i] = g.clamp({obs.ee_pos.x + a.dx, obs.ee_pos.y + a.dy});
        counts[i] = count_where(map, endpoints[i], cfg.neighborhood_radius, wanted);
    }
    const int best_count = *std::max_element(counts.begin(), counts.end());

    if (best_count > 0) {
        std::vector<int> tied;
        for (int i = 0; i < cfg.num_directions; ++i) {
            if (counts[i] == best_count)
                tied.push_back(i);
        }
        if (rng != nullptr && tied.size() > 1)
            return tied[rng->below(tied.size())];
        return tied.front();
    }

    // Empty neighborhoods everywhere: head for the nearest wanted cell.
    double best_d = std::numeric_limits<double>::infinity();
    int best = -1;
    for (int i = 0; i < cfg.num_directions; ++i) {
        for (int idx = 0; idx < static_cast<int>(map.cells.size()); ++idx) {
            if (!wanted(map.cells[idx]))
                continue;
            const Vec2 c = g.cell_center(idx);
            const double d = std::hypot(c.x - endpoints[i].x, c.y - endpoints[i].y);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
    }
    return best;
}

Action greedy_action(const Observation& obs, const GreedyConfig& cfg, Rng* rng)
{
    const int i = greedy_direction(obs, cfg, false, rng);
    return i < 0 ? Action{} : candidate_action(cfg, i);
}

Action objmask_action(const Observation& obs, const GreedyConfig& cfg, Rng* rng)
{
    const int i = greedy_direction(obs, cfg, true, rng);
    return i < 0 ? Action{} : candidate_action(cfg, i);
}

Action random_action(Rng& rng, double a_max)
{
    const double dx = rng.uniform(-a_max, a_max);
    const double dy = rng.uniform(-a_max, a_max);
    return {dx, dy};
}

Decision SweepPolicy::act(const Observation& obs)
{
    const auto& map = obs.cur_map.grid;
    const auto& g = map.spec;
    const auto it = std::find(map.cells.begin(), map.cells.end(), CellState::Actionable);
    if (it == map.cells.end())
        return {};
    const int idx = static_cast<int>(it - map.cells.begin());
    const Vec2 c = g.cell_center(idx);
    const double cs = g.cell_size;

    // Place the tool so its footprint starts at the target cell.
    Vec2 target = c;
    switch (world_.task) {
    case TaskKind::Spread:
        target = {c.x + (world_.tool.brush_length / 2.0 - 0.5) * cs,
                  c.y + (world_.tool.brush_width / 2.0 - 0.5) * cs};
        break;
    case TaskKind::Mash:
        target = {c.x + (world_.tool.mash_radius - 1.0) * cs * 0.7,
                  c.y + (world_.tool.mash_radius - 1.0) * cs * 0.7};
        break;
    case TaskKind::Slice: target = {c.x + (world_.tool.slice_width / 2.0 - 0.5) * cs, c.y}; break;
    }
    return {clamp_action({target.x - obs.ee_pos.x, target.y - obs.ee_pos.y}, world_.a_max())};
}

} // namespace osc
