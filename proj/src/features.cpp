#include "osc/learn/features.hpp"

#include <algorithm>
#include <stdexcept>

namespace osc::learn {

void pool_channel(const CellGrid& map, CellState label, int pool, FeatureVector& out)
{
    const auto& g = map.spec;
    const int bw = (g.width + pool - 1) / pool;
    const int bh = (g.height + pool - 1) / pool;
    const float inv = 1.0f / static_cast<float>(bw * bh);
    const std::size_t base = out.size();
    out.resize(base + static_cast<std::size_t>(pool) * pool, 0.0f);
    for (int cy = 0; cy < g.height; ++cy) {
        for (int cx = 0; cx < g.width; ++cx) {
            if (map.at(cx, cy) == label)
                out[base + static_cast<std::size_t>(cy / bh) * pool + cx / bw] += 1.0f;
        }
    }
    for (std::size_t i = base; i < out.size(); ++i)
        out[i] *= inv;
}

FeatureVector encode_observation(const Observation& obs, int pool, int horizon)
{
    if (pool < 1)
        throw std::invalid_argument("pool size must be >= 1");
    if (obs.cur_map.grid.spec.width != obs.prev_map.grid.spec.width ||
        obs.cur_map.grid.spec.height != obs.prev_map.grid.spec.height)
        throw std::invalid_argument("encode_observation: map dimensions differ");
    FeatureVector f;
    f.reserve(feature_size(pool));
    pool_channel(obs.cur_map.grid, CellState::Actionable, pool, f);
    pool_channel(obs.cur_map.grid, CellState::Transformed, pool, f);
    pool_channel(obs.prev_map.grid, CellState::Actionable, pool, f);
    pool_channel(obs.prev_map.grid, CellState::Transformed, pool, f);
    const auto& g = obs.cur_map.grid.spec;
    f.push_back(static_cast<float>(std::clamp(obs.ee_pos.x / g.extent_x(), 0.0, 1.0)));
    f.push_back(static_cast<float>(std::clamp(obs.ee_pos.y / g.extent_y(), 0.0, 1.0)));
    f.push_back(horizon > 0 ? std::clamp(static_cast<float>(obs.step) / static_cast<float>(horizon), 0.0f, 1.0f)
                            : 0.0f);
    return f;
}

} // namespace osc::learn
