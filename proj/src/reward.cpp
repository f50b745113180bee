#include "osc/reward.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace osc {

double spoc_reward(const SpocMap& prev, const SpocMap& cur)
{
    if (prev.grid.cells.size() != cur.grid.cells.size())
        throw std::invalid_argument("spoc_reward: map dimensions differ");
    const auto act_prev = prev.grid.count(CellState::Actionable);
    if (act_prev == 0)
        return 0.0;
    const auto trf_prev = static_cast<double>(prev.grid.count(CellState::Transformed));
    const auto trf_cur = static_cast<double>(cur.grid.count(CellState::Transformed));
    return (trf_cur - trf_prev) / static_cast<double>(act_prev);
}

double success_reward(const SpocMap& cur)
{
    return coverage(cur).coverage > kSuccessCoverage ? 1.0 : 0.0;
}

RewardBreakdown total_reward(const RewardWeights& w, double r_spoc, double r_succ, double r_entropy)
{
    for (double v : {w.alpha, w.beta, w.eta, r_spoc, r_succ, r_entropy}) {
        if (!std::isfinite(v))
            throw std::invalid_argument("total_reward: non-finite input (r_spoc=" + std::to_string(r_spoc) +
                                        ", r_succ=" + std::to_string(r_succ) +
                                        ", r_entropy=" + std::to_string(r_entropy) + ")");
    }
    RewardBreakdown b;
    b.r_spoc = r_spoc;
    b.r_succ = r_succ;
    b.r_entropy = r_entropy;
    b.total = w.alpha * r_spoc + w.beta * r_succ + w.eta * r_entropy;
    return b;
}

CoverageReport coverage(const CellGrid& grid)
{
    CoverageReport r;
    r.transformed_cells = grid.count(CellState::Transformed);
    r.actionable_cells = grid.count(CellState::Actionable);
    r.object_cells = r.transformed_cells + r.actionable_cells;
    if (r.object_cells == 0)
        throw std::invalid_argument("coverage: map has no object cells");
    r.coverage = static_cast<double>(r.transformed_cells) / static_cast<double>(r.object_cells);
    return r;
}

double goal_distance(const CellGrid& map, int pool)
{
    const auto& g = map.spec;
    const int bw = (g.width + pool - 1) / pool;
    const int bh = (g.height + pool - 1) / pool;
    const double block_cells = static_cast<double>(bw) * bh;
    std::vector<double> trf(static_cast<std::size_t>(pool) * pool, 0.0);
    std::vector<double> obj(trf.size(), 0.0);
    for (int idx = 0; idx < static_cast<int>(map.cells.size()); ++idx) {
        const CellState s = map.cells[idx];
        if (s == CellState::Background)
            continue;
        const std::size_t b = static_cast<std::size_t>(g.row(idx) / bh) * pool + g.col(idx) / bw;
        obj[b] += 1.0;
        if (s == CellState::Transformed)
            trf[b] += 1.0;
    }
    double sum = 0.0;
    for (std::size_t b = 0; b < trf.size(); ++b)
        sum += std::abs(trf[b] - obj[b]) / block_cells;
    return sum / static_cast<double>(trf.size());
}

double goaldist_reward(const SpocMap& prev, const SpocMap& cur, int pool)
{
    return goal_distance(prev.grid, pool) - goal_distance(cur.grid, pool);
}

} // namespace osc
