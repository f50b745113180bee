#include "osc/perception.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace osc {

namespace {

long long dist2(const GridSpec& g, int a, int b)
{
    const long long dx = g.col(a) - g.col(b);
    const long long dy = g.row(a) - g.row(b);
    return dx * dx + dy * dy;
}

std::vector<int> object_cells_of(const CellGrid& grid)
{
    std::vector<int> cells;
    for (int i = 0; i < static_cast<int>(grid.cells.size()); ++i) {
        if (grid.cells[i] != CellState::Background)
            cells.push_back(i);
    }
    return cells;
}

CellState flipped(CellState s)
{
    return s == CellState::Actionable ? CellState::Transformed : CellState::Actionable;
}

} // namespace

void NoiseModel::validate() const
{
    if (!(flip_prob >= 0.0 && flip_prob <= 0.2))
        throw std::invalid_argument("noise flip_prob must lie in [0, 0.2]");
    if (std::abs(dilate_radius) > 2)
        throw std::invalid_argument("noise dilate_radius must lie in [-2, 2]");
    if (reclassify_period < 1)
        throw std::invalid_argument("noise reclassify_period must be >= 1");
    if (!(error_rate >= 0.0 && error_rate <= 1.0))
        throw std::invalid_argument("noise error_rate must lie in [0, 1]");
}

std::vector<int> farthest_point_seeds(const std::vector<int>& object_cells, int k, const GridSpec& grid,
                                      int first_seed)
{
    if (k < 1 || static_cast<std::size_t>(k) > object_cells.size())
        throw std::invalid_argument("region count " + std::to_string(k) + " not in [1, " +
                                    std::to_string(object_cells.size()) + "]");
    std::vector<int> cells = object_cells;
    std::sort(cells.begin(), cells.end());
    std::vector<long long> nearest(cells.size(), std::numeric_limits<long long>::max());
    std::vector<int> seeds{first_seed};
    while (static_cast<int>(seeds.size()) < k) {
        const int last = seeds.back();
        std::size_t best = 0;
        long long best_d = -1;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            nearest[i] = std::min(nearest[i], dist2(grid, cells[i], last));
            if (nearest[i] > best_d) {
                best_d = nearest[i];
                best = i;
            }
        }
        seeds.push_back(cells[best]);
    }
    return seeds;
}

RegionPartition assign_to_seeds(const std::vector<int>& object_cells, std::vector<int> seeds,
                                const GridSpec& grid)
{
    RegionPartition p;
    p.seeds = std::move(seeds);
    p.cells = object_cells;
    std::sort(p.cells.begin(), p.cells.end());
    p.region_id.resize(p.cells.size());
    for (std::size_t i = 0; i < p.cells.size(); ++i) {
        int best = 0;
        for (int r = 1; r < static_cast<int>(p.seeds.size()); ++r) {
            const long long d = dist2(grid, p.cells[i], p.seeds[r]);
            const long long bd = dist2(grid, p.cells[i], p.seeds[best]);
            if (d < bd || (d == bd && p.seeds[r] < p.seeds[best]))
                best = r;
        }
        p.region_id[i] = best;
    }
    return p;
}

RegionPartition partition_regions(const std::vector<int>& object_cells, int k, const GridSpec& grid)
{
    if (object_cells.empty())
        throw std::invalid_argument("cannot partition an empty object");
    if (k < 1 || static_cast<std::size_t>(k) > object_cells.size())
        throw std::invalid_argument("region count " + std::to_string(k) + " not in [1, " +
                                    std::to_string(object_cells.size()) + "]");
    std::vector<int> cells = object_cells;
    std::sort(cells.begin(), cells.end());

    double mx = 0.0, my = 0.0;
    for (int c : cells) {
        mx += grid.col(c);
        my += grid.row(c);
    }
    mx /= static_cast<double>(cells.size());
    my /= static_cast<double>(cells.size());
    int first = cells.front();
    double best = std::numeric_limits<double>::max();
    for (int c : cells) {
        const double dx = grid.col(c) - mx, dy = grid.row(c) - my;
        const double d = dx * dx + dy * dy;
        if (d < best) {
            best = d;
            first = c;
        }
    }
    return assign_to_seeds(cells, farthest_point_seeds(cells, k, grid, first), grid);
}

int default_region_count(std::size_t object_cells)
{
    const int k = std::max<int>(4, static_cast<int>((object_cells + 25) / 50));
    return std::min<int>(k, static_cast<int>(object_cells));
}

RegionPartition split_by_state(const RegionPartition& partition, const CellGrid& truth)
{
    const auto& g = truth.spec;
    const int k = static_cast<int>(partition.region_count());
    // new id for (region, state) pairs, -1 until first seen
    std::vector<int> remap(static_cast<std::size_t>(k) * 2, -1);
    RegionPartition out;
    out.cells = partition.cells;
    out.region_id.resize(partition.cells.size());
    std::vector<int> parent;
    for (int r = 0; r < k; ++r) {
        for (int s = 0; s < 2; ++s) {
            const CellState want = s == 0 ? CellState::Actionable : CellState::Transformed;
            for (std::size_t i = 0; i < partition.cells.size(); ++i) {
                if (partition.region_id[i] == r && truth.cells[partition.cells[i]] == want) {
                    remap[r * 2 + s] = static_cast<int>(parent.size());
                    parent.push_back(r);
                    break;
                }
            }
        }
    }
    out.seeds.assign(parent.size(), -1);
    std::vector<long long> seed_d(parent.size(), std::numeric_limits<long long>::max());
    for (std::size_t i = 0; i < partition.cells.size(); ++i) {
        const int cell = partition.cells[i];
        const int r = partition.region_id[i];
        const int s = truth.cells[cell] == CellState::Transformed ? 1 : 0;
        const int id = remap[r * 2 + s];
        out.region_id[i] = id;
        const long long d = dist2(g, cell, partition.seeds[r]);
        if (d < seed_d[id]) {
            seed_d[id] = d;
            out.seeds[id] = cell;
        }
    }
    return out;
}

SpocMap classify_regions(const RegionPartition& partition, const CellGrid& truth, ClassifierOracle& oracle)
{
    const std::size_t k = partition.region_count();
    std::vector<std::size_t> n_trf(k, 0), n_act(k, 0);
    for (std::size_t i = 0; i < partition.cells.size(); ++i) {
        const CellState s = truth.cells[partition.cells[i]];
        if (s == CellState::Transformed)
            ++n_trf[partition.region_id[i]];
        else if (s == CellState::Actionable)
            ++n_act[partition.region_id[i]];
    }
    std::vector<CellState> label(k);
    for (std::size_t r = 0; r < k; ++r) {
        label[r] = n_trf[r] > n_act[r] ? CellState::Transformed : CellState::Actionable;
        if (oracle.rng.uniform() < oracle.error_rate)
            label[r] = flipped(label[r]);
    }
    SpocMap map;
    map.grid = CellGrid(truth.spec);
    for (std::size_t i = 0; i < partition.cells.size(); ++i)
        map.grid.cells[partition.cells[i]] = label[partition.region_id[i]];
    return map;
}

std::vector<char> morph(const std::vector<char>& mask, const std::vector<char>& allowed,
                        const GridSpec& grid, int radius)
{
    if (radius == 0)
        return mask;
    const int r = std::abs(radius);
    const bool dilate = radius > 0;
    std::vector<char> out(mask.size(), 0);
    for (int idx = 0; idx < static_cast<int>(mask.size()); ++idx) {
        if (!allowed[idx])
            continue;
        if (!dilate && !mask[idx])
            continue;
        const int cx = grid.col(idx), cy = grid.row(idx);
        bool hit = !dilate;
        for (int dy = -r; dy <= r && hit != dilate; ++dy) {
            for (int dx = -r; dx <= r; ++dx) {
                if (dx * dx + dy * dy > r * r || !grid.contains(cx + dx, cy + dy))
                    continue;
                const int n = grid.index(cx + dx, cy + dy);
                if (dilate && mask[n]) {
                    hit = true;
                    break;
                }
                if (!dilate && allowed[n] && !mask[n]) {
                    hit = false;
                    break;
                }
            }
        }
        out[idx] = hit ? 1 : 0;
    }
    return out;
}

std::vector<int> boundary_band(const CellGrid& map)
{
    const auto& g = map.spec;
    std::vector<int> band;
    for (int idx = 0; idx < static_cast<int>(map.cells.size()); ++idx) {
        const CellState s = map.cells[idx];
        if (s == CellState::Background)
            continue;
        const int cx = g.col(idx), cy = g.row(idx);
        const int nbr[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (const auto& d : nbr) {
            if (!g.contains(cx + d[0], cy + d[1]))
                continue;
            const CellState o = map.at(cx + d[0], cy + d[1]);
            if (o != CellState::Background && o != s) {
                band.push_back(idx);
                break;
            }
        }
    }
    return band;
}

PerceptionState init_perception(std::uint64_t seed, const NoiseModel& noise)
{
    noise.validate();
    PerceptionState s;
    s.oracle.error_rate = noise.error_rate;
    s.oracle.rng = Rng(mix_seed(seed, 0x0c1a55));
    s.rng = Rng(mix_seed(seed, 0xf11b));
    return s;
}

SpocMap classification_pass(PerceptionState& state, const WorldState& truth)
{
    const auto cells = object_cells_of(truth.grid);
    const auto partition = partition_regions(cells, default_region_count(cells.size()), truth.grid.spec);
    SpocMap map = classify_regions(split_by_state(partition, truth.grid), truth.grid, state.oracle);
    map.frame_index = state.frame;
    state.tracked = map.grid;
    state.last_truth = truth.grid;
    state.frames_since_reclassify = 0;
    state.initialized = true;
    state.last_map = map;
    ++state.frame;
    return map;
}

SpocMap propagate_mask(PerceptionState& state, const WorldState& truth, const NoiseModel& noise)
{
    if (!state.initialized)
        return classification_pass(state, truth);
    const auto& g = truth.grid.spec;
    const std::size_t n = truth.grid.cells.size();
    std::vector<char> fresh(n, 0), object(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        object[i] = truth.grid.cells[i] != CellState::Background;
        fresh[i] = truth.grid.cells[i] == CellState::Transformed &&
                   state.last_truth.cells[i] != CellState::Transformed;
    }
    const auto perturbed = morph(fresh, object, g, noise.dilate_radius);
    for (std::size_t i = 0; i < n; ++i) {
        if (perturbed[i])
            state.tracked.cells[i] = CellState::Transformed;
    }

    SpocMap map;
    map.grid = state.tracked;
    if (noise.flip_prob > 0.0) {
        for (int idx : boundary_band(state.tracked)) {
            if (state.rng.uniform() < noise.flip_prob)
                map.grid.cells[idx] = flipped(map.grid.cells[idx]);
        }
    }
    map.frame_index = state.frame;
    state.last_truth = truth.grid;
    ++state.frames_since_reclassify;
    ++state.frame;
    state.last_map = map;
    return map;
}

SpocMap observe(const WorldState& truth, PerceptionState& state, const NoiseModel& noise)
{
    if (!state.initialized || state.frame % noise.reclassify_period == 0)
        return classification_pass(state, truth);
    return propagate_mask(state, truth, noise);
}

} // namespace osc
