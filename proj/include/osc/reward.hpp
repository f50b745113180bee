#pragma once

#include "osc/perception.hpp"
#include "osc/world.hpp"

#include <cstddef>

namespace osc {

struct RewardWeights {
    double alpha = 1.0;
    double beta = 1.0;
    double eta = 0.001;
};

struct RewardBreakdown {
    double r_spoc = 0.0;
    double r_succ = 0.0;
    double r_entropy = 0.0;
    double total = 0.0;
};

struct CoverageReport {
    std::size_t transformed_cells = 0;
    std::size_t actionable_cells = 0;
    std::size_t object_cells = 0;
    double coverage = 0.0;
};

/// Success threshold on the transformed fraction (strict).
inline constexpr double kSuccessCoverage = 0.95;

/// Newly transformed area since `prev`, normalized by the actionable area of
/// `prev`. Returns 0 when `prev` has no actionable cells. Negative values are
/// possible under noisy perception.
double spoc_reward(const SpocMap& prev, const SpocMap& cur);

/// 1 when the observed coverage exceeds 95%, else 0.
double success_reward(const SpocMap& cur);

/// Weighted sum of the three terms. Throws std::invalid_argument on non-finite input.
RewardBreakdown total_reward(const RewardWeights& w, double r_spoc, double r_succ, double r_entropy);

/// Exact transformed fraction. Throws std::invalid_argument when there are no object cells.
CoverageReport coverage(const CellGrid& grid);
inline CoverageReport coverage(const SpocMap& map) { return coverage(map.grid); }
inline CoverageReport coverage(const WorldState& state) { return coverage(state.grid); }

/// Goal-distance proxy: mean absolute difference between the pooled
/// transformed fraction of `map` and that of the fully transformed object,
/// over a pool x pool grid of blocks.
double goal_distance(const CellGrid& map, int pool = 16);

/// Decrease in goal distance from `prev` to `cur`.
double goaldist_reward(const SpocMap& prev, const SpocMap& cur, int pool = 16);

} // namespace osc
