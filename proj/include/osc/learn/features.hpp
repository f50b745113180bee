#pragma once

#include "osc/policy.hpp"

#include <cstddef>
#include <vector>

namespace osc::learn {

/// Flat encoder input:
///   [cur actionable D*D | cur transformed D*D | prev actionable D*D |
///    prev transformed D*D | ee_x / extent_x | ee_y / extent_y | step / horizon]
/// Pooled values are label fractions per block; grids that do not divide
/// evenly are padded with background.
using FeatureVector = std::vector<float>;

constexpr std::size_t feature_size(int pool) { return 4 * static_cast<std::size_t>(pool) * pool + 3; }

/// Average-pools one label of `map` onto a pool x pool grid, appending to `out`.
void pool_channel(const CellGrid& map, CellState label, int pool, FeatureVector& out);

FeatureVector encode_observation(const Observation& obs, int pool, int horizon);

} // namespace osc::learn
