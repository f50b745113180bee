#pragma once

#include "osc/grid.hpp"
#include "osc/rng.hpp"
#include "osc/world.hpp"

#include <cstdint>
#include <vector>

namespace osc {

/// Observed affordance map. Same labels as CellState, but an observation.
struct SpocMap {
    CellGrid grid;
    int frame_index = 0;

    friend bool operator==(const SpocMap&, const SpocMap&) = default;
};

/// Intra-object regions seeded by farthest-point sampling.
struct RegionPartition {
    std::vector<int> seeds;     ///< cell indices, one per region
    std::vector<int> cells;     ///< object cells, ascending index
    std::vector<int> region_id; ///< parallel to `cells`, in [0, seeds.size())

    std::size_t region_count() const { return seeds.size(); }
};

/// Region classifier standing in for the vision-language model.
struct ClassifierOracle {
    double error_rate = 0.0;
    Rng rng;
};

struct NoiseModel {
    double flip_prob = 0.0;
    int dilate_radius = 0;
    int reclassify_period = 4;
    double error_rate = 0.0; ///< classifier oracle error, per region and pass

    void validate() const;
    bool noiseless() const { return flip_prob == 0.0 && dilate_radius == 0 && error_rate == 0.0; }
};

struct PerceptionState {
    SpocMap last_map;
    int frames_since_reclassify = 0;
    int frame = 0;
    bool initialized = false;
    CellGrid tracked;    ///< observed transformed set before boundary flips
    CellGrid last_truth; ///< ground truth at the previous frame
    ClassifierOracle oracle;
    Rng rng;
};

/// Farthest-point sampling over object cells. The first seed is the cell
/// nearest the centroid; ties resolve to the smallest row-major index, both
/// for seed choice and for assigning cells to seeds. Throws when
/// k < 1 or k > cells.size().
RegionPartition partition_regions(const std::vector<int>& object_cells, int k, const GridSpec& grid);

/// Farthest-point seeds starting from a given first seed; each further seed
/// maximizes its minimum distance to the chosen ones.
std::vector<int> farthest_point_seeds(const std::vector<int>& object_cells, int k, const GridSpec& grid,
                                      int first_seed);

/// Assigns every cell to its nearest seed.
RegionPartition assign_to_seeds(const std::vector<int>& object_cells, std::vector<int> seeds,
                                const GridSpec& grid);

/// Region count used by the perception pipeline: one region per ~50 cells, at least 4.
int default_region_count(std::size_t object_cells);

/// Splits every region along ground-truth state boundaries, the way a
/// point-prompted segmenter follows visual edges. Each sub-region's seed is
/// its cell closest to the parent seed.
RegionPartition split_by_state(const RegionPartition& partition, const CellGrid& truth);

/// Labels each region by the majority ground-truth state (ties go to
/// Actionable) and flips it with the oracle's error rate.
SpocMap classify_regions(const RegionPartition& partition, const CellGrid& truth, ClassifierOracle& oracle);

/// Morphological dilation (radius > 0) or erosion (radius < 0) of `mask`
/// with a Euclidean disc, restricted to `allowed` cells.
std::vector<char> morph(const std::vector<char>& mask, const std::vector<char>& allowed,
                        const GridSpec& grid, int radius);

/// Object cells 4-adjacent to a cell of the other object label.
std::vector<int> boundary_band(const CellGrid& map);

PerceptionState init_perception(std::uint64_t seed, const NoiseModel& noise);

/// Full classification pass over the current ground truth.
SpocMap classification_pass(PerceptionState& state, const WorldState& truth);

/// Tracks newly transformed cells into the observed map.
SpocMap propagate_mask(PerceptionState& state, const WorldState& truth, const NoiseModel& noise);

/// Produces this frame's observation, choosing the classification or the
/// propagation path by the reclassification cadence.
SpocMap observe(const WorldState& truth, PerceptionState& state, const NoiseModel& noise);

} // namespace osc
