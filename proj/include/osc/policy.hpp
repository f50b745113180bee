#pragma once

#include "osc/perception.hpp"
#include "osc/rng.hpp"
#include "osc/world.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace osc {

struct Observation {
    SpocMap cur_map;
    SpocMap prev_map; ///< equals cur_map at step 0
    Vec2 ee_pos;
    int step = 0;
};

enum class TieBreak { LowestIndex, SeededRandom };

struct GreedyConfig {
    int num_directions = 8;
    double step_mag = 16.0;           ///< workspace units
    double neighborhood_radius = 4.0; ///< cells
    TieBreak tie_break = TieBreak::LowestIndex;

    void validate(double a_max) const;
};

/// Neighborhood radius matching the area one primitive of `task` covers.
double footprint_equivalent_radius(TaskKind task, const ToolParams& tool);

/// Greedy defaults for a world: 8 directions, full-magnitude steps.
GreedyConfig default_greedy_config(const WorldConfig& world);

/// Candidate displacement for direction index i.
Action candidate_action(const GreedyConfig& cfg, int i);

/// Counts cells of `label` whose centers lie within `radius_cells` of `p`.
int count_near(const CellGrid& map, Vec2 p, double radius_cells, CellState label);
/// Counts object cells (either label) within the radius.
int count_object_near(const CellGrid& map, Vec2 p, double radius_cells);

/// Direction index chosen by the greedy rule, or -1 for the zero action.
int greedy_direction(const Observation& obs, const GreedyConfig& cfg, bool object_mask, Rng* rng = nullptr);

/// Moves toward the densest actionable neighborhood among the candidates.
Action greedy_action(const Observation& obs, const GreedyConfig& cfg, Rng* rng = nullptr);

/// Same rule over all object cells, ignoring the actionable/transformed split.
Action objmask_action(const Observation& obs, const GreedyConfig& cfg, Rng* rng = nullptr);

/// Independent uniform components on [-a_max, a_max].
Action random_action(Rng& rng, double a_max);

/// What a controller returns each step. `entropy_term` is -log pi(a|s) for
/// stochastic learned policies and 0 otherwise.
struct Decision {
    Action action;
    double entropy_term = 0.0;
    std::array<double, 2> pre_squash{0.0, 0.0};
};

class Policy {
public:
    virtual ~Policy() = default;
    virtual std::string name() const = 0;
    virtual void begin_episode(std::uint64_t /*seed*/) {}
    virtual Decision act(const Observation& obs) = 0;
};

class RandomPolicy final : public Policy {
public:
    explicit RandomPolicy(double a_max) : a_max_(a_max) {}
    std::string name() const override { return "random"; }
    void begin_episode(std::uint64_t seed) override { rng_ = Rng(mix_seed(seed, 0x7a11d)); }
    Decision act(const Observation&) override { return {random_action(rng_, a_max_)}; }

private:
    double a_max_;
    Rng rng_;
};

class GreedyPolicy final : public Policy {
public:
    GreedyPolicy(GreedyConfig cfg, bool object_mask) : cfg_(cfg), object_mask_(object_mask) {}
    std::string name() const override { return object_mask_ ? "objmask" : "sparta_g"; }
    void begin_episode(std::uint64_t seed) override { rng_ = Rng(mix_seed(seed, 0x9eed)); }
    Decision act(const Observation& obs) override
    {
        Rng* r = cfg_.tie_break == TieBreak::SeededRandom ? &rng_ : nullptr;
        return {object_mask_ ? objmask_action(obs, cfg_, r) : greedy_action(obs, cfg_, r)};
    }

private:
    GreedyConfig cfg_;
    bool object_mask_;
    Rng rng_;
};

/// Row-by-row sweep over the observed object: each step targets the first
/// actionable cell in row-major order. Used as a reference coverage routine.
class SweepPolicy final : public Policy {
public:
    explicit SweepPolicy(const WorldConfig& world) : world_(world) {}
    std::string name() const override { return "sweep"; }
    Decision act(const Observation& obs) override;

private:
    WorldConfig world_;
};

} // namespace osc
