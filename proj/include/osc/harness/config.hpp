#pragma once

#include "osc/harness/episode.hpp"
#include "osc/learn/trainer.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace osc {

struct ObjectEntry {
    TaskKind task = TaskKind::Spread;
    ObjectSpec spec;
    bool seen = false; ///< the training object of its task
};

/// Built-in object sets: one seen rectangle and unseen ellipse/blob variants per task.
std::vector<ObjectEntry> default_objects(TaskKind task);

/// Everything a CLI verb needs. Loaded from an INI-style file whose
/// sections and keys are checked strictly; unknown ones are errors.
struct ExperimentConfig {
    std::string name = "experiment";
    TaskKind task = TaskKind::Spread;
    int horizon = 0; ///< 0 selects the task default
    std::vector<std::uint64_t> seeds{1, 2, 3};
    int eval_rollouts = 5;
    std::string policy = "sparta_g";
    std::string output_dir = "out";

    GridSpec grid;
    ToolParams tool;
    double a_max_fraction = 0.25;
    NoiseModel noise;
    RewardWeights weights;
    int goal_pool = 16;

    int num_directions = 8;
    std::optional<double> step_mag;            ///< default a_max
    std::optional<double> neighborhood_radius; ///< default footprint-equivalent radius
    TieBreak tie_break = TieBreak::LowestIndex;

    learn::TrainConfig train;
    RewardMode train_reward = RewardMode::Dense;
    bool deterministic_eval = true;
    std::string checkpoint_dir; ///< empty: <output_dir>/checkpoints

    std::vector<TaskKind> matrix_tasks{TaskKind::Spread, TaskKind::Mash, TaskKind::Slice};
    std::vector<std::string> matrix_policies{"random", "sparta_g", "objmask"};

    TaskKind ablation_task = TaskKind::Mash;
    double ablation_initial_coverage = 0.5;
    int ablation_episodes = 30;

    int render_scale = 4;

    std::vector<ObjectEntry> objects; ///< empty: default_objects per task

    void validate() const;

    std::vector<ObjectEntry> objects_for(TaskKind task) const;
    ObjectEntry seen_object(TaskKind task) const;
    int horizon_for(TaskKind task) const;
    WorldConfig world_for(TaskKind task, const ObjectSpec& object) const;
    EnvConfig env_for(TaskKind task, const ObjectSpec& object, RewardMode mode = RewardMode::Dense) const;
    GreedyConfig greedy_for(const WorldConfig& world) const;
    std::string checkpoint_path(TaskKind task, RewardMode mode, std::uint64_t seed) const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Policy identifiers accepted by the harness.
bool is_learned_policy(const std::string& id);
RewardMode learned_policy_mode(const std::string& id);
std::string learned_policy_id(RewardMode mode);

/// Replaces the seed list with base, base+1, ... keeping its length.
void override_seeds(ExperimentConfig& cfg, std::uint64_t base);

} // namespace osc
