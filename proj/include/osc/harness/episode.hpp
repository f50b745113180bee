#pragma once

#include "osc/perception.hpp"
#include "osc/policy.hpp"
#include "osc/reward.hpp"
#include "osc/world.hpp"

#include <cstdint>
#include <functional>
#include <utility>
#include <string>
#include <vector>

namespace osc {

enum class RewardMode { Dense, Sparse, GoalDist };

const char* to_string(RewardMode m);
RewardMode parse_reward_mode(const std::string& s);

/// One environment: world, perception noise, reward shaping and horizon.
struct EnvConfig {
    WorldConfig world;
    NoiseModel noise;
    RewardWeights weights;
    RewardMode reward_mode = RewardMode::Dense;
    int goal_pool = 16;
    int horizon = 10;
};

/// Training reward for the given mode: the full weighted sum, the success
/// term only, or the goal-distance proxy.
double shaped_reward(const EnvConfig& env, const RewardBreakdown& breakdown, double goaldist);

struct StepRecord {
    int step = 0;
    Action action;
    RewardBreakdown reward;
    double goaldist = 0.0;
    double observed_coverage = 0.0;
    double coverage = 0.0;
    std::size_t cells_transformed = 0;
};

struct EpisodeLog {
    std::uint64_t seed = 0;
    std::vector<StepRecord> steps;
    bool success = false;   ///< terminated by the success signal
    bool truncated = false; ///< ran out of horizon
    std::size_t initial_transformed = 0;
    std::size_t final_transformed = 0;
    double initial_coverage = 0.0;
    double final_coverage = 0.0;
};

/// Step-at-a-time form of an episode, for learners that interleave updates
/// with environment steps.
class Environment {
public:
    explicit Environment(EnvConfig env) : env_(std::move(env)) {}

    const EnvConfig& config() const { return env_; }
    const WorldState& state() const { return state_; }
    const SpocMap& current_map() const { return cur_; }
    Observation observation() const { return {cur_, prev_, state_.ee_pos, t_}; }
    int step_index() const { return t_; }
    bool done() const { return done_; }
    bool succeeded() const { return success_; }

    Observation reset(std::uint64_t seed);

    /// Applies the decision and returns the step record. The shaped reward
    /// for the configured mode is written to `shaped` when non-null.
    StepRecord step(const Decision& d, double* shaped = nullptr);

private:
    EnvConfig env_;
    WorldState state_;
    PerceptionState perception_;
    SpocMap cur_;
    SpocMap prev_;
    int t_ = 0;
    bool done_ = true;
    bool success_ = false;
};

/// Invoked once per frame with the ground truth and the observation the
/// policy sees; frame 0 is the reset frame.
using FrameHook = std::function<void(const WorldState&, const SpocMap&)>;

/// reset, then observe -> act -> apply_primitive -> reward -> log until the
/// observed coverage signals success or the horizon is reached.
EpisodeLog run_episode(const EnvConfig& env, Policy& policy, std::uint64_t seed,
                       const FrameHook& on_frame = {});

/// Writes the per-step log as CSV.
void write_episode_csv(const EpisodeLog& log, const std::string& path);

/// Reads (dx, dy) per step back from an episode CSV.
std::vector<Action> read_episode_actions(const std::string& path);

} // namespace osc
