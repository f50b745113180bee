#pragma once

#include "osc/harness/episode.hpp"
#include "osc/learn/replay_buffer.hpp"
#include "osc/learn/sac.hpp"

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace osc::learn {

struct TrainConfig {
    SacConfig sac;
    int episodes = 500;
    int utd = 4;            ///< gradient updates per environment step
    int seed_rollouts = 5;  ///< greedy episodes placed in the buffer first
    int learning_starts = 0; ///< buffer size before updates begin; 0 means one batch
    int pool = 16;          ///< feature pooling resolution
    std::string dump_dir;   ///< where a diverged run leaves its state; empty disables

    void validate() const;
};

struct CurvePoint {
    int episode = 0;
    long env_steps = 0;
    double coverage = 0.0; ///< ground truth at episode end
    bool success = false;
    double actor_loss = 0.0;  ///< mean over the episode's actor updates
    double critic_loss = 0.0; ///< mean over the episode's critic updates
    double alpha_ent = 0.0;   ///< entropy coefficient at episode end
};

struct TrainResult {
    std::vector<CurvePoint> curve;
    std::unique_ptr<SacAgent> agent;
    long env_steps = 0;
};

class TrainingDiverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Maps an environment action to the normalized squashed space and the
/// pre-squash value that reproduces it.
Transition make_transition(const FeatureVector& obs, const Action& action, double a_max, double reward,
                           const FeatureVector& next_obs, bool done);

/// Rolls out `n` greedy episodes and stores every step with the reward the
/// learner's environment config assigns to it.
void seed_buffer_with_greedy(const EnvConfig& env, ReplayBuffer& buffer, int n, std::uint64_t seed, int pool);

/// Seed of training episode `episode` for run seed `seed`.
std::uint64_t training_episode_seed(std::uint64_t seed, int episode);

/// Interleaved collection and SAC updates. Throws TrainingDiverged, after
/// writing the agent and buffer to `dump_dir`, when losses or parameters
/// stop being finite.
TrainResult train(const EnvConfig& env, const TrainConfig& cfg, std::uint64_t seed);

void write_curve_csv(const std::vector<CurvePoint>& curve, const std::string& path);

/// Mean ground-truth coverage over the last `n` curve entries (all when fewer).
double final_mean_coverage(const std::vector<CurvePoint>& curve, int n);

/// Evaluation wrapper around a trained agent.
class LearnedPolicy final : public Policy {
public:
    LearnedPolicy(std::shared_ptr<const SacAgent> agent, std::string name, double a_max, int pool, int horizon,
                  bool deterministic);
    std::string name() const override { return name_; }
    void begin_episode(std::uint64_t seed) override { rng_ = Rng(mix_seed(seed, 0xac7)); }
    Decision act(const Observation& obs) override;

private:
    std::shared_ptr<const SacAgent> agent_;
    std::string name_;
    double a_max_;
    int pool_;
    int horizon_;
    bool deterministic_;
    Rng rng_;
};

} // namespace osc::learn
