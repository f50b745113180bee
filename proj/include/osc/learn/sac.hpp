#pragma once

#include "osc/learn/adam.hpp"
#include "osc/learn/features.hpp"
#include "osc/learn/mlp.hpp"
#include "osc/learn/replay_buffer.hpp"
#include "osc/rng.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace osc::learn {

struct SacConfig {
    double lr = 3e-4;
    int warmup_updates = 1000; ///< linear learning-rate ramp
    double gamma = 0.95;
    int batch = 256;
    double tau = 0.005;
    int actor_every = 10; ///< critic updates per actor update
    bool auto_alpha = true;
    double init_alpha = 0.01;
    double target_entropy = -2.0;
    std::size_t buffer_capacity = 100000;
    std::vector<int> hidden{256, 256};
    bool critic_layer_norm = true;

    void validate() const;
};

struct UpdateReport {
    bool performed = false;
    bool actor_updated = false;
    double critic_loss = 0.0;
    double actor_loss = 0.0;
    double alpha = 0.0;
    double mean_log_prob = 0.0;
    int skipped = 0; ///< optimizer steps dropped for non-finite gradients
};

struct ActSample {
    std::array<double, 2> action{0.0, 0.0}; ///< squashed, in [-1, 1]
    std::array<double, 2> pre_squash{0.0, 0.0};
    double log_prob = 0.0; ///< of the squashed action; 0 in deterministic mode
};

/// Soft actor-critic with twin critics, target networks and a tuned
/// entropy coefficient. Networks use single precision.
class SacAgent {
public:
    SacAgent(SacConfig cfg, int feature_dim, std::uint64_t seed);

    const SacConfig& config() const { return cfg_; }
    int feature_dim() const { return feature_dim_; }

    /// Stochastic sample, or tanh(mean) when `deterministic`.
    ActSample act(const FeatureVector& features, Rng& rng, bool deterministic) const;

    /// One critic step, plus an actor and entropy-coefficient step on every
    /// `actor_every`-th critic step. No-op when the buffer is empty.
    UpdateReport update(const ReplayBuffer& buffer);

    double alpha() const;
    double log_alpha() const { return log_alpha_; }
    long critic_updates() const { return critic_updates_; }
    long actor_updates() const { return actor_updates_; }
    double learning_rate(long step) const;

    const Mlp<float>& actor() const { return actor_; }
    const Mlp<float>& q1() const { return q1_; }
    const Mlp<float>& q2() const { return q2_; }
    const Mlp<float>& q1_target() const { return q1_t_; }
    const Mlp<float>& q2_target() const { return q2_t_; }

    /// Checkpoint bytes: "OSCL", version, network shapes, then length-prefixed
    /// float blobs for actor, q1, q2, q1 target, q2 target and log alpha.
    std::vector<std::uint8_t> checkpoint() const;
    void restore(const std::vector<std::uint8_t>& bytes);
    void save(const std::string& path) const;
    static SacAgent load(const std::string& path, SacConfig cfg = {});

    /// True when every parameter and the entropy coefficient are finite.
    bool finite() const;

private:
    SacConfig cfg_;
    int feature_dim_;
    Mlp<float> actor_, q1_, q2_, q1_t_, q2_t_;
    AdamState<float> actor_opt_, q1_opt_, q2_opt_;
    double log_alpha_;
    double alpha_m_ = 0.0, alpha_v_ = 0.0;
    long alpha_steps_ = 0;
    long critic_updates_ = 0;
    long actor_updates_ = 0;
    Rng rng_;
};

} // namespace osc::learn
