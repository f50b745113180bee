#include "osc/learn/trainer.hpp"

#include "osc/binary_io.hpp"
#include "osc/harness/csv.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace osc::learn {

namespace {

// Largest squashed magnitude stored, so the pre-squash value stays finite.
constexpr double kMaxSquashed = 1.0 - 1e-6;

} // namespace

void TrainConfig::validate() const
{
    sac.validate();
    if (episodes < 0 || utd < 0 || seed_rollouts < 0 || learning_starts < 0 || pool < 1)
        throw std::invalid_argument("invalid training configuration");
}

Transition make_transition(const FeatureVector& obs, const Action& action, double a_max, double reward,
                           const FeatureVector& next_obs, bool done)
{
    Transition t;
    t.obs = obs;
    t.next_obs = next_obs;
    t.reward = reward;
    t.done = done;
    const double comp[2] = {action.dx, action.dy};
    for (int i = 0; i < 2; ++i) {
        const double s = std::clamp(comp[i] / a_max, -kMaxSquashed, kMaxSquashed);
        t.action[i] = static_cast<float>(s);
        t.pre_squash[i] = static_cast<float>(std::atanh(s));
    }
    return t;
}

void seed_buffer_with_greedy(const EnvConfig& env, ReplayBuffer& buffer, int n, std::uint64_t seed, int pool)
{
    GreedyPolicy greedy(default_greedy_config(env.world), false);
    Environment e(env);
    const double a_max = env.world.a_max();
    for (int k = 0; k < n; ++k) {
        const std::uint64_t ep_seed = mix_seed(seed, 0x6eed0000ULL + static_cast<std::uint64_t>(k));
        e.reset(ep_seed);
        greedy.begin_episode(ep_seed);
        FeatureVector f = encode_observation(e.observation(), pool, env.horizon);
        while (!e.done()) {
            const Decision d = greedy.act(e.observation());
            double r = 0.0;
            const StepRecord rec = e.step(d, &r);
            FeatureVector nf = encode_observation(e.observation(), pool, env.horizon);
            buffer.add(make_transition(f, rec.action, a_max, r, nf, e.done()));
            f = std::move(nf);
        }
    }
}

std::uint64_t training_episode_seed(std::uint64_t seed, int episode)
{
    return mix_seed(seed, 0x7a000000ULL + static_cast<std::uint64_t>(episode));
}

namespace {

void dump_state(const TrainConfig& cfg, const SacAgent& agent, const ReplayBuffer& buffer)
{
    if (cfg.dump_dir.empty())
        return;
    std::filesystem::create_directories(cfg.dump_dir);
    agent.save((std::filesystem::path(cfg.dump_dir) / "diverged.oscl").string());
    io::write_file((std::filesystem::path(cfg.dump_dir) / "diverged.oscr").string(), buffer.serialize());
}

} // namespace

TrainResult train(const EnvConfig& env, const TrainConfig& cfg, std::uint64_t seed)
{
    cfg.validate();
#if defined(__GLIBC__)
    // Batch matrices are a few MB and reallocated every update. Without this
    // glibc hands them back to the kernel each time and page faults dominate.
    mallopt(M_TRIM_THRESHOLD, 256 << 20);
    mallopt(M_MMAP_THRESHOLD, 64 << 20);
#endif
    const int dim = static_cast<int>(feature_size(cfg.pool));
    TrainResult result;
    result.agent = std::make_unique<SacAgent>(cfg.sac, dim, seed);
    SacAgent& agent = *result.agent;
    ReplayBuffer buffer(cfg.sac.buffer_capacity, static_cast<std::size_t>(dim));
    seed_buffer_with_greedy(env, buffer, cfg.seed_rollouts, seed, cfg.pool);

    const std::size_t starts =
        static_cast<std::size_t>(cfg.learning_starts > 0 ? cfg.learning_starts : cfg.sac.batch);
    const double a_max = env.world.a_max();
    Rng act_rng(mix_seed(seed, 0xac7));
    Environment e(env);

    for (int ep = 0; ep < cfg.episodes; ++ep) {
        e.reset(training_episode_seed(seed, ep));
        FeatureVector f = encode_observation(e.observation(), cfg.pool, env.horizon);
        double actor_sum = 0.0, critic_sum = 0.0;
        int actor_n = 0, critic_n = 0;
        while (!e.done()) {
            const ActSample s = agent.act(f, act_rng, false);
            Decision d;
            d.action = {a_max * s.action[0], a_max * s.action[1]};
            d.entropy_term = -s.log_prob;
            d.pre_squash = s.pre_squash;
            double r = 0.0;
            e.step(d, &r);
            FeatureVector nf = encode_observation(e.observation(), cfg.pool, env.horizon);
            Transition t;
            t.obs = std::move(f);
            t.action = {static_cast<float>(s.action[0]), static_cast<float>(s.action[1])};
            t.pre_squash = {static_cast<float>(s.pre_squash[0]), static_cast<float>(s.pre_squash[1])};
            t.reward = r;
            t.next_obs = nf;
            t.done = e.done();
            buffer.add(std::move(t));
            f = std::move(nf);
            ++result.env_steps;

            if (buffer.size() < starts)
                continue;
            for (int u = 0; u < cfg.utd; ++u) {
                const UpdateReport rep = agent.update(buffer);
                if (!std::isfinite(rep.critic_loss) || !std::isfinite(rep.actor_loss) || !std::isfinite(rep.alpha)) {
                    dump_state(cfg, agent, buffer);
                    throw TrainingDiverged("training diverged at episode " + std::to_string(ep) +
                                           ", critic update " + std::to_string(agent.critic_updates()));
                }
                critic_sum += rep.critic_loss;
                ++critic_n;
                if (rep.actor_updated) {
                    actor_sum += rep.actor_loss;
                    ++actor_n;
                }
            }
        }
        if (!agent.finite()) {
            dump_state(cfg, agent, buffer);
            throw TrainingDiverged("non-finite parameters after episode " + std::to_string(ep));
        }
        CurvePoint p;
        p.episode = ep;
        p.env_steps = result.env_steps;
        p.coverage = coverage(e.state()).coverage;
        p.success = e.succeeded();
        p.actor_loss = actor_n > 0 ? actor_sum / actor_n : 0.0;
        p.critic_loss = critic_n > 0 ? critic_sum / critic_n : 0.0;
        p.alpha_ent = agent.alpha();
        result.curve.push_back(p);
    }
    return result;
}

void write_curve_csv(const std::vector<CurvePoint>& curve, const std::string& path)
{
    CsvWriter csv(path, {"episode", "env_steps", "coverage", "success", "actor_loss", "critic_loss", "alpha_ent"});
    for (const auto& p : curve)
        csv.row(p.episode, p.env_steps, p.coverage, p.success, p.actor_loss, p.critic_loss, p.alpha_ent);
}

double final_mean_coverage(const std::vector<CurvePoint>& curve, int n)
{
    if (curve.empty())
        return 0.0;
    const std::size_t k = std::min(curve.size(), static_cast<std::size_t>(std::max(n, 1)));
    double s = 0.0;
    for (std::size_t i = curve.size() - k; i < curve.size(); ++i)
        s += curve[i].coverage;
    return s / static_cast<double>(k);
}

LearnedPolicy::LearnedPolicy(std::shared_ptr<const SacAgent> agent, std::string name, double a_max, int pool,
                             int horizon, bool deterministic)
    : agent_(std::move(agent)), name_(std::move(name)), a_max_(a_max), pool_(pool), horizon_(horizon),
      deterministic_(deterministic)
{
    if (!agent_)
        throw std::invalid_argument("LearnedPolicy needs an agent");
}

Decision LearnedPolicy::act(const Observation& obs)
{
    const ActSample s = agent_->act(encode_observation(obs, pool_, horizon_), rng_, deterministic_);
    Decision d;
    d.action = {a_max_ * s.action[0], a_max_ * s.action[1]};
    d.entropy_term = deterministic_ ? 0.0 : -s.log_prob;
    d.pre_squash = s.pre_squash;
    return d;
}

} // namespace osc::learn
