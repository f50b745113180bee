#include "osc/harness/episode.hpp"

#include "osc/harness/csv.hpp"

#include <stdexcept>

namespace osc {

const char* to_string(RewardMode m)
{
    switch (m) {
    case RewardMode::Dense: return "dense";
    case RewardMode::Sparse: return "sparse";
    case RewardMode::GoalDist: return "goaldist";
    }
    return "?";
}

RewardMode parse_reward_mode(const std::string& s)
{
    if (s == "dense") return RewardMode::Dense;
    if (s == "sparse") return RewardMode::Sparse;
    if (s == "goaldist") return RewardMode::GoalDist;
    throw std::invalid_argument("unknown reward mode '" + s + "'");
}

double shaped_reward(const EnvConfig& env, const RewardBreakdown& breakdown, double goaldist)
{
    switch (env.reward_mode) {
    case RewardMode::Dense: return breakdown.total;
    case RewardMode::Sparse: return env.weights.beta * breakdown.r_succ;
    case RewardMode::GoalDist: return goaldist;
    }
    return 0.0;
}

Observation Environment::reset(std::uint64_t seed)
{
    state_ = reset_episode(env_.world, seed);
    perception_ = init_perception(mix_seed(seed, 0x5b0c), env_.noise);
    cur_ = observe(state_, perception_, env_.noise);
    prev_ = cur_;
    t_ = 0;
    done_ = env_.horizon <= 0;
    success_ = false;
    return observation();
}

StepRecord Environment::step(const Decision& d, double* shaped)
{
    if (done_)
        throw std::logic_error("Environment::step called on a finished episode");
    const PrimitiveOutcome outcome = apply_primitive(state_, d.action);
    SpocMap next = observe(state_, perception_, env_.noise);

    StepRecord rec;
    rec.step = t_;
    rec.action = clamp_action(d.action, env_.world.a_max());
    rec.reward = total_reward(env_.weights, spoc_reward(cur_, next), success_reward(next), d.entropy_term);
    rec.goaldist = goaldist_reward(cur_, next, env_.goal_pool);
    rec.observed_coverage = coverage(next).coverage;
    rec.coverage = coverage(state_).coverage;
    rec.cells_transformed = outcome.cells_transformed;
    if (shaped != nullptr)
        *shaped = shaped_reward(env_, rec.reward, rec.goaldist);

    prev_ = std::move(cur_);
    cur_ = std::move(next);
    ++t_;
    success_ = rec.reward.r_succ > 0.0;
    done_ = success_ || t_ >= env_.horizon;
    return rec;
}

EpisodeLog run_episode(const EnvConfig& env, Policy& policy, std::uint64_t seed, const FrameHook& on_frame)
{
    Environment e(env);
    e.reset(seed);
    policy.begin_episode(seed);
    if (on_frame)
        on_frame(e.state(), e.current_map());

    EpisodeLog log;
    log.seed = seed;
    log.initial_transformed = e.state().transformed();
    log.initial_coverage = coverage(e.state()).coverage;

    while (!e.done()) {
        log.steps.push_back(e.step(policy.act(e.observation())));
        if (on_frame)
            on_frame(e.state(), e.current_map());
    }
    log.success = e.succeeded();
    log.truncated = !log.success;
    log.final_transformed = e.state().transformed();
    log.final_coverage = coverage(e.state()).coverage;
    return log;
}

void write_episode_csv(const EpisodeLog& log, const std::string& path)
{
    CsvWriter csv(path, {"step", "r_spoc", "r_succ", "r_entropy", "total", "coverage", "observed_coverage",
                         "goaldist", "dx", "dy", "cells_transformed"});
    for (const auto& s : log.steps) {
        csv.row(s.step, s.reward.r_spoc, s.reward.r_succ, s.reward.r_entropy, s.reward.total, s.coverage,
                s.observed_coverage, s.goaldist, s.action.dx, s.action.dy, s.cells_transformed);
    }
}

std::vector<Action> read_episode_actions(const std::string& path)
{
    const auto table = read_csv(path);
    const auto ix = table.column("dx");
    const auto iy = table.column("dy");
    std::vector<Action> actions;
    for (const auto& row : table.rows)
        actions.push_back({std::stod(row.at(ix)), std::stod(row.at(iy))});
    return actions;
}

} // namespace osc
