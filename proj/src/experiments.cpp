#include "osc/harness/experiments.hpp"

#include "osc/harness/csv.hpp"
#include "osc/harness/render.hpp"
#include "osc/learn/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace osc {

namespace fs = std::filesystem;

std::unique_ptr<Policy> make_policy(const ExperimentConfig& cfg, const std::string& id, const WorldConfig& world,
                                    std::uint64_t seed)
{
    if (id == "random")
        return std::make_unique<RandomPolicy>(world.a_max());
    if (id == "sparta_g")
        return std::make_unique<GreedyPolicy>(cfg.greedy_for(world), false);
    if (id == "objmask")
        return std::make_unique<GreedyPolicy>(cfg.greedy_for(world), true);
    if (id == "sweep")
        return std::make_unique<SweepPolicy>(world);
    if (is_learned_policy(id)) {
        const std::string path = cfg.checkpoint_path(world.task, learned_policy_mode(id), seed);
        if (!fs::exists(path))
            return nullptr;
        auto agent = std::make_shared<const learn::SacAgent>(learn::SacAgent::load(path, cfg.train.sac));
        return std::make_unique<learn::LearnedPolicy>(agent, id, world.a_max(), cfg.train.pool,
                                                      cfg.horizon_for(world.task), cfg.deterministic_eval);
    }
    throw std::invalid_argument("unknown policy '" + id + "'");
}

Summary summarize(const std::vector<double>& values)
{
    Summary s;
    s.n = static_cast<int>(values.size());
    if (values.empty())
        return s;
    for (double v : values)
        s.mean += v;
    s.mean /= s.n;
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : values)
            ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / (s.n - 1));
    }
    return s;
}

std::vector<EpisodeRecord> run_experiment(const ExperimentConfig& cfg, const std::string& out_dir)
{
    std::unique_ptr<CsvWriter> summary;
    if (!out_dir.empty()) {
        fs::create_directories(fs::path(out_dir) / "episodes");
        summary = std::make_unique<CsvWriter>(
            (fs::path(out_dir) / "summary.csv").string(),
            std::vector<std::string>{"task", "object", "split", "policy", "seed", "rollout", "episode_seed", "steps",
                                     "success", "initial_coverage", "final_coverage"});
    }

    std::vector<EpisodeRecord> records;
    for (const auto& obj : cfg.objects_for(cfg.task)) {
        const EnvConfig env = cfg.env_for(cfg.task, obj.spec);
        for (std::uint64_t seed : cfg.seeds) {
            auto policy = make_policy(cfg, cfg.policy, env.world, seed);
            if (!policy)
                throw std::runtime_error("missing checkpoint " +
                                         cfg.checkpoint_path(cfg.task, learned_policy_mode(cfg.policy), seed));
            for (int r = 0; r < cfg.eval_rollouts; ++r) {
                EpisodeRecord rec{obj.spec.name, obj.seen, seed, r, run_episode(env, *policy, rollout_seed(seed, r))};
                if (summary) {
                    const std::string stem =
                        obj.spec.name + "_seed" + std::to_string(seed) + "_r" + std::to_string(r) + ".csv";
                    write_episode_csv(rec.log, (fs::path(out_dir) / "episodes" / stem).string());
                    summary->row(std::string(to_string(cfg.task)), obj.spec.name,
                                 std::string(obj.seen ? "seen" : "unseen"), cfg.policy, seed, r, rec.log.seed,
                                 rec.log.steps.size(), rec.log.success, rec.log.initial_coverage,
                                 rec.log.final_coverage);
                }
                records.push_back(std::move(rec));
            }
        }
    }
    return records;
}

std::vector<MatrixCell> run_matrix(const ExperimentConfig& cfg)
{
    std::vector<MatrixCell> cells;
    for (TaskKind task : cfg.matrix_tasks) {
        for (const auto& obj : cfg.objects_for(task)) {
            const EnvConfig env = cfg.env_for(task, obj.spec);
            for (const auto& id : cfg.matrix_policies) {
                MatrixCell cell{task, obj.spec.name, obj.seen, id, true, {}};
                std::vector<double> finals;
                for (std::uint64_t seed : cfg.seeds) {
                    auto policy = make_policy(cfg, id, env.world, seed);
                    if (!policy) {
                        cell.available = false;
                        break;
                    }
                    for (int r = 0; r < cfg.eval_rollouts; ++r)
                        finals.push_back(run_episode(env, *policy, rollout_seed(seed, r)).final_coverage);
                }
                if (cell.available)
                    cell.coverage = summarize(finals);
                cells.push_back(cell);
            }
        }
    }
    return cells;
}

void write_matrix_csv(const std::vector<MatrixCell>& cells, const std::string& path)
{
    CsvWriter csv(path, {"task", "object", "split", "policy", "mean", "std", "n"});
    for (const auto& c : cells) {
        if (c.available)
            csv.row(std::string(to_string(c.task)), c.object, std::string(c.seen ? "seen" : "unseen"), c.policy,
                    c.coverage.mean, c.coverage.std, c.coverage.n);
        else
            csv.row(std::string(to_string(c.task)), c.object, std::string(c.seen ? "seen" : "unseen"), c.policy,
                    "n/a", "n/a", 0);
    }
}

std::string format_matrix(const std::vector<MatrixCell>& cells)
{
    std::ostringstream out;
    out << std::left << std::setw(8) << "task" << std::setw(14) << "object" << std::setw(8) << "split"
        << std::setw(12) << "policy" << std::right << std::setw(18) << "coverage" << '\n';
    char buf[64];
    for (const auto& c : cells) {
        if (c.available)
            std::snprintf(buf, sizeof buf, "%.3f ± %.3f (n=%d)", c.coverage.mean, c.coverage.std, c.coverage.n);
        else
            std::snprintf(buf, sizeof buf, "n/a");
        out << std::left << std::setw(8) << to_string(c.task) << std::setw(14) << c.object << std::setw(8)
            << (c.seen ? "seen" : "unseen") << std::setw(12) << c.policy << std::right << std::setw(20) << buf
            << '\n';
    }
    return out.str();
}

double task_mean(const std::vector<MatrixCell>& cells, TaskKind task, const std::string& policy)
{
    double sum = 0.0;
    int n = 0;
    for (const auto& c : cells) {
        if (c.task == task && c.policy == policy && c.available) {
            sum += c.coverage.mean * c.coverage.n;
            n += c.coverage.n;
        }
    }
    return n ? sum / n : 0.0;
}

EfficiencyReport run_efficiency_ablation(const ExperimentConfig& cfg, std::uint64_t seed)
{
    EfficiencyReport rep;
    rep.task = cfg.ablation_task;
    rep.initial_coverage = cfg.ablation_initial_coverage;
    rep.episodes = cfg.ablation_episodes;
    const auto objects = cfg.objects_for(rep.task);
    if (objects.empty())
        throw std::invalid_argument(std::string("no objects for task ") + to_string(rep.task));

    for (int i = 0; i < rep.episodes; ++i) {
        ObjectSpec spec = objects[static_cast<std::size_t>(i) % objects.size()].spec;
        spec.initial_coverage = rep.initial_coverage;
        const EnvConfig env = cfg.env_for(rep.task, spec);
        const std::uint64_t ep_seed = mix_seed(seed, static_cast<std::uint64_t>(i));
        for (bool mask : {false, true}) {
            GreedyPolicy policy(cfg.greedy_for(env.world), mask);
            const EpisodeLog log = run_episode(env, policy, ep_seed);
            EfficiencyRow row{i, spec.name, ep_seed, policy.name(), static_cast<int>(log.steps.size()), 0};
            for (const auto& s : log.steps)
                row.cells_transformed += s.cells_transformed;
            (mask ? rep.objmask_cells : rep.greedy_cells) += row.cells_transformed;
            (mask ? rep.objmask_actions : rep.greedy_actions) += row.actions;
            rep.rows.push_back(row);
        }
    }
    rep.greedy_yield = rep.greedy_actions ? static_cast<double>(rep.greedy_cells) / rep.greedy_actions : 0.0;
    rep.objmask_yield = rep.objmask_actions ? static_cast<double>(rep.objmask_cells) / rep.objmask_actions : 0.0;
    rep.ratio = rep.objmask_yield > 0.0 ? rep.greedy_yield / rep.objmask_yield : INFINITY;
    return rep;
}

void write_efficiency_csv(const EfficiencyReport& report, const std::string& path)
{
    CsvWriter csv(path, {"episode", "object", "episode_seed", "policy", "actions", "cells_transformed"});
    for (const auto& r : report.rows)
        csv.row(r.episode, r.object, r.episode_seed, r.policy, r.actions, r.cells_transformed);
}

RewardCurveReport run_reward_curves(const ExperimentConfig& cfg, TaskKind task, int episodes,
                                    const NoiseModel& noise, std::uint64_t seed)
{
    noise.validate();
    RewardCurveReport rep;
    const auto objects = cfg.objects_for(task);
    if (objects.empty())
        throw std::invalid_argument(std::string("no objects for task ") + to_string(task));

    for (int i = 0; i < episodes; ++i) {
        const ObjectSpec& spec = objects[static_cast<std::size_t>(i) % objects.size()].spec;
        EnvConfig clean = cfg.env_for(task, spec);
        clean.noise = NoiseModel{};
        EnvConfig noisy = clean;
        noisy.noise = noise;
        noisy.reward_mode = RewardMode::GoalDist;

        RewardCurveEpisode ep;
        ep.episode_seed = mix_seed(seed, static_cast<std::uint64_t>(i));
        SweepPolicy sweep(clean.world);
        double cum = 0.0;
        for (const auto& s : run_episode(clean, sweep, ep.episode_seed).steps) {
            const double next = cum + s.reward.r_spoc;
            ep.spoc_monotone = ep.spoc_monotone && next >= cum;
            ep.cumulative_spoc.push_back(cum = next);
        }
        cum = 0.0;
        for (const auto& s : run_episode(noisy, sweep, ep.episode_seed).steps) {
            const double next = cum + s.goaldist;
            ep.goaldist_monotone = ep.goaldist_monotone && next >= cum;
            ep.cumulative_goaldist.push_back(cum = next);
        }
        rep.spoc_monotone += ep.spoc_monotone;
        rep.goaldist_non_monotone += !ep.goaldist_monotone;
        rep.episodes.push_back(std::move(ep));
    }
    return rep;
}

void write_reward_curves_csv(const RewardCurveReport& report, const std::string& path)
{
    CsvWriter csv(path, {"episode", "episode_seed", "signal", "step", "cumulative"});
    for (std::size_t i = 0; i < report.episodes.size(); ++i) {
        const auto& ep = report.episodes[i];
        for (std::size_t t = 0; t < ep.cumulative_spoc.size(); ++t)
            csv.row(i, ep.episode_seed, "spoc", t, ep.cumulative_spoc[t]);
        for (std::size_t t = 0; t < ep.cumulative_goaldist.size(); ++t)
            csv.row(i, ep.episode_seed, "goaldist", t, ep.cumulative_goaldist[t]);
    }
}

std::vector<TrainingRun> run_training(const ExperimentConfig& cfg, const std::string& out_dir)
{
    fs::create_directories(out_dir);
    const ObjectEntry seen = cfg.seen_object(cfg.task);
    const EnvConfig env = cfg.env_for(cfg.task, seen.spec, cfg.train_reward);
    const std::string id = learned_policy_id(cfg.train_reward);

    std::vector<TrainingRun> runs;
    for (std::uint64_t seed : cfg.seeds) {
        learn::TrainConfig tc = cfg.train;
        if (tc.dump_dir.empty())
            tc.dump_dir = (fs::path(out_dir) / ("diverged_seed" + std::to_string(seed))).string();
        auto result = learn::train(env, tc, seed);

        TrainingRun run;
        run.seed = seed;
        run.final_coverage = learn::final_mean_coverage(result.curve, 100);
        run.curve_csv = (fs::path(out_dir) / ("curve_" + std::string(to_string(cfg.task)) + "_" + id + "_seed" +
                                              std::to_string(seed) + ".csv"))
                            .string();
        learn::write_curve_csv(result.curve, run.curve_csv);
        run.checkpoint = cfg.checkpoint_path(cfg.task, cfg.train_reward, seed);
        fs::create_directories(fs::path(run.checkpoint).parent_path());
        result.agent->save(run.checkpoint);
        runs.push_back(run);
    }
    return runs;
}

Decision ReplayPolicy::act(const Observation&)
{
    if (next_ >= actions_.size())
        throw std::runtime_error("replay log ran out of actions before the episode ended");
    return {actions_[next_++]};
}

std::vector<std::string> render_episode(const ExperimentConfig& cfg, const ObjectSpec& object, Policy& policy,
                                        std::uint64_t episode_seed, const std::string& out_dir)
{
    fs::create_directories(out_dir);
    std::vector<std::string> paths;
    const EnvConfig env = cfg.env_for(cfg.task, object);
    run_episode(env, policy, episode_seed, [&](const WorldState& truth, const SpocMap& map) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%03zu.ppm", paths.size());
        paths.push_back((fs::path(out_dir) / name).string());
        render_frame(map, truth.ee_pos, paths.back(), cfg.render_scale);
    });
    return paths;
}

} // namespace osc
