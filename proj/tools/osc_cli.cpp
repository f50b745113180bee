#include "osc/harness/config.hpp"
#include "osc/harness/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace osc;

namespace {

struct Common {
    std::string config;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config, "experiment config file")->required()->check(CLI::ExistingFile);
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&c](const std::uint64_t& s) { c.seed = s, c.seed_set = true; },
        "base seed; replaces the config's seed list with seed, seed+1, ...");
    cmd->add_option("--out", c.out, "output directory")->required();
}

ExperimentConfig load(const Common& c)
{
    ExperimentConfig cfg = load_config(c.config);
    if (c.seed_set)
        override_seeds(cfg, c.seed);
    cfg.output_dir = c.out;
    fs::create_directories(c.out);
    return cfg;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
}

int cmd_run(const Common& c)
{
    const ExperimentConfig cfg = load(c);
    const auto records = run_experiment(cfg, c.out);
    std::vector<double> finals;
    for (const auto& r : records)
        finals.push_back(r.log.final_coverage);
    const Summary s = summarize(finals);
    std::printf("%s %s: coverage %.3f ± %.3f (n=%d)\n", to_string(cfg.task), cfg.policy.c_str(), s.mean, s.std, s.n);
    return 0;
}

int cmd_matrix(const Common& c)
{
    const ExperimentConfig cfg = load(c);
    const auto cells = run_matrix(cfg);
    write_matrix_csv(cells, (fs::path(c.out) / "matrix.csv").string());
    const std::string table = format_matrix(cells);
    write_text(fs::path(c.out) / "matrix.txt", table);
    std::cout << table;
    return 0;
}

int cmd_ablate(const Common& c)
{
    const ExperimentConfig cfg = load(c);
    const auto rep = run_efficiency_ablation(cfg, cfg.seeds.front());
    write_efficiency_csv(rep, (fs::path(c.out) / "efficiency.csv").string());
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "task %s initial_coverage %.2f episodes %d\nsparta_g %.3f cells/action\nobjmask %.3f "
                  "cells/action\nratio %.3f\n",
                  to_string(rep.task), rep.initial_coverage, rep.episodes, rep.greedy_yield, rep.objmask_yield,
                  rep.ratio);
    write_text(fs::path(c.out) / "efficiency.txt", buf);
    std::cout << buf;
    return 0;
}

int cmd_train(const Common& c)
{
    const ExperimentConfig cfg = load(c);
    for (const auto& run : run_training(cfg, c.out))
        std::printf("seed %llu: final-100 coverage %.3f, checkpoint %s\n",
                    static_cast<unsigned long long>(run.seed), run.final_coverage, run.checkpoint.c_str());
    return 0;
}

int cmd_render(const Common& c, const std::string& object, int rollout, const std::string& log)
{
    const ExperimentConfig cfg = load(c);
    const auto objects = cfg.objects_for(cfg.task);
    const ObjectEntry* chosen = nullptr;
    for (const auto& o : objects)
        if (object.empty() ? o.seen : o.spec.name == object)
            chosen = &o;
    if (!chosen)
        throw std::invalid_argument("no object '" + object + "' for task " + to_string(cfg.task));

    const std::uint64_t seed = cfg.seeds.front();
    std::unique_ptr<Policy> policy;
    if (!log.empty())
        policy = std::make_unique<ReplayPolicy>(read_episode_actions(log));
    else
        policy = make_policy(cfg, cfg.policy, cfg.world_for(cfg.task, chosen->spec), seed);
    if (!policy)
        throw std::runtime_error("missing checkpoint for policy " + cfg.policy);

    const auto frames = render_episode(cfg, chosen->spec, *policy, rollout_seed(seed, rollout), c.out);
    std::printf("wrote %zu frames to %s\n", frames.size(), c.out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Object state change experiments"};
    app.require_subcommand(1);

    Common run_opts, matrix_opts, ablate_opts, train_opts, render_opts;
    auto* run = app.add_subcommand("run", "evaluate one policy on every object of a task");
    add_common(run, run_opts);
    auto* matrix = app.add_subcommand("matrix", "coverage table over tasks, objects and policies");
    add_common(matrix, matrix_opts);
    auto* ablate = app.add_subcommand("ablate-efficiency", "greedy vs object-mask yield from partial coverage");
    add_common(ablate, ablate_opts);
    auto* trn = app.add_subcommand("train", "train the learned policy on the seen object");
    add_common(trn, train_opts);
    auto* render = app.add_subcommand("render", "render an episode (or a logged one) as PPM frames");
    add_common(render, render_opts);
    std::string object, log;
    int rollout = 0;
    render->add_option("--object", object, "object name; default the seen object");
    render->add_option("--rollout", rollout, "rollout index under the first seed")->check(CLI::NonNegativeNumber);
    render->add_option("--log", log, "episode CSV whose actions are replayed")->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run)
            return cmd_run(run_opts);
        if (*matrix)
            return cmd_matrix(matrix_opts);
        if (*ablate)
            return cmd_ablate(ablate_opts);
        if (*trn)
            return cmd_train(train_opts);
        if (*render)
            return cmd_render(render_opts, object, rollout, log);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
