// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "osc/harness/config.hpp"
#include "osc/harness/experiments.hpp"
#include "osc/learn/gradcheck.hpp"
#include "osc/learn/sac_math.hpp"
#include "osc/learn/squashed_gaussian.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

using namespace osc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ------------------------------------------------------------------ 1

SpocMap map_with(int actionable, int transformed)
{
    SpocMap m{CellGrid(GridSpec{})};
    int placed = 0;
    for (auto& c : m.grid.cells) {
        if (placed < transformed)
            c = CellState::Transformed;
        else if (placed < transformed + actionable)
            c = CellState::Actionable;
        else
            break;
        ++placed;
    }
    return m;
}

Outcome reward_arithmetic(const ExperimentConfig&)
{
    struct Case {
        int act0, trf0, act1, trf1;
        double expected;
    };
    // expected = newly transformed / previous actionable, by hand
    const Case cases[] = {{100, 0, 85, 15, 0.15},   {250, 50, 212, 88, 0.152}, {40, 60, 29, 71, 0.275},
                          {100, 0, 100, 0, 0.0},    {0, 300, 0, 300, 0.0},     {8, 0, 0, 8, 1.0},
                          {1000, 24, 1, 1023, 0.999}};
    double worst_spoc = 0.0;
    for (const auto& c : cases)
        worst_spoc = std::max(worst_spoc,
                              std::abs(spoc_reward(map_with(c.act0, c.trf0), map_with(c.act1, c.trf1)) - c.expected));

    double worst_total = 0.0;
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        const RewardWeights w{rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(0, 0.01)};
        const double s = rng.uniform(0, 1), u = rng.bernoulli(0.5) ? 1.0 : 0.0, e = rng.uniform(-3, 3);
        const double expect = w.alpha * s + w.beta * u + w.eta * e;
        worst_total = std::max(worst_total, std::abs(total_reward(w, s, u, e).total - expect));
    }
    const RewardBreakdown d = total_reward(RewardWeights{}, 0.15, 1.0, 2.0);
    const double defaults_err = std::abs(d.total - (0.15 + 1.0 + 0.002));
    return {worst_spoc <= 1e-15 && worst_total <= 1e-12 && defaults_err <= 1e-12,
            fmt("max |Eq.2 error| %.1e over %zu pairs, max |weighted total error| %.1e", worst_spoc,
                std::size(cases), std::max(worst_total, defaults_err))};
}

// ------------------------------------------------------------------ 2

Outcome monotonicity(const ExperimentConfig& base)
{
    std::string detail;
    bool ok = true;
    for (TaskKind task : {TaskKind::Spread, TaskKind::Mash, TaskKind::Slice}) {
        const auto objects = base.objects_for(task);
        Rng rng(mix_seed(77, static_cast<std::uint64_t>(task)));
        int violations = 0, episodes = 0;
        double rmin = 1.0, rmax = 0.0;
        for (int step = 0; step < 1000;) {
            EnvConfig env = base.env_for(task, objects[static_cast<std::size_t>(episodes) % objects.size()].spec);
            env.noise = NoiseModel{};
            Environment e(env);
            e.reset(mix_seed(5, static_cast<std::uint64_t>(episodes++)));
            const std::size_t background = e.state().grid.count(CellState::Background);
            while (!e.done() && step < 1000) {
                const std::size_t before = e.state().transformed();
                const auto rec = e.step({random_action(rng, env.world.a_max())});
                ++step;
                violations += e.state().transformed() < before;
                violations += e.state().grid.count(CellState::Background) != background;
                violations += !(rec.reward.r_spoc >= 0.0 && rec.reward.r_spoc <= 1.0);
                rmin = std::min(rmin, rec.reward.r_spoc);
                rmax = std::max(rmax, rec.reward.r_spoc);
            }
        }
        ok = ok && violations == 0;
        detail += fmt("%s %d violations (r_spoc in [%.3f, %.3f], %d episodes); ", to_string(task), violations, rmin,
                      rmax, episodes);
    }
    return {ok, detail};
}

// ------------------------------------------------------------------ 3

long long d2(const GridSpec& g, int a, int b)
{
    const long long dx = g.col(a) - g.col(b), dy = g.row(a) - g.row(b);
    return dx * dx + dy * dy;
}

Outcome fps_oracle(const ExperimentConfig&)
{
    Rng rng(303);
    int objects = 0, seeds_checked = 0, cells_checked = 0, bad = 0;
    while (objects < 50) {
        WorldConfig c;
        c.object.shape = static_cast<ShapeKind>(rng.below(3));
        c.object.extent = {6.0 + static_cast<double>(rng.below(12)), 6.0 + static_cast<double>(rng.below(12))};
        c.object.center = {20.0 + rng.uniform(0, 24), 20.0 + rng.uniform(0, 24)};
        c.object.blob_seed = rng.next();
        const WorldState s = reset_episode(c, rng.next());
        std::vector<int> cells;
        for (int i = 0; i < static_cast<int>(s.grid.cells.size()); ++i)
            if (s.grid.cells[i] != CellState::Background)
                cells.push_back(i);
        if (cells.size() > 200 || cells.size() < 2)
            continue;
        ++objects;
        const int k = 1 + static_cast<int>(rng.below(std::min<std::size_t>(cells.size(), 16)));
        const RegionPartition p = partition_regions(cells, k, s.grid.spec);
        bad += p.region_count() != static_cast<std::size_t>(k);
        for (int i = 1; i < k; ++i) {
            long long best = -1;
            for (int cand : cells) {
                long long m = std::numeric_limits<long long>::max();
                for (int j = 0; j < i; ++j)
                    m = std::min(m, d2(s.grid.spec, cand, p.seeds[j]));
                best = std::max(best, m);
            }
            long long got = std::numeric_limits<long long>::max();
            for (int j = 0; j < i; ++j)
                got = std::min(got, d2(s.grid.spec, p.seeds[i], p.seeds[j]));
            bad += got != best;
            ++seeds_checked;
        }
        for (std::size_t n = 0; n < p.cells.size(); ++n) {
            long long m = std::numeric_limits<long long>::max();
            for (int seed : p.seeds)
                m = std::min(m, d2(s.grid.spec, p.cells[n], seed));
            bad += d2(s.grid.spec, p.cells[n], p.seeds[p.region_id[n]]) != m;
            ++cells_checked;
        }
    }
    return {bad == 0, fmt("%d objects, %d seeds and %d cell assignments checked, %d mismatches", objects,
                          seeds_checked, cells_checked, bad)};
}

// ------------------------------------------------------------------ 4

Outcome greedy_oracle(const ExperimentConfig&)
{
    Rng rng(404);
    int bad = 0, decided = 0;
    for (int trial = 0; trial < 500; ++trial) {
        CellGrid g{GridSpec{}};
        const int blobs = 4 + static_cast<int>(rng.below(8));
        for (int b = 0; b < blobs; ++b) {
            const int cx = static_cast<int>(rng.below(64)), cy = static_cast<int>(rng.below(64));
            const int r = 3 + static_cast<int>(rng.below(12));
            for (int y = std::max(0, cy - r); y < std::min(64, cy + r); ++y)
                for (int x = std::max(0, cx - r); x < std::min(64, cx + r); ++x)
                    g.at(x, y) = rng.bernoulli(0.6) ? CellState::Actionable : CellState::Transformed;
        }
        GreedyConfig cfg;
        cfg.num_directions = 8;
        cfg.step_mag = rng.uniform(4, 16);
        cfg.neighborhood_radius = rng.uniform(1, 7);
        const Vec2 ee{rng.uniform(0, 64), rng.uniform(0, 64)};

        // recount every candidate by scanning the whole grid
        std::vector<int> counts;
        for (int i = 0; i < cfg.num_directions; ++i) {
            const double th = 2.0 * std::numbers::pi * i / cfg.num_directions;
            const double ex = std::clamp(ee.x + cfg.step_mag * std::cos(th), 0.0, 64.0);
            const double ey = std::clamp(ee.y + cfg.step_mag * std::sin(th), 0.0, 64.0);
            int n = 0;
            for (int idx = 0; idx < static_cast<int>(g.cells.size()); ++idx) {
                const double dx = (idx % 64 + 0.5) - ex, dy = (idx / 64 + 0.5) - ey;
                n += g.cells[idx] == CellState::Actionable && dx * dx + dy * dy <= cfg.neighborhood_radius *
                                                                                       cfg.neighborhood_radius;
            }
            counts.push_back(n);
        }
        const int best = *std::max_element(counts.begin(), counts.end());
        const SpocMap m{g, 0};
        const int i = greedy_direction({m, m, ee, 0}, cfg, false);
        if (best > 0) {
            ++decided;
            bad += i < 0 || counts[i] != best;
        }
    }
    return {bad == 0 && decided > 400,
            fmt("500 observations, %d with actionable cells in reach, %d argmax mismatches", decided, bad)};
}

// ------------------------------------------------------------------ 5

learn::Mat<double> uniform_mat(Rng& rng, Eigen::Index r, Eigen::Index c, double lo, double hi)
{
    learn::Mat<double> m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i)
        m.data()[i] = rng.uniform(lo, hi);
    return m;
}

learn::Mat<double> normal_mat(Rng& rng, Eigen::Index r, Eigen::Index c)
{
    learn::Mat<double> m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i)
        m.data()[i] = rng.normal();
    return m;
}

Outcome gradients(const ExperimentConfig&)
{
    using namespace osc::learn;
    constexpr int kInputs = 12;
    constexpr int kObs = 14;
    double worst = 0.0;
    std::size_t checked = 0;
    auto take = [&](const GradCheck& g) {
        worst = std::max(worst, g.max_rel_error);
        checked += g.checked;
    };
    for (int trial = 0; trial < 3; ++trial) {
        Rng rng(mix_seed(505, trial));
        Mlp<double> actor({{kObs, 24, 24, 4}, false}, rng);
        Mlp<double> q1({{kObs + 2, 24, 24, 1}, true}, rng);
        Mlp<double> q2({{kObs + 2, 24, 24, 1}, true}, rng);
        for (auto* net : {&q1, &q2})
            for (auto& p : net->params()) // move the normalization gains off their defaults
                p += uniform_mat(rng, p.rows(), p.cols(), -0.2, 0.2);
        const Mat<double> obs = uniform_mat(rng, kObs, kInputs, 0, 1);
        const Mat<double> eps = normal_mat(rng, 2, kInputs);

        // critic: squared error against a soft target
        const Mat<double> act = uniform_mat(rng, 2, kInputs, -0.99, 0.99);
        const RowVec<double> y = uniform_mat(rng, 1, kInputs, -1, 1);
        const Mat<double> qin = critic_input(obs, act);
        auto cg = q1.zero_grads();
        critic_loss(q1, qin, y, &cg);
        take(check_gradients(q1.params(), cg, [&] { return critic_loss<double>(q1, qin, y, nullptr); }));

        // actor: through the tanh-Gaussian head and both critics
        const double alpha = 0.05 + 0.2 * trial;
        auto ag = actor.zero_grads();
        actor_loss(actor, q1, q2, obs, eps, alpha, &ag);
        take(check_gradients(actor.params(), ag,
                             [&] { return actor_loss<double>(actor, q1, q2, obs, eps, alpha, nullptr).loss; }));

        // head alone, with the log-prob weighted separately from the action
        std::vector<Mat<double>> head{uniform_mat(rng, 4, kInputs, -1.5, 1.5)};
        const Mat<double> wa = uniform_mat(rng, 2, kInputs, -1, 1);
        const RowVec<double> wl = uniform_mat(rng, 1, kInputs, -1, 1);
        const auto s = squashed_sample(head[0], eps);
        const std::vector<Mat<double>> hg{squashed_backward(head[0], eps, s, wa, wl)};
        take(check_gradients(head, hg, [&] {
            const auto t = squashed_sample(head[0], eps);
            return (t.action.array() * wa.array()).sum() + (t.log_prob.array() * wl.array()).sum();
        }));
    }
    return {worst < 1e-4, fmt("%zu parameters over 3 draws of %d random inputs, max relative error %.2e", checked,
                              kInputs, worst)};
}

// ------------------------------------------------------------------ 6

Outcome ordering(const ExperimentConfig& base)
{
    ExperimentConfig cfg = base;
    cfg.matrix_tasks = {TaskKind::Spread, TaskKind::Mash, TaskKind::Slice};
    cfg.matrix_policies = {"random", "sparta_g"};
    const auto cells = run_matrix(cfg);
    bool ok = !cells.empty();
    std::string detail;
    for (TaskKind t : cfg.matrix_tasks) {
        const double g = task_mean(cells, t, "sparta_g"), r = task_mean(cells, t, "random");
        ok = ok && g >= 1.5 * r;
        detail += fmt("%s %.3f vs %.3f (%.1fx); ", to_string(t), g, r, r > 0 ? g / r : INFINITY);
    }
    const int n = cells.empty() ? 0 : cells.front().coverage.n;
    return {ok, detail + fmt("n=%d per cell", n)};
}

// ------------------------------------------------------------------ 7

Outcome learning(const ExperimentConfig& base, const fs::path& work)
{
    ExperimentConfig dense = base;
    dense.task = TaskKind::Spread;
    dense.train_reward = RewardMode::Dense;
    dense.checkpoint_dir = (work / "checkpoints").string();
    ExperimentConfig sparse = dense;
    sparse.train_reward = RewardMode::Sparse;

    auto mean_final = [](const std::vector<TrainingRun>& runs) {
        double s = 0.0;
        for (const auto& r : runs)
            s += r.final_coverage;
        return s / static_cast<double>(runs.size());
    };
    auto list = [](const std::vector<TrainingRun>& runs) {
        std::string s;
        for (const auto& r : runs)
            s += fmt("%s%.3f", s.empty() ? "" : "/", r.final_coverage);
        return s;
    };
    const auto d = run_training(dense, (work / "dense").string());
    const auto s = run_training(sparse, (work / "sparse").string());
    const double md = mean_final(d), ms = mean_final(s);
    return {md >= 0.6 && ms <= 0.35,
            fmt("dense final-100 coverage %.3f (%s), sparse %.3f (%s), %d episodes x %zu seeds", md, list(d).c_str(),
                ms, list(s).c_str(), dense.train.episodes, d.size())};
}

// ------------------------------------------------------------------ 8

Outcome efficiency(const ExperimentConfig& base)
{
    const auto rep = run_efficiency_ablation(base, base.seeds.front());
    return {rep.episodes >= 30 && rep.ratio >= 2.0,
            fmt("%s from %.2f coverage, %d episodes: sparta_g %.2f vs objmask %.2f cells/action, ratio %.2f",
                to_string(rep.task), rep.initial_coverage, rep.episodes, rep.greedy_yield, rep.objmask_yield,
                rep.ratio)};
}

// ------------------------------------------------------------------ 9

Outcome reward_curves(const ExperimentConfig& base)
{
    constexpr int kEpisodes = 40;
    // boundary components of the stress preset: edge flips plus one cell of mask dilation
    NoiseModel boundary;
    boundary.flip_prob = 0.02;
    boundary.dilate_radius = 1;
    boundary.reclassify_period = 4;
    const auto rep = run_reward_curves(base, TaskKind::Spread, kEpisodes, boundary, base.seeds.front());
    NoiseModel flips_only;
    flips_only.flip_prob = 0.02;
    const auto flips = run_reward_curves(base, TaskKind::Spread, kEpisodes, flips_only, base.seeds.front());
    return {rep.spoc_monotone == kEpisodes && 2 * rep.goaldist_non_monotone >= kEpisodes,
            fmt("SPOC monotone %d/%d; GoalDist non-monotone %d/%d (flips 0.02 + dilation 1); flips alone %d/%d",
                rep.spoc_monotone, kEpisodes, rep.goaldist_non_monotone, kEpisodes, flips.goaldist_non_monotone,
                kEpisodes)};
}

// ------------------------------------------------------------------ 10

std::map<std::string, std::string> tree_contents(const fs::path& root)
{
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file())
            continue;
        std::ifstream in(e.path(), std::ios::binary);
        out[fs::relative(e.path(), root).string()] = {std::istreambuf_iterator<char>(in), {}};
    }
    return out;
}

Outcome determinism(const std::string& cli, const std::string& config, const fs::path& work)
{
    // train first; matrix shares its output so the learned policy has checkpoints
    const std::vector<std::string> verbs{"train", "matrix", "run", "ablate-efficiency", "render"};
    std::map<std::string, std::string> first, second;
    for (int pass = 0; pass < 2; ++pass) {
        const fs::path root = work / ("pass" + std::to_string(pass));
        fs::remove_all(root);
        for (const auto& verb : verbs) {
            const fs::path out = root / (verb == "matrix" ? "train" : verb);
            std::string cmd = "'" + cli + "' " + verb + " --config '" + config + "' --seed 11 --out '" +
                              out.string() + "'";
            if (verb == "render")
                cmd += " --rollout 1 --log '" + (root / "run" / "episodes" / "rectangle_seed11_r1.csv").string() + "'";
            cmd += " > /dev/null";
            if (std::system(cmd.c_str()) != 0)
                return {false, "command failed: " + cmd};
        }
        (pass ? second : first) = tree_contents(root);
    }
    std::size_t csv = 0, ppm = 0, differing = 0;
    for (const auto& [name, bytes] : first) {
        csv += name.ends_with(".csv");
        ppm += name.ends_with(".ppm");
        const auto it = second.find(name);
        differing += it == second.end() || it->second != bytes;
    }
    differing += second.size() != first.size();
    // the trained task's learned-policy rows must have been evaluated, not skipped
    int learned_rows = 0;
    bool learned_row = true;
    std::istringstream matrix(first["train/matrix.csv"]);
    for (std::string line; std::getline(matrix, line);) {
        if (line.starts_with("spread,") && line.find(",sparta_l,") != std::string::npos) {
            ++learned_rows;
            learned_row = learned_row && line.find("n/a") == std::string::npos;
        }
    }
    learned_row = learned_row && learned_rows > 0;
    return {differing == 0 && csv > 0 && ppm > 0 && learned_row,
            fmt("%zu files (%zu CSV, %zu PPM) from %zu verbs, %zu differ between reruns", first.size(), csv, ppm,
                verbs.size(), differing)};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance checks"};
    std::string config, determinism_config, cli, work = (fs::temp_directory_path() / "osc_acceptance").string();
    std::set<int> only;
    app.add_option("--config", config, "experiment config for criteria 2-9")->required()->check(CLI::ExistingFile);
    app.add_option("--determinism-config", determinism_config, "config the CLI reruns use")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--cli", cli, "path to the osc_cli binary")->required()->check(CLI::ExistingFile);
    app.add_option("--work", work, "scratch directory");
    app.add_option("--only", only, "run just these criteria")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    ExperimentConfig cfg;
    try {
        cfg = load_config(config);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    fs::remove_all(work);
    fs::create_directories(work);

    struct Criterion {
        int id;
        const char* name;
        double budget_s; ///< 0: none
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "reward arithmetic", 1, [&] { return reward_arithmetic(cfg); }},
        {2, "monotonicity and bounds", 10, [&] { return monotonicity(cfg); }},
        {3, "farthest-point oracle", 30, [&] { return fps_oracle(cfg); }},
        {4, "greedy argmax oracle", 10, [&] { return greedy_oracle(cfg); }},
        {5, "gradient exactness", 30, [&] { return gradients(cfg); }},
        {6, "ordering vs random", 300, [&] { return ordering(cfg); }},
        {7, "learning efficacy", 1800, [&] { return learning(cfg, fs::path(work) / "learn"); }},
        {8, "efficiency ratio", 120, [&] { return efficiency(cfg); }},
        {9, "reward-curve stability", 60, [&] { return reward_curves(cfg); }},
        {10, "determinism", 0, [&] { return determinism(cli, determinism_config, fs::path(work) / "cli"); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0 && secs > c.budget_s) {
            o.pass = false;
            o.detail += fmt("; over the %.0f s budget", c.budget_s);
        }
        failed += !o.pass;
        std::printf("criterion %2d %-24s %s  %s [%.1f s]\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                    secs);
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
