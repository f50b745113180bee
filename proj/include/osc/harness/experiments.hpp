#pragma once

#include "osc/harness/config.hpp"
#include "osc/harness/episode.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace osc {

/// Episode seed of rollout `rollout` under run seed `seed`.
inline std::uint64_t rollout_seed(std::uint64_t seed, int rollout)
{
    return mix_seed(seed, static_cast<std::uint64_t>(rollout));
}

/// Controller by identifier. Learned policies load the checkpoint for
/// (task, reward mode, seed) and come back null when it does not exist.
std::unique_ptr<Policy> make_policy(const ExperimentConfig& cfg, const std::string& id, const WorldConfig& world,
                                    std::uint64_t seed);

struct Summary {
    double mean = 0.0;
    double std = 0.0; ///< sample standard deviation; 0 for n < 2
    int n = 0;
};

Summary summarize(const std::vector<double>& values);

struct EpisodeRecord {
    std::string object;
    bool seen = false;
    std::uint64_t seed = 0;
    int rollout = 0;
    EpisodeLog log;
};

/// The configured policy on every object of the configured task, for each
/// seed × rollout. With a non-empty `out_dir`, writes one CSV per episode
/// under episodes/ and a summary.csv.
std::vector<EpisodeRecord> run_experiment(const ExperimentConfig& cfg, const std::string& out_dir = {});

struct MatrixCell {
    TaskKind task = TaskKind::Spread;
    std::string object;
    bool seen = false;
    std::string policy;
    bool available = true; ///< false when a learned policy's checkpoint is missing
    Summary coverage;
};

/// Final ground-truth coverage per (task, object, policy) over seeds × rollouts.
std::vector<MatrixCell> run_matrix(const ExperimentConfig& cfg);

void write_matrix_csv(const std::vector<MatrixCell>& cells, const std::string& path);
std::string format_matrix(const std::vector<MatrixCell>& cells);

/// Mean coverage of one policy over every cell of a task.
double task_mean(const std::vector<MatrixCell>& cells, TaskKind task, const std::string& policy);

struct EfficiencyRow {
    int episode = 0;
    std::string object;
    std::uint64_t episode_seed = 0;
    std::string policy;
    int actions = 0;
    std::size_t cells_transformed = 0;
};

struct EfficiencyReport {
    TaskKind task = TaskKind::Mash;
    double initial_coverage = 0.5;
    int episodes = 0;
    std::size_t greedy_cells = 0, objmask_cells = 0;
    long greedy_actions = 0, objmask_actions = 0;
    double greedy_yield = 0.0;  ///< newly transformed cells per action
    double objmask_yield = 0.0;
    double ratio = 0.0;         ///< greedy_yield / objmask_yield
    std::vector<EfficiencyRow> rows;
};

/// Greedy vs object-mask greedy from partially transformed objects. Episode i
/// uses object i mod n of the ablation task and seed mix_seed(seed, i).
EfficiencyReport run_efficiency_ablation(const ExperimentConfig& cfg, std::uint64_t seed);

void write_efficiency_csv(const EfficiencyReport& report, const std::string& path);

struct RewardCurveEpisode {
    std::uint64_t episode_seed = 0;
    std::vector<double> cumulative_spoc;     ///< noiseless perception
    std::vector<double> cumulative_goaldist; ///< under the boundary noise
    bool spoc_monotone = true;
    bool goaldist_monotone = true;
};

struct RewardCurveReport {
    std::vector<RewardCurveEpisode> episodes;
    int spoc_monotone = 0;
    int goaldist_non_monotone = 0;
};

/// Runs the sweep policy on `task`, once with noiseless perception to record
/// the cumulative dense reward and once under `noise` to record the
/// cumulative goal-distance proxy. Same episode seeds for both.
RewardCurveReport run_reward_curves(const ExperimentConfig& cfg, TaskKind task, int episodes,
                                    const NoiseModel& noise, std::uint64_t seed);

void write_reward_curves_csv(const RewardCurveReport& report, const std::string& path);

struct TrainingRun {
    std::uint64_t seed = 0;
    double final_coverage = 0.0; ///< mean over the last 100 training episodes
    std::string checkpoint;
    std::string curve_csv;
};

/// Trains the learner on the seen object of the configured task for every
/// seed, writing curves under `out_dir` and checkpoints to checkpoint_path.
std::vector<TrainingRun> run_training(const ExperimentConfig& cfg, const std::string& out_dir);

/// Replays a logged action sequence.
class ReplayPolicy final : public Policy {
public:
    explicit ReplayPolicy(std::vector<Action> actions) : actions_(std::move(actions)) {}
    std::string name() const override { return "replay"; }
    void begin_episode(std::uint64_t) override { next_ = 0; }
    Decision act(const Observation&) override;

private:
    std::vector<Action> actions_;
    std::size_t next_ = 0;
};

/// Frames of one episode as frame_NNN.ppm in `out_dir`; returns the paths.
std::vector<std::string> render_episode(const ExperimentConfig& cfg, const ObjectSpec& object, Policy& policy,
                                        std::uint64_t episode_seed, const std::string& out_dir);

} // namespace osc
