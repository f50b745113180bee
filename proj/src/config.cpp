#include "osc/harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace osc {

namespace pt = boost::property_tree;

namespace {

ObjectEntry make_object(TaskKind task, std::string name, ShapeKind shape, double w, double h, std::uint64_t blob_seed,
                        bool seen)
{
    ObjectEntry e;
    e.task = task;
    e.seen = seen;
    e.spec.name = std::move(name);
    e.spec.shape = shape;
    e.spec.extent = {w, h};
    e.spec.blob_seed = blob_seed;
    return e;
}

std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

// Typed key access that remembers which keys were consumed.
class Section {
public:
    Section(std::string name, const pt::ptree& tree) : name_(std::move(name)), tree_(tree) {}

    template <typename T>
    void get(const std::string& key, T& out)
    {
        const auto it = tree_.find(key);
        if (it == tree_.not_found())
            return;
        used_.insert(key);
        const std::string raw = trim(it->second.data());
        try {
            out = convert<T>(raw);
        } catch (const std::exception& e) {
            throw std::invalid_argument("[" + name_ + "] " + key + " = '" + raw + "': " + e.what());
        }
    }

    template <typename T>
    void get_optional(const std::string& key, std::optional<T>& out)
    {
        T v{};
        const auto it = tree_.find(key);
        if (it == tree_.not_found())
            return;
        get(key, v);
        out = v;
    }

    void check_unused() const
    {
        for (const auto& kv : tree_) {
            if (!used_.count(kv.first))
                throw std::invalid_argument("unknown key '" + kv.first + "' in section [" + name_ + "]");
        }
    }

private:
    template <typename T>
    static T convert(const std::string& raw)
    {
        std::size_t pos = 0;
        if constexpr (std::is_same_v<T, std::string>) {
            return raw;
        } else if constexpr (std::is_same_v<T, bool>) {
            if (raw == "true" || raw == "1" || raw == "yes")
                return true;
            if (raw == "false" || raw == "0" || raw == "no")
                return false;
            throw std::invalid_argument("expected a boolean");
        } else if constexpr (std::is_same_v<T, double>) {
            const double v = std::stod(raw, &pos);
            if (pos != raw.size())
                throw std::invalid_argument("trailing characters");
            return v;
        } else if constexpr (std::is_same_v<T, std::uint64_t> || std::is_same_v<T, std::size_t>) {
            if (!raw.empty() && raw[0] == '-')
                throw std::invalid_argument("expected a non-negative integer");
            const auto v = std::stoull(raw, &pos);
            if (pos != raw.size())
                throw std::invalid_argument("trailing characters");
            return static_cast<T>(v);
        } else if constexpr (std::is_same_v<T, int>) {
            const int v = std::stoi(raw, &pos);
            if (pos != raw.size())
                throw std::invalid_argument("trailing characters");
            return v;
        } else if constexpr (std::is_same_v<T, TaskKind>) {
            return parse_task(raw);
        } else if constexpr (std::is_same_v<T, ShapeKind>) {
            return parse_shape(raw);
        } else if constexpr (std::is_same_v<T, RewardMode>) {
            return parse_reward_mode(raw);
        } else if constexpr (std::is_same_v<T, TieBreak>) {
            if (raw == "lowest_index")
                return TieBreak::LowestIndex;
            if (raw == "seeded_random")
                return TieBreak::SeededRandom;
            throw std::invalid_argument("expected lowest_index or seeded_random");
        } else if constexpr (std::is_same_v<T, std::vector<std::uint64_t>>) {
            std::vector<std::uint64_t> v;
            for (const auto& s : split_list(raw))
                v.push_back(convert<std::uint64_t>(s));
            return v;
        } else if constexpr (std::is_same_v<T, std::vector<int>>) {
            std::vector<int> v;
            for (const auto& s : split_list(raw))
                v.push_back(convert<int>(s));
            return v;
        } else if constexpr (std::is_same_v<T, std::vector<TaskKind>>) {
            std::vector<TaskKind> v;
            for (const auto& s : split_list(raw))
                v.push_back(parse_task(s));
            return v;
        } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
            return split_list(raw);
        } else {
            static_assert(sizeof(T) == 0, "unsupported config type");
        }
    }

    std::string name_;
    const pt::ptree& tree_;
    std::set<std::string> used_;
};

const std::set<std::string> kPolicies{"random", "sparta_g", "objmask", "sweep", "sparta_l", "sparse_l", "goaldist_l"};

} // namespace

std::vector<ObjectEntry> default_objects(TaskKind task)
{
    switch (task) {
    case TaskKind::Spread:
        return {make_object(task, "rectangle", ShapeKind::Rectangle, 24, 20, 0, true),
                make_object(task, "ellipse", ShapeKind::Ellipse, 28, 22, 0, false),
                make_object(task, "blob_a", ShapeKind::Blob, 34, 28, 1, false),
                make_object(task, "blob_b", ShapeKind::Blob, 34, 28, 2, false)};
    case TaskKind::Mash:
        return {make_object(task, "rectangle", ShapeKind::Rectangle, 40, 30, 0, true),
                make_object(task, "ellipse", ShapeKind::Ellipse, 44, 36, 0, false),
                make_object(task, "blob_a", ShapeKind::Blob, 50, 42, 3, false),
                make_object(task, "blob_b", ShapeKind::Blob, 50, 42, 4, false)};
    case TaskKind::Slice:
        return {make_object(task, "rectangle", ShapeKind::Rectangle, 36, 14, 0, true),
                make_object(task, "ellipse", ShapeKind::Ellipse, 40, 16, 0, false),
                make_object(task, "blob_a", ShapeKind::Blob, 44, 20, 5, false),
                make_object(task, "blob_b", ShapeKind::Blob, 44, 20, 6, false)};
    }
    return {};
}

bool is_learned_policy(const std::string& id) { return id == "sparta_l" || id == "sparse_l" || id == "goaldist_l"; }

RewardMode learned_policy_mode(const std::string& id)
{
    if (id == "sparta_l")
        return RewardMode::Dense;
    if (id == "sparse_l")
        return RewardMode::Sparse;
    if (id == "goaldist_l")
        return RewardMode::GoalDist;
    throw std::invalid_argument("'" + id + "' is not a learned policy");
}

std::string learned_policy_id(RewardMode mode)
{
    switch (mode) {
    case RewardMode::Dense: return "sparta_l";
    case RewardMode::Sparse: return "sparse_l";
    case RewardMode::GoalDist: return "goaldist_l";
    }
    return "?";
}

void ExperimentConfig::validate() const
{
    grid.validate();
    noise.validate();
    train.validate();
    if (seeds.empty())
        throw std::invalid_argument("at least one seed is required");
    if (eval_rollouts < 1)
        throw std::invalid_argument("eval_rollouts must be >= 1");
    if (horizon < 0)
        throw std::invalid_argument("horizon must be >= 0");
    if (!kPolicies.count(policy))
        throw std::invalid_argument("unknown policy '" + policy + "'");
    for (const auto& p : matrix_policies)
        if (!kPolicies.count(p))
            throw std::invalid_argument("unknown matrix policy '" + p + "'");
    if (!(a_max_fraction > 0.0 && a_max_fraction <= 1.0))
        throw std::invalid_argument("a_max_fraction must lie in (0, 1]");
    if (goal_pool < 1)
        throw std::invalid_argument("goal_pool must be >= 1");
    if (!(ablation_initial_coverage >= 0.0 && ablation_initial_coverage < 1.0) || ablation_episodes < 1)
        throw std::invalid_argument("invalid ablation settings");
    if (render_scale < 1)
        throw std::invalid_argument("render scale must be >= 1");
    for (TaskKind t : {TaskKind::Spread, TaskKind::Mash, TaskKind::Slice}) {
        const auto objs = objects_for(t);
        if (objs.empty())
            continue;
        if (std::count_if(objs.begin(), objs.end(), [](const ObjectEntry& e) { return e.seen; }) != 1)
            throw std::invalid_argument(std::string("task ") + to_string(t) + " needs exactly one seen object");
        for (const auto& o : objs) {
            const WorldConfig w = world_for(t, o.spec);
            spawn_object(w, 0); // geometry check
            greedy_for(w).validate(w.a_max());
        }
    }
}

std::vector<ObjectEntry> ExperimentConfig::objects_for(TaskKind t) const
{
    if (objects.empty())
        return default_objects(t);
    std::vector<ObjectEntry> out;
    for (const auto& o : objects)
        if (o.task == t)
            out.push_back(o);
    return out;
}

ObjectEntry ExperimentConfig::seen_object(TaskKind t) const
{
    for (const auto& o : objects_for(t))
        if (o.seen)
            return o;
    throw std::invalid_argument(std::string("no seen object for task ") + to_string(t));
}

int ExperimentConfig::horizon_for(TaskKind t) const { return horizon > 0 ? horizon : default_horizon(t); }

WorldConfig ExperimentConfig::world_for(TaskKind t, const ObjectSpec& object) const
{
    WorldConfig w;
    w.task = t;
    w.grid = grid;
    w.object = object;
    w.tool = tool;
    w.a_max_fraction = a_max_fraction;
    return w;
}

EnvConfig ExperimentConfig::env_for(TaskKind t, const ObjectSpec& object, RewardMode mode) const
{
    EnvConfig env;
    env.world = world_for(t, object);
    env.noise = noise;
    env.weights = weights;
    env.reward_mode = mode;
    env.goal_pool = goal_pool;
    env.horizon = horizon_for(t);
    return env;
}

GreedyConfig ExperimentConfig::greedy_for(const WorldConfig& world) const
{
    GreedyConfig g = default_greedy_config(world);
    g.num_directions = num_directions;
    if (step_mag)
        g.step_mag = *step_mag;
    if (neighborhood_radius)
        g.neighborhood_radius = *neighborhood_radius;
    g.tie_break = tie_break;
    return g;
}

std::string ExperimentConfig::checkpoint_path(TaskKind t, RewardMode mode, std::uint64_t seed) const
{
    const std::filesystem::path dir =
        checkpoint_dir.empty() ? std::filesystem::path(output_dir) / "checkpoints" : std::filesystem::path(checkpoint_dir);
    return (dir / (std::string(to_string(t)) + "_" + learned_policy_id(mode) + "_seed" + std::to_string(seed) +
                   ".oscl"))
        .string();
}

void override_seeds(ExperimentConfig& cfg, std::uint64_t base)
{
    const std::size_t n = std::max<std::size_t>(1, cfg.seeds.size());
    cfg.seeds.clear();
    for (std::size_t i = 0; i < n; ++i)
        cfg.seeds.push_back(base + i);
}

ExperimentConfig parse_config(const std::string& text)
{
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }

    ExperimentConfig c;
    std::vector<ObjectEntry> objects;
    bool any_seen_key = false;
    for (const auto& [name, body] : tree) {
        if (!body.data().empty() || body.empty()) {
            if (!body.data().empty())
                throw std::invalid_argument("config: key '" + name + "' outside any section");
        }
        Section s(name, body);
        if (name == "experiment") {
            s.get("name", c.name);
            s.get("seeds", c.seeds);
            s.get("eval_rollouts", c.eval_rollouts);
            s.get("policy", c.policy);
            s.get("output_dir", c.output_dir);
        } else if (name == "task") {
            s.get("kind", c.task);
            s.get("horizon", c.horizon);
        } else if (name == "grid") {
            s.get("width", c.grid.width);
            s.get("height", c.grid.height);
            s.get("cell_size", c.grid.cell_size);
        } else if (name == "tool") {
            s.get("brush_length", c.tool.brush_length);
            s.get("brush_width", c.tool.brush_width);
            s.get("mash_radius", c.tool.mash_radius);
            s.get("slice_width", c.tool.slice_width);
            s.get("brush_capacity", c.tool.brush_capacity);
            s.get("refill_period", c.tool.refill_period);
            s.get("a_max_fraction", c.a_max_fraction);
        } else if (name == "noise") {
            s.get("flip_prob", c.noise.flip_prob);
            s.get("dilate_radius", c.noise.dilate_radius);
            s.get("reclassify_period", c.noise.reclassify_period);
            s.get("error_rate", c.noise.error_rate);
        } else if (name == "reward") {
            s.get("alpha", c.weights.alpha);
            s.get("beta", c.weights.beta);
            s.get("eta", c.weights.eta);
            s.get("goal_pool", c.goal_pool);
        } else if (name == "policy") {
            s.get("num_directions", c.num_directions);
            s.get_optional("step_mag", c.step_mag);
            s.get_optional("neighborhood_radius", c.neighborhood_radius);
            s.get("tie_break", c.tie_break);
        } else if (name == "learn") {
            auto& t = c.train;
            s.get("reward", c.train_reward);
            s.get("episodes", t.episodes);
            s.get("utd", t.utd);
            s.get("seed_rollouts", t.seed_rollouts);
            s.get("learning_starts", t.learning_starts);
            s.get("pool", t.pool);
            s.get("lr", t.sac.lr);
            s.get("warmup_updates", t.sac.warmup_updates);
            s.get("gamma", t.sac.gamma);
            s.get("batch", t.sac.batch);
            s.get("tau", t.sac.tau);
            s.get("actor_every", t.sac.actor_every);
            s.get("auto_alpha", t.sac.auto_alpha);
            s.get("init_alpha", t.sac.init_alpha);
            s.get("target_entropy", t.sac.target_entropy);
            s.get("buffer_capacity", t.sac.buffer_capacity);
            s.get("hidden", t.sac.hidden);
            s.get("critic_layer_norm", t.sac.critic_layer_norm);
            s.get("deterministic_eval", c.deterministic_eval);
            s.get("checkpoint_dir", c.checkpoint_dir);
        } else if (name == "matrix") {
            s.get("tasks", c.matrix_tasks);
            s.get("policies", c.matrix_policies);
        } else if (name == "ablation") {
            s.get("task", c.ablation_task);
            s.get("initial_coverage", c.ablation_initial_coverage);
            s.get("episodes", c.ablation_episodes);
        } else if (name == "render") {
            s.get("scale", c.render_scale);
        } else if (name.rfind("object.", 0) == 0 && name.size() > 7) {
            ObjectEntry o;
            o.spec.name = name.substr(7);
            double cx = o.spec.center.x, cy = o.spec.center.y, w = o.spec.extent.x, h = o.spec.extent.y;
            s.get("task", o.task);
            s.get("shape", o.spec.shape);
            s.get("center_x", cx);
            s.get("center_y", cy);
            s.get("width", w);
            s.get("height", h);
            s.get("blob_seed", o.spec.blob_seed);
            s.get("initial_coverage", o.spec.initial_coverage);
            if (body.find("seen") != body.not_found())
                any_seen_key = true;
            s.get("seen", o.seen);
            o.spec.center = {cx, cy};
            o.spec.extent = {w, h};
            objects.push_back(o);
        } else {
            throw std::invalid_argument("config: unknown section [" + name + "]");
        }
        s.check_unused();
    }
    if (!objects.empty() && !any_seen_key) {
        // Without explicit flags the first object of each task is the seen one.
        std::set<TaskKind> marked;
        for (auto& o : objects)
            o.seen = marked.insert(o.task).second;
    }
    c.objects = std::move(objects);
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace osc
