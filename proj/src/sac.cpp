#include "osc/learn/sac.hpp"

#include "osc/binary_io.hpp"
#include "osc/learn/sac_math.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace osc::learn {

namespace {

constexpr std::uint32_t kCheckpointVersion = 1;

MlpShape actor_shape(const SacConfig& cfg, int feature_dim)
{
    MlpShape s;
    s.sizes.push_back(feature_dim);
    s.sizes.insert(s.sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    s.sizes.push_back(4);
    return s;
}

MlpShape critic_shape(const SacConfig& cfg, int feature_dim)
{
    MlpShape s;
    s.sizes.push_back(feature_dim + 2);
    s.sizes.insert(s.sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    s.sizes.push_back(1);
    s.layer_norm = cfg.critic_layer_norm;
    return s;
}

void put_blob(std::vector<std::uint8_t>& out, const Mat<float>& m)
{
    io::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.size()));
    // Row-major element order.
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            io::put_le(out, m(i, j));
}

void get_blob(io::Reader& r, Mat<float>& m)
{
    if (r.get<std::uint64_t>() != static_cast<std::uint64_t>(m.size()))
        throw std::runtime_error("checkpoint blob size does not match the network");
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = r.get<float>();
}

struct Batch {
    Mat<float> obs, next_obs, act;
    RowVec<float> reward, not_done;
};

Batch gather(const ReplayBuffer& buffer, const std::vector<std::size_t>& idx, int dim)
{
    const auto B = static_cast<Eigen::Index>(idx.size());
    Batch b;
    b.obs.resize(dim, B);
    b.next_obs.resize(dim, B);
    b.act.resize(2, B);
    b.reward.resize(B);
    b.not_done.resize(B);
    for (Eigen::Index j = 0; j < B; ++j) {
        const Transition& t = buffer.at(idx[j]);
        b.obs.col(j) = Eigen::Map<const Eigen::VectorXf>(t.obs.data(), dim);
        b.next_obs.col(j) = Eigen::Map<const Eigen::VectorXf>(t.next_obs.data(), dim);
        b.act(0, j) = t.action[0];
        b.act(1, j) = t.action[1];
        b.reward(j) = static_cast<float>(t.reward);
        b.not_done(j) = t.done ? 0.0f : 1.0f;
    }
    return b;
}

Mat<float> normal_noise(Rng& rng, Eigen::Index rows, Eigen::Index cols)
{
    Mat<float> eps(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            eps(i, j) = static_cast<float>(rng.normal());
    return eps;
}

} // namespace

void SacConfig::validate() const
{
    if (!(lr > 0.0) || warmup_updates < 0 || !(gamma >= 0.0 && gamma <= 1.0) || batch < 1 ||
        !(tau > 0.0 && tau <= 1.0) || actor_every < 1 || !(init_alpha > 0.0) || buffer_capacity == 0)
        throw std::invalid_argument("invalid SAC configuration");
    if (hidden.empty() || std::any_of(hidden.begin(), hidden.end(), [](int h) { return h < 1; }))
        throw std::invalid_argument("hidden layer sizes must be positive");
}

SacAgent::SacAgent(SacConfig cfg, int feature_dim, std::uint64_t seed)
    : cfg_(std::move(cfg)), feature_dim_(feature_dim), log_alpha_(0.0), rng_(mix_seed(seed, 0x5ac))
{
    cfg_.validate();
    if (feature_dim < 1)
        throw std::invalid_argument("feature dimension must be positive");
    Rng init(mix_seed(seed, 0x1417));
    actor_ = Mlp<float>(actor_shape(cfg_, feature_dim), init);
    q1_ = Mlp<float>(critic_shape(cfg_, feature_dim), init);
    q2_ = Mlp<float>(critic_shape(cfg_, feature_dim), init);
    q1_t_ = q1_;
    q2_t_ = q2_;
    actor_opt_ = AdamState<float>::zeros_like(actor_.params());
    q1_opt_ = AdamState<float>::zeros_like(q1_.params());
    q2_opt_ = AdamState<float>::zeros_like(q2_.params());
    log_alpha_ = std::log(cfg_.init_alpha);
}

double SacAgent::alpha() const { return std::exp(log_alpha_); }

double SacAgent::learning_rate(long step) const
{
    if (cfg_.warmup_updates <= 0)
        return cfg_.lr;
    return cfg_.lr * std::min(1.0, static_cast<double>(step + 1) / cfg_.warmup_updates);
}

ActSample SacAgent::act(const FeatureVector& features, Rng& rng, bool deterministic) const
{
    if (static_cast<int>(features.size()) != feature_dim_)
        throw std::invalid_argument("feature vector has the wrong length");
    const Mat<float> x = Eigen::Map<const Eigen::VectorXf>(features.data(), feature_dim_);
    const Mat<double> head = actor_.forward(x).cast<double>();
    ActSample s;
    if (deterministic) {
        for (int i = 0; i < 2; ++i) {
            s.pre_squash[i] = head(i, 0);
            s.action[i] = std::tanh(head(i, 0));
        }
        return s;
    }
    Mat<double> eps(2, 1);
    eps(0, 0) = rng.normal();
    eps(1, 0) = rng.normal();
    const SquashedBatch<double> b = squashed_sample(head, eps);
    for (int i = 0; i < 2; ++i) {
        s.pre_squash[i] = b.pre(i, 0);
        s.action[i] = b.action(i, 0);
    }
    s.log_prob = b.log_prob(0);
    return s;
}

UpdateReport SacAgent::update(const ReplayBuffer& buffer)
{
    UpdateReport rep;
    rep.alpha = alpha();
    if (buffer.empty()) {
        std::cerr << "sac update skipped: replay buffer is empty\n";
        return rep;
    }
    if (buffer.feature_dim() != static_cast<std::size_t>(feature_dim_))
        throw std::invalid_argument("replay buffer feature size does not match the agent");

    const auto idx = buffer.sample_indices(static_cast<std::size_t>(cfg_.batch), rng_);
    const Batch b = gather(buffer, idx, feature_dim_);
    const auto B = static_cast<Eigen::Index>(idx.size());
    const float a = static_cast<float>(alpha());

    // Soft Bellman target from the target critics at a fresh next action.
    RowVec<float> y;
    {
        const Mat<float> head = actor_.forward(b.next_obs);
        const SquashedBatch<float> next = squashed_sample(head, normal_noise(rng_, 2, B));
        const Mat<float> x = critic_input(b.next_obs, next.action);
        const RowVec<float> v = q1_t_.forward(x).row(0).cwiseMin(q2_t_.forward(x).row(0));
        y = soft_target<float>(b.reward, b.not_done, static_cast<float>(cfg_.gamma), v, next.log_prob, a);
    }

    const Mat<float> x = critic_input(b.obs, b.act);
    auto g1 = q1_.zero_grads();
    auto g2 = q2_.zero_grads();
    const float l1 = critic_loss(q1_, x, y, &g1);
    const float l2 = critic_loss(q2_, x, y, &g2);
    const double lr = learning_rate(critic_updates_);
    rep.skipped += adam_step(q1_.params(), g1, q1_opt_, lr) ? 0 : 1;
    rep.skipped += adam_step(q2_.params(), g2, q2_opt_, lr) ? 0 : 1;
    rep.critic_loss = static_cast<double>(l1) + l2;
    ++critic_updates_;

    if (critic_updates_ % cfg_.actor_every == 0) {
        auto ga = actor_.zero_grads();
        const ActorLoss<float> al = actor_loss(actor_, q1_, q2_, b.obs, normal_noise(rng_, 2, B), a, &ga);
        rep.skipped += adam_step(actor_.params(), ga, actor_opt_, lr) ? 0 : 1;
        rep.actor_loss = al.loss;
        rep.mean_log_prob = al.mean_log_prob;
        rep.actor_updated = true;
        ++actor_updates_;

        if (cfg_.auto_alpha) {
            // d/dlog_alpha of -log_alpha * (log_prob + target_entropy), by Adam.
            const double g = -(static_cast<double>(al.mean_log_prob) + cfg_.target_entropy);
            if (std::isfinite(g)) {
                const AdamHyper h;
                ++alpha_steps_;
                alpha_m_ = h.beta1 * alpha_m_ + (1.0 - h.beta1) * g;
                alpha_v_ = h.beta2 * alpha_v_ + (1.0 - h.beta2) * g * g;
                const double mh = alpha_m_ / (1.0 - std::pow(h.beta1, static_cast<double>(alpha_steps_)));
                const double vh = alpha_v_ / (1.0 - std::pow(h.beta2, static_cast<double>(alpha_steps_)));
                log_alpha_ -= lr * mh / (std::sqrt(vh) + h.eps);
            } else {
                ++rep.skipped;
            }
        }
    }

    q1_t_.polyak_from(q1_, static_cast<float>(cfg_.tau));
    q2_t_.polyak_from(q2_, static_cast<float>(cfg_.tau));
    if (rep.skipped > 0)
        std::cerr << "sac update " << critic_updates_ << ": skipped " << rep.skipped
                  << " optimizer step(s) with non-finite gradients\n";
    rep.performed = true;
    rep.alpha = alpha();
    return rep;
}

bool SacAgent::finite() const
{
    for (const auto* net : {&actor_, &q1_, &q2_, &q1_t_, &q2_t_})
        if (!all_finite(net->params()))
            return false;
    return std::isfinite(log_alpha_);
}

std::vector<std::uint8_t> SacAgent::checkpoint() const
{
    std::vector<std::uint8_t> out;
    io::put_magic(out, "OSCL");
    io::put_le<std::uint32_t>(out, kCheckpointVersion);
    io::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(feature_dim_));
    io::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cfg_.hidden.size()));
    for (int h : cfg_.hidden)
        io::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(h));
    io::put_le<std::uint8_t>(out, cfg_.critic_layer_norm ? 1 : 0);
    for (const auto* net : {&actor_, &q1_, &q2_, &q1_t_, &q2_t_})
        for (const auto& p : net->params())
            put_blob(out, p);
    Mat<float> la(1, 1);
    la(0, 0) = static_cast<float>(log_alpha_);
    put_blob(out, la);
    return out;
}

void SacAgent::restore(const std::vector<std::uint8_t>& bytes)
{
    io::Reader r(bytes);
    r.expect_magic("OSCL");
    if (r.get<std::uint32_t>() != kCheckpointVersion)
        throw std::runtime_error("unsupported checkpoint version");
    if (r.get<std::uint32_t>() != static_cast<std::uint32_t>(feature_dim_))
        throw std::runtime_error("checkpoint feature size does not match");
    const auto n = r.get<std::uint32_t>();
    if (n != cfg_.hidden.size())
        throw std::runtime_error("checkpoint hidden layout does not match");
    for (int h : cfg_.hidden)
        if (r.get<std::uint32_t>() != static_cast<std::uint32_t>(h))
            throw std::runtime_error("checkpoint hidden layout does not match");
    if (r.get<std::uint8_t>() != (cfg_.critic_layer_norm ? 1 : 0))
        throw std::runtime_error("checkpoint critic normalization does not match");
    for (auto* net : {&actor_, &q1_, &q2_, &q1_t_, &q2_t_})
        for (auto& p : net->params())
            get_blob(r, p);
    Mat<float> la(1, 1);
    get_blob(r, la);
    if (r.remaining() != 0)
        throw std::runtime_error("trailing bytes after checkpoint");
    log_alpha_ = la(0, 0);
}

void SacAgent::save(const std::string& path) const { io::write_file(path, checkpoint()); }

SacAgent SacAgent::load(const std::string& path, SacConfig cfg)
{
    const auto bytes = io::read_file(path);
    io::Reader r(bytes);
    r.expect_magic("OSCL");
    if (r.get<std::uint32_t>() != kCheckpointVersion)
        throw std::runtime_error("unsupported checkpoint version");
    const auto dim = r.get<std::uint32_t>();
    const auto n = r.get<std::uint32_t>();
    cfg.hidden.clear();
    for (std::uint32_t i = 0; i < n; ++i)
        cfg.hidden.push_back(static_cast<int>(r.get<std::uint32_t>()));
    cfg.critic_layer_norm = r.get<std::uint8_t>() == 1;
    SacAgent agent(cfg, static_cast<int>(dim), 0);
    agent.restore(bytes);
    return agent;
}

} // namespace osc::learn
