#pragma once

#include "osc/learn/mlp.hpp"
#include "osc/learn/squashed_gaussian.hpp"

#include <cmath>
#include <vector>

namespace osc::learn {

/// Stacks observation columns (F x B) over action columns (2 x B).
template <typename S>
Mat<S> critic_input(const Mat<S>& obs, const Mat<S>& act)
{
    Mat<S> x(obs.rows() + act.rows(), obs.cols());
    x.topRows(obs.rows()) = obs;
    x.bottomRows(act.rows()) = act;
    return x;
}

/// y = r + gamma * (1 - done) * (min target Q(s', a') - alpha * log pi(a'|s')).
template <typename S>
RowVec<S> soft_target(const RowVec<S>& reward, const RowVec<S>& not_done, S gamma, const RowVec<S>& min_q_next,
                      const RowVec<S>& next_log_prob, S alpha)
{
    return reward.array() + gamma * not_done.array() * (min_q_next.array() - alpha * next_log_prob.array());
}

/// 0.5 * mean((Q(s, a) - y)^2); parameter gradients go to `grads`.
template <typename S>
S critic_loss(const Mlp<S>& q, const Mat<S>& input, const RowVec<S>& target, std::vector<Mat<S>>* grads)
{
    typename Mlp<S>::Cache cache;
    const Mat<S> out = q.forward(input, grads != nullptr ? &cache : nullptr);
    const RowVec<S> err = out.row(0) - target;
    const S B = static_cast<S>(input.cols());
    if (grads != nullptr) {
        const Mat<S> dy = err / B;
        q.backward(cache, dy, grads);
    }
    return S(0.5) * err.squaredNorm() / B;
}

template <typename S>
struct ActorLoss {
    S loss = 0;
    S mean_log_prob = 0;
};

/// mean(alpha * log pi(a|s) - min(Q1, Q2)(s, a)) with a = tanh(mean + std * eps).
/// Gradients flow into the actor parameters only.
template <typename S>
ActorLoss<S> actor_loss(const Mlp<S>& actor, const Mlp<S>& q1, const Mlp<S>& q2, const Mat<S>& obs,
                        const Mat<S>& eps, S alpha, std::vector<Mat<S>>* grads)
{
    const Eigen::Index B = obs.cols();
    typename Mlp<S>::Cache a_cache;
    const Mat<S> head = actor.forward(obs, &a_cache);
    const SquashedBatch<S> sample = squashed_sample(head, eps);
    const Mat<S> x = critic_input(obs, sample.action);
    typename Mlp<S>::Cache c1, c2;
    const Mat<S> v1 = q1.forward(x, &c1);
    const Mat<S> v2 = q2.forward(x, &c2);

    ActorLoss<S> out;
    Mat<S> dq1 = Mat<S>::Zero(1, B);
    Mat<S> dq2 = Mat<S>::Zero(1, B);
    const S invB = S(1) / static_cast<S>(B);
    for (Eigen::Index j = 0; j < B; ++j) {
        // Ties take the first critic.
        const bool first = v1(0, j) <= v2(0, j);
        out.loss += alpha * sample.log_prob(j) - (first ? v1(0, j) : v2(0, j));
        (first ? dq1 : dq2)(0, j) = -invB;
    }
    out.loss *= invB;
    out.mean_log_prob = sample.log_prob.mean();
    if (grads == nullptr)
        return out;

    const Mat<S> dx1 = q1.backward(c1, dq1, nullptr, true);
    const Mat<S> dx2 = q2.backward(c2, dq2, nullptr, true);
    const Mat<S> d_action = dx1.bottomRows(2) + dx2.bottomRows(2);
    const RowVec<S> d_log_prob = RowVec<S>::Constant(B, alpha * invB);
    const Mat<S> d_head = squashed_backward(head, eps, sample, d_action, d_log_prob);
    actor.backward(a_cache, d_head, grads);
    return out;
}

} // namespace osc::learn
