#pragma once

#include "osc/learn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace osc::learn {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

/// Policy head output per sample: rows [mean_x, mean_y, raw_log_std_x, raw_log_std_y].
/// Actions are tanh(u) with u ~ Normal(mean, exp(clamp(raw_log_std))).
/// Log-densities are of the squashed action in [-1, 1]^2; scaling to the
/// workspace by a_max is left to the caller.
template <typename S>
struct SquashedBatch {
    Mat<S> pre;      ///< u, 2 x B
    Mat<S> action;   ///< tanh(u), 2 x B
    RowVec<S> log_prob;
};

/// log(1 - tanh(u)^2), stable for large |u|.
template <typename S>
S log1m_tanh2(S u)
{
    const S a = std::abs(u);
    return S(2) * (S(std::numbers::ln2) - a - std::log1p(std::exp(S(-2) * a)));
}

template <typename S>
S clamp_log_std(S raw)
{
    return std::clamp(raw, S(kLogStdMin), S(kLogStdMax));
}

/// Reparameterized sample u = mean + std * eps for noise `eps` (2 x B).
template <typename S>
SquashedBatch<S> squashed_sample(const Mat<S>& head, const Mat<S>& eps)
{
    const Eigen::Index B = head.cols();
    SquashedBatch<S> out;
    out.pre.resize(2, B);
    out.action.resize(2, B);
    out.log_prob.resize(B);
    const S half_log_2pi = S(0.5 * std::log(2.0 * std::numbers::pi));
    for (Eigen::Index j = 0; j < B; ++j) {
        S lp = 0;
        for (int i = 0; i < 2; ++i) {
            const S ls = clamp_log_std(head(2 + i, j));
            const S u = head(i, j) + std::exp(ls) * eps(i, j);
            out.pre(i, j) = u;
            out.action(i, j) = std::tanh(u);
            lp += S(-0.5) * eps(i, j) * eps(i, j) - ls - half_log_2pi - log1m_tanh2(u);
        }
        out.log_prob(j) = lp;
    }
    return out;
}

/// Log-density of the squashed action tanh(u) for a given pre-squash u.
template <typename S>
S squashed_log_prob(S mean_x, S mean_y, S raw_ls_x, S raw_ls_y, S u_x, S u_y)
{
    const S half_log_2pi = S(0.5 * std::log(2.0 * std::numbers::pi));
    const S m[2] = {mean_x, mean_y};
    const S r[2] = {raw_ls_x, raw_ls_y};
    const S u[2] = {u_x, u_y};
    S lp = 0;
    for (int i = 0; i < 2; ++i) {
        const S ls = clamp_log_std(r[i]);
        const S z = (u[i] - m[i]) / std::exp(ls);
        lp += S(-0.5) * z * z - ls - half_log_2pi - log1m_tanh2(u[i]);
    }
    return lp;
}

/// Gradient with respect to the head output of a loss that depends on the
/// sampled actions and their log-densities, with `eps` held fixed.
template <typename S>
Mat<S> squashed_backward(const Mat<S>& head, const Mat<S>& eps, const SquashedBatch<S>& sample,
                         const Mat<S>& d_action, const RowVec<S>& d_log_prob)
{
    const Eigen::Index B = head.cols();
    Mat<S> d_head = Mat<S>::Zero(4, B);
    for (Eigen::Index j = 0; j < B; ++j) {
        for (int i = 0; i < 2; ++i) {
            const S raw = head(2 + i, j);
            const S sigma = std::exp(clamp_log_std(raw));
            const S a = sample.action(i, j);
            const S du = d_action(i, j) * (S(1) - a * a) + d_log_prob(j) * S(2) * a;
            d_head(i, j) = du;
            if (raw > S(kLogStdMin) && raw < S(kLogStdMax))
                d_head(2 + i, j) = du * sigma * eps(i, j) - d_log_prob(j);
        }
    }
    return d_head;
}

} // namespace osc::learn
