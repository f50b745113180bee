#pragma once

#include "osc/learn/mlp.hpp"

#include <cmath>
#include <vector>

namespace osc::learn {

struct AdamHyper {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

template <typename S>
struct AdamState {
    std::vector<Mat<S>> m;
    std::vector<Mat<S>> v;
    long step = 0;

    static AdamState zeros_like(const std::vector<Mat<S>>& params)
    {
        AdamState st;
        for (const auto& p : params) {
            st.m.push_back(Mat<S>::Zero(p.rows(), p.cols()));
            st.v.push_back(Mat<S>::Zero(p.rows(), p.cols()));
        }
        return st;
    }
};

template <typename S>
bool all_finite(const std::vector<Mat<S>>& tensors)
{
    for (const auto& t : tensors) {
        if (!t.allFinite())
            return false;
    }
    return true;
}

/// One bias-corrected Adam update. Returns false, leaving parameters and
/// moments untouched, when any gradient entry is non-finite.
template <typename S>
bool adam_step(std::vector<Mat<S>>& params, const std::vector<Mat<S>>& grads, AdamState<S>& st, double lr,
               const AdamHyper& h = {})
{
    if (!all_finite(grads))
        return false;
    ++st.step;
    const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(st.step));
    const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(st.step));
    const S b1 = static_cast<S>(h.beta1);
    const S b2 = static_cast<S>(h.beta2);
    const S step_size = static_cast<S>(lr / c1);
    const S inv_c2 = static_cast<S>(1.0 / c2);
    const S eps = static_cast<S>(h.eps);
    for (std::size_t i = 0; i < params.size(); ++i) {
        st.m[i] = b1 * st.m[i] + (S(1) - b1) * grads[i];
        st.v[i] = b2 * st.v[i] + (S(1) - b2) * grads[i].cwiseProduct(grads[i]);
        params[i].array() -= step_size * st.m[i].array() / ((st.v[i].array() * inv_c2).sqrt() + eps);
    }
    return true;
}

} // namespace osc::learn
