#pragma once

#include "osc/learn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace osc::learn {

struct GradCheck {
    double max_rel_error = 0.0;
    std::size_t checked = 0;
};

/// |a - n| / max(|a|, |n|, floor): relative, with an absolute floor so
/// entries that are zero analytically do not divide by nothing.
inline double relative_error(double analytic, double numeric, double floor = 1e-7)
{
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

/// Central differences of `loss` against every entry of `params`, compared
/// with `grads`.
inline GradCheck check_gradients(std::vector<Mat<double>>& params, const std::vector<Mat<double>>& grads,
                                 const std::function<double()>& loss, double h = 1e-5)
{
    GradCheck r;
    for (std::size_t t = 0; t < params.size(); ++t) {
        for (Eigen::Index i = 0; i < params[t].size(); ++i) {
            double& p = params[t].data()[i];
            const double saved = p;
            p = saved + h;
            const double up = loss();
            p = saved - h;
            const double down = loss();
            p = saved;
            const double numeric = (up - down) / (2.0 * h);
            r.max_rel_error = std::max(r.max_rel_error, relative_error(grads[t].data()[i], numeric));
            ++r.checked;
        }
    }
    return r;
}

} // namespace osc::learn
