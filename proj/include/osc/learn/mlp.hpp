#pragma once

#include "osc/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace osc::learn {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using RowVec = Eigen::Matrix<S, 1, Eigen::Dynamic>;

/// Layer widths [in, hidden..., out]; hidden layers use a rectifier, the
/// output layer is affine. With `layer_norm`, every hidden pre-activation is
/// normalized per sample and rescaled by a learned gain and bias.
struct MlpShape {
    std::vector<int> sizes;
    bool layer_norm = false;

    int inputs() const { return sizes.front(); }
    int outputs() const { return sizes.back(); }
    int layers() const { return static_cast<int>(sizes.size()) - 1; }
};

/// Multilayer perceptron over column-major batches (one sample per column).
///
/// Parameters live in one flat list so optimizers, Polyak averaging and
/// checkpoints can treat every network the same way. Per layer the order is
/// W (out x in), b (out x 1), then gain and bias (out x 1) when normalized.
template <typename S>
class Mlp {
public:
    struct Cache {
        std::vector<Mat<S>> input;   ///< activation entering each layer
        std::vector<Mat<S>> hidden;  ///< post-normalization pre-activation (hidden layers)
        std::vector<Mat<S>> normed;  ///< unit-variance values (normalized layers)
        std::vector<RowVec<S>> inv_std;
    };

    static constexpr S kNormEps = S(1e-5);

    Mlp() = default;

    Mlp(MlpShape shape, Rng& rng) : shape_(std::move(shape))
    {
        if (shape_.sizes.size() < 2)
            throw std::invalid_argument("MLP needs at least input and output sizes");
        for (int l = 0; l < shape_.layers(); ++l) {
            const int in = shape_.sizes[l];
            const int out = shape_.sizes[l + 1];
            const double bound = 1.0 / std::sqrt(static_cast<double>(in));
            Mat<S> w(out, in);
            for (Eigen::Index j = 0; j < w.cols(); ++j)
                for (Eigen::Index i = 0; i < w.rows(); ++i)
                    w(i, j) = static_cast<S>(rng.uniform(-bound, bound));
            Mat<S> b(out, 1);
            for (Eigen::Index i = 0; i < b.rows(); ++i)
                b(i, 0) = static_cast<S>(rng.uniform(-bound, bound));
            params_.push_back(std::move(w));
            params_.push_back(std::move(b));
            if (normalized(l)) {
                params_.push_back(Mat<S>::Ones(out, 1));
                params_.push_back(Mat<S>::Zero(out, 1));
            }
        }
        build_index();
    }

    const MlpShape& shape() const { return shape_; }
    std::vector<Mat<S>>& params() { return params_; }
    const std::vector<Mat<S>>& params() const { return params_; }

    std::vector<Mat<S>> zero_grads() const
    {
        std::vector<Mat<S>> g;
        g.reserve(params_.size());
        for (const auto& p : params_)
            g.push_back(Mat<S>::Zero(p.rows(), p.cols()));
        return g;
    }

    std::size_t parameter_count() const
    {
        std::size_t n = 0;
        for (const auto& p : params_)
            n += static_cast<std::size_t>(p.size());
        return n;
    }

    Mat<S> forward(const Mat<S>& x, Cache* cache = nullptr) const
    {
        if (x.rows() != shape_.inputs())
            throw std::invalid_argument("MLP input has " + std::to_string(x.rows()) + " rows, expected " +
                                        std::to_string(shape_.inputs()));
        const int L = shape_.layers();
        if (cache != nullptr) {
            cache->input.assign(L, Mat<S>());
            cache->hidden.assign(L, Mat<S>());
            cache->normed.assign(L, Mat<S>());
            cache->inv_std.assign(L, RowVec<S>());
        }
        Mat<S> a = x;
        for (int l = 0; l < L; ++l) {
            Mat<S> z = weight(l) * a;
            z.colwise() += bias(l).col(0);
            if (cache != nullptr)
                cache->input[l] = std::move(a);
            if (l == L - 1)
                return z;
            if (normalized(l)) {
                const RowVec<S> mean = z.colwise().mean();
                z.rowwise() -= mean;
                const RowVec<S> var = z.array().square().colwise().mean();
                const RowVec<S> inv = (var.array() + kNormEps).rsqrt();
                z.array().rowwise() *= inv.array();
                if (cache != nullptr) {
                    cache->normed[l] = z;
                    cache->inv_std[l] = inv;
                }
                z.array().colwise() *= gain(l).col(0).array();
                z.colwise() += shift(l).col(0);
            }
            if (cache != nullptr)
                cache->hidden[l] = z;
            a = z.cwiseMax(S(0));
        }
        return a;
    }

    /// Reverse pass for upstream gradient `dy` (outputs x batch). Parameter
    /// gradients are summed over the batch and written into `grads` when it
    /// is non-null. Returns the gradient with respect to the input when
    /// `want_input_grad` is set, otherwise an empty matrix.
    Mat<S> backward(const Cache& cache, const Mat<S>& dy, std::vector<Mat<S>>* grads,
                    bool want_input_grad = false) const
    {
        const int L = shape_.layers();
        Mat<S> d = dy;
        for (int l = L - 1; l >= 0; --l) {
            if (l < L - 1) {
                d.array() *= (cache.hidden[l].array() > S(0)).template cast<S>();
                if (normalized(l)) {
                    const Mat<S>& xh = cache.normed[l];
                    if (grads != nullptr) {
                        (*grads)[gain_index(l)] = (d.array() * xh.array()).rowwise().sum().matrix();
                        (*grads)[gain_index(l) + 1] = d.rowwise().sum();
                    }
                    Mat<S> dxh = d.array().colwise() * gain(l).col(0).array();
                    const RowVec<S> m1 = dxh.colwise().mean();
                    const RowVec<S> m2 = (dxh.array() * xh.array()).colwise().mean();
                    dxh.rowwise() -= m1;
                    dxh.array() -= xh.array().rowwise() * m2.array();
                    dxh.array().rowwise() *= cache.inv_std[l].array();
                    d = std::move(dxh);
                }
            }
            if (grads != nullptr) {
                (*grads)[weight_index(l)].noalias() = d * cache.input[l].transpose();
                (*grads)[weight_index(l) + 1] = d.rowwise().sum();
            }
            if (l > 0 || want_input_grad) {
                Mat<S> next = weight(l).transpose() * d;
                d = std::move(next);
            }
        }
        return want_input_grad ? d : Mat<S>();
    }

    /// target <- (1 - tau) target + tau * source, parameter by parameter.
    void polyak_from(const Mlp& source, S tau)
    {
        for (std::size_t i = 0; i < params_.size(); ++i)
            params_[i] = (S(1) - tau) * params_[i] + tau * source.params_[i];
    }

    template <typename T>
    Mlp<T> cast() const
    {
        Mlp<T> out;
        out.shape_ = shape_;
        for (const auto& p : params_)
            out.params_.push_back(p.template cast<T>());
        out.build_index();
        return out;
    }

private:
    template <typename>
    friend class Mlp;

    bool normalized(int l) const { return shape_.layer_norm && l < shape_.layers() - 1; }

    void build_index()
    {
        layer_index_.clear();
        int i = 0;
        for (int l = 0; l < shape_.layers(); ++l) {
            layer_index_.push_back(i);
            i += normalized(l) ? 4 : 2;
        }
    }

    int weight_index(int l) const { return layer_index_[l]; }
    int gain_index(int l) const { return layer_index_[l] + 2; }
    const Mat<S>& weight(int l) const { return params_[weight_index(l)]; }
    const Mat<S>& bias(int l) const { return params_[weight_index(l) + 1]; }
    const Mat<S>& gain(int l) const { return params_[gain_index(l)]; }
    const Mat<S>& shift(int l) const { return params_[gain_index(l) + 1]; }

    MlpShape shape_;
    std::vector<Mat<S>> params_;
    std::vector<int> layer_index_;
};

} // namespace osc::learn
