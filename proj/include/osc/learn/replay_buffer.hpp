#pragma once

#include "osc/learn/features.hpp"
#include "osc/rng.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace osc::learn {

/// Actions are stored in the normalized squashed space [-1, 1]^2 together
/// with the pre-squash sample that produced them.
struct Transition {
    FeatureVector obs;
    std::array<float, 2> action{0.0f, 0.0f};
    std::array<float, 2> pre_squash{0.0f, 0.0f};
    double reward = 0.0;
    FeatureVector next_obs;
    bool done = false;

    friend bool operator==(const Transition&, const Transition&) = default;
};

/// Fixed-capacity ring buffer; the oldest transition is overwritten first.
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t capacity, std::size_t feature_dim);

    void add(Transition t);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::size_t feature_dim() const { return feature_dim_; }
    bool empty() const { return items_.empty(); }
    const Transition& at(std::size_t i) const { return items_.at(i); }

    /// Indices drawn uniformly with replacement.
    std::vector<std::size_t> sample_indices(std::size_t batch, Rng& rng) const;

    std::vector<std::uint8_t> serialize() const;
    static ReplayBuffer deserialize(const std::vector<std::uint8_t>& bytes);

    friend bool operator==(const ReplayBuffer&, const ReplayBuffer&) = default;

private:
    std::size_t capacity_;
    std::size_t feature_dim_;
    std::size_t next_ = 0;
    std::vector<Transition> items_;
};

} // namespace osc::learn
