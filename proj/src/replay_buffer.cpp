#include "osc/learn/replay_buffer.hpp"

#include "osc/binary_io.hpp"

#include <stdexcept>

namespace osc::learn {

namespace {

constexpr std::uint32_t kReplayVersion = 1;

void put_features(std::vector<std::uint8_t>& out, const FeatureVector& f)
{
    for (float v : f)
        io::put_le(out, v);
}

FeatureVector get_features(io::Reader& r, std::size_t n)
{
    FeatureVector f(n);
    for (auto& v : f)
        v = r.get<float>();
    return f;
}

} // namespace

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t feature_dim)
    : capacity_(capacity), feature_dim_(feature_dim)
{
    if (capacity == 0)
        throw std::invalid_argument("replay buffer capacity must be positive");
}

void ReplayBuffer::add(Transition t)
{
    if (t.obs.size() != feature_dim_ || t.next_obs.size() != feature_dim_)
        throw std::invalid_argument("transition feature size does not match the buffer");
    if (items_.size() < capacity_) {
        items_.push_back(std::move(t));
    } else {
        items_[next_] = std::move(t);
    }
    next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch, Rng& rng) const
{
    if (items_.empty())
        throw std::logic_error("cannot sample from an empty replay buffer");
    std::vector<std::size_t> idx(batch);
    for (auto& i : idx)
        i = static_cast<std::size_t>(rng.below(items_.size()));
    return idx;
}

std::vector<std::uint8_t> ReplayBuffer::serialize() const
{
    std::vector<std::uint8_t> out;
    io::put_magic(out, "OSCR");
    io::put_le<std::uint32_t>(out, kReplayVersion);
    io::put_le<std::uint64_t>(out, capacity_);
    io::put_le<std::uint64_t>(out, feature_dim_);
    io::put_le<std::uint64_t>(out, next_);
    io::put_le<std::uint64_t>(out, items_.size());
    for (const auto& t : items_) {
        put_features(out, t.obs);
        for (float v : t.action)
            io::put_le(out, v);
        for (float v : t.pre_squash)
            io::put_le(out, v);
        io::put_le(out, t.reward);
        put_features(out, t.next_obs);
        io::put_le<std::uint8_t>(out, t.done ? 1 : 0);
    }
    return out;
}

ReplayBuffer ReplayBuffer::deserialize(const std::vector<std::uint8_t>& bytes)
{
    io::Reader r(bytes);
    r.expect_magic("OSCR");
    if (r.get<std::uint32_t>() != kReplayVersion)
        throw std::runtime_error("unsupported replay buffer version");
    const auto capacity = r.get<std::uint64_t>();
    const auto dim = r.get<std::uint64_t>();
    const auto next = r.get<std::uint64_t>();
    const auto n = r.get<std::uint64_t>();
    if (n > capacity || (capacity > 0 && next >= capacity))
        throw std::runtime_error("corrupt replay buffer header");
    ReplayBuffer buf(capacity, dim);
    buf.items_.reserve(n);
    for (std::uint64_t k = 0; k < n; ++k) {
        Transition t;
        t.obs = get_features(r, dim);
        for (auto& v : t.action)
            v = r.get<float>();
        for (auto& v : t.pre_squash)
            v = r.get<float>();
        t.reward = r.get<double>();
        t.next_obs = get_features(r, dim);
        const auto done = r.get<std::uint8_t>();
        if (done > 1)
            throw std::runtime_error("corrupt replay buffer done flag");
        t.done = done == 1;
        buf.items_.push_back(std::move(t));
    }
    if (r.remaining() != 0)
        throw std::runtime_error("trailing bytes after replay buffer");
    buf.next_ = next;
    return buf;
}

} // namespace osc::learn
