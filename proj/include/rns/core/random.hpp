#pragma once

#include <cstdint>

#include "rns/numerics/distributions.hpp"

namespace rns {

namespace detail {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Counter-based uniform stream keyed by (seed, substream). The value at a
/// given position is a pure function of (seed, substream, position), so
/// identical keys always replay the same sequence regardless of how draws
/// are interleaved with other streams.
class RandomnessStream {
public:
    RandomnessStream(std::uint64_t seed, std::uint64_t substream, std::uint64_t position = 0) noexcept
        : seed_(seed), substream_(substream), key_(derive_key(seed, substream)), position_(position)
    {
    }

    std::uint64_t next_u64() noexcept { return detail::mix64(key_ + (++position_) * detail::kGolden); }

    /// Uniform on the open interval (0, 1).
    double next_uniform() noexcept { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal by inverse-cdf transform of one uniform.
    double next_normal() { return normal_quantile(next_uniform()); }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t substream() const noexcept { return substream_; }
    std::uint64_t position() const noexcept { return position_; }

private:
    static constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t substream) noexcept
    {
        return detail::mix64(detail::mix64(seed + detail::kGolden) ^ (substream * 0xd1342543de82ef95ULL + 1));
    }

    std::uint64_t seed_;
    std::uint64_t substream_;
    std::uint64_t key_;
    std::uint64_t position_;
};

/// Substream id of alternative `alt` within macro-replication `replication`.
constexpr std::uint64_t substream_id(std::uint64_t replication, std::uint64_t alt) noexcept
{
    return (replication << 32) ^ alt;
}

} // namespace rns
