#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

namespace rns {

/// Single-pass count / mean / variance accumulator (Welford).
class RunningStat {
public:
    void add(double x) noexcept
    {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
    }

    std::uint64_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    double m2() const noexcept { return m2_; }

    /// Sample variance m2 / (n - 1). Undefined below two observations.
    double variance() const
    {
        if (n_ < 2) throw std::domain_error("RunningStat: variance needs at least 2 observations");
        return m2_ / static_cast<double>(n_ - 1);
    }

    bool operator==(const RunningStat&) const = default;

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

inline RunningStat welford_update(RunningStat stat, double x) noexcept
{
    stat.add(x);
    return stat;
}

/// Sample variance of the paired differences X_jl - X_il over n0 >= 2 pairs.
inline double pairwise_variance(std::span<const double> obs_j, std::span<const double> obs_i)
{
    if (obs_j.size() != obs_i.size()) throw std::invalid_argument("pairwise_variance: unequal lengths");
    if (obs_j.size() < 2) throw std::invalid_argument("pairwise_variance: need at least 2 paired observations");
    RunningStat diff;
    for (std::size_t l = 0; l < obs_j.size(); ++l) diff.add(obs_j[l] - obs_i[l]);
    return diff.variance();
}

} // namespace rns
