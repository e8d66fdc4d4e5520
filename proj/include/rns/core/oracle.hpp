#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rns/core/problem.hpp"
#include "rns/core/random.hpp"

namespace rns {

/// Produces one observation of alternative i from a randomness stream.
/// Observations of a fixed alternative must be i.i.d. across streams.
template <class O>
concept SamplingOracle = requires(const O& oracle, std::size_t i, RandomnessStream& stream) {
    { oracle.sample(i, stream) } -> std::convertible_to<double>;
    { oracle.size() } -> std::convertible_to<std::size_t>;
};

/// What a procedure sees: draw the next observation of alternative i.
template <class S>
concept SampleSource = requires(S& source, std::size_t i) {
    { source.sample(i) } -> std::convertible_to<double>;
    { source.size() } -> std::convertible_to<std::size_t>;
};

inline double gaussian_sample(const ProblemInstance& instance, std::size_t i, RandomnessStream& stream)
{
    if (i >= instance.k()) throw std::out_of_range("gaussian_sample: alternative index out of range");
    return instance.mean(i) + std::sqrt(instance.variance(i)) * stream.next_normal();
}

class GaussianOracle {
public:
    explicit GaussianOracle(ProblemInstance instance) : instance_(std::move(instance))
    {
        for (double v : instance_.variances()) sd_.push_back(std::sqrt(v));
    }

    double sample(std::size_t i, RandomnessStream& stream) const
    {
        if (i >= sd_.size()) throw std::out_of_range("GaussianOracle: alternative index out of range");
        return instance_.mean(i) + sd_[i] * stream.next_normal();
    }

    std::size_t size() const noexcept { return sd_.size(); }
    const ProblemInstance& instance() const noexcept { return instance_; }

private:
    ProblemInstance instance_;
    std::vector<double> sd_;
};

/// Test double returning a fixed value per alternative. Deliberately
/// violates the positive-variance invariant of ProblemInstance.
class ConstantOracle {
public:
    explicit ConstantOracle(std::vector<double> values) : values_(std::move(values)) {}

    double sample(std::size_t i, RandomnessStream&) const { return values_.at(i); }
    std::size_t size() const noexcept { return values_.size(); }

private:
    std::vector<double> values_;
};

/// Binds an oracle to one macro-replication: alternative i draws from its
/// own substream, and observation j of alternative i always comes from the
/// same block of that substream.
template <SamplingOracle O>
class Sampler {
public:
    /// Uniforms reserved per observation.
    static constexpr std::uint64_t kObservationStride = std::uint64_t{1} << 20;

    Sampler(const O& oracle, std::uint64_t seed, std::uint64_t replication)
        : oracle_(&oracle), seed_(seed), substreams_(oracle.size()), drawn_(oracle.size(), 0)
    {
        for (std::size_t i = 0; i < substreams_.size(); ++i) substreams_[i] = substream_id(replication, i);
    }

    /// Explicit substream per alternative (e.g. to permute labels).
    Sampler(const O& oracle, std::uint64_t seed, std::vector<std::uint64_t> substreams)
        : oracle_(&oracle), seed_(seed), substreams_(std::move(substreams)), drawn_(oracle.size(), 0)
    {
        if (substreams_.size() != oracle.size()) throw std::invalid_argument("Sampler: one substream per alternative");
    }

    double sample(std::size_t i) { return observation(i, drawn_.at(i)++); }

    /// Observation number `index` (0-based) of alternative i. Pure; safe to
    /// call from any thread.
    double observation(std::size_t i, std::uint64_t index) const
    {
        RandomnessStream stream(seed_, substreams_.at(i), index * kObservationStride);
        return oracle_->sample(i, stream);
    }

    std::size_t size() const noexcept { return substreams_.size(); }
    std::uint64_t drawn(std::size_t i) const { return drawn_.at(i); }
    std::uint64_t total_drawn() const { return std::accumulate(drawn_.begin(), drawn_.end(), std::uint64_t{0}); }
    const O& oracle() const noexcept { return *oracle_; }

private:
    const O* oracle_;
    std::uint64_t seed_;
    std::vector<std::uint64_t> substreams_;
    std::vector<std::uint64_t> drawn_;
};

} // namespace rns
