#pragma once

// Single- and two-stage procedures with a PCS-IZ guarantee.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rns/core/oracle.hpp"
#include "rns/core/result.hpp"
#include "rns/core/running_stat.hpp"
#include "rns/fixed_precision/config.hpp"
#include "rns/numerics/constants.hpp"

namespace rns {

/// n = ceil(2 h^2 sigma^2 / delta^2), clamped to at least one observation.
inline std::uint64_t bechhofer_sample_size(double h, double sigma2, double delta)
{
    if (!(delta > 0.0)) throw std::invalid_argument("bechhofer: delta must be positive");
    const double n = std::ceil(2.0 * h * h * sigma2 / (delta * delta));
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(n));
}

/// Bechhofer's single-stage procedure for a known common variance.
template <SampleSource S>
SelectionResult bechhofer(S& source, double sigma2, const FixedPrecisionConfig& config)
{
    const std::size_t k = source.size();
    config.validate(k, true);
    const double h = bechhofer_h(static_cast<int>(k), config.alpha);
    const std::uint64_t n = bechhofer_sample_size(h, sigma2, *config.delta);

    std::vector<double> means(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        double sum = 0.0;
        for (std::uint64_t j = 0; j < n; ++j) sum += source.sample(i);
        means[i] = sum / static_cast<double>(n);
    }
    return make_result(argmax(means), std::vector<std::uint64_t>(k, n));
}

/// N_i = max{n0, ceil(h_R^2 S_i^2 / delta^2)}.
inline std::uint64_t rinott_sample_size(double h, double s2, double delta, int n0)
{
    const double n = std::ceil(h * h * s2 / (delta * delta));
    return std::max<std::uint64_t>(static_cast<std::uint64_t>(n0), static_cast<std::uint64_t>(n));
}

/// Rinott's two-stage procedure for unknown, unequal variances.
template <SampleSource S>
SelectionResult rinott(S& source, const FixedPrecisionConfig& config)
{
    const std::size_t k = source.size();
    config.validate(k, true);
    const double h = rinott_h(static_cast<int>(k), config.n0, config.alpha);

    std::vector<double> means(k);
    std::vector<std::uint64_t> counts(k);
    for (std::size_t i = 0; i < k; ++i) {
        RunningStat first;
        double sum = 0.0;
        for (int j = 0; j < config.n0; ++j) {
            const double x = source.sample(i);
            first.add(x);
            sum += x;
        }
        const std::uint64_t total = rinott_sample_size(h, first.variance(), *config.delta, config.n0);
        for (std::uint64_t j = config.n0; j < total; ++j) sum += source.sample(i);
        means[i] = sum / static_cast<double>(total);
        counts[i] = total;
    }
    return make_result(argmax(means), std::move(counts));
}

} // namespace rns
