#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rns/core/problem.hpp"

namespace rns {

/// Least favorable configuration: means (0, ..., 0, delta), common variance.
inline ProblemInstance slippage_config(std::size_t k, double delta, double sigma2)
{
    if (!(delta > 0.0)) throw std::invalid_argument("slippage_config: delta must be positive");
    std::vector<double> means(k, 0.0);
    if (k > 0) means.back() = delta;
    return ProblemInstance(std::move(means), std::vector<double>(k, sigma2), delta);
}

/// Means (0, s, 2s, ..., (k-1)s), common variance.
inline ProblemInstance monotone_config(std::size_t k, double spacing, double sigma2)
{
    if (!(spacing > 0.0)) throw std::invalid_argument("monotone_config: spacing must be positive");
    std::vector<double> means(k);
    for (std::size_t i = 0; i < k; ++i) means[i] = static_cast<double>(i) * spacing;
    return ProblemInstance(std::move(means), std::vector<double>(k, sigma2));
}

/// All means zero: every alternative is best.
inline ProblemInstance equal_means_config(std::size_t k, double sigma2)
{
    return ProblemInstance(std::vector<double>(k, 0.0), std::vector<double>(k, sigma2));
}

} // namespace rns
