#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace rns {

enum class FhnVarianceUpdate {
    full,        // recompute S^2_ji from all n paired observations each round
    first_stage  // keep the first-stage estimate S^2_ji(n0)
};

struct FixedPrecisionConfig {
    double alpha = 0.05;
    std::optional<double> delta;
    int n0 = 20;
    std::optional<double> lambda;                 // Paulson only
    std::optional<std::uint64_t> budget_cap;      // total observations
    FhnVarianceUpdate fhn_variance_update = FhnVarianceUpdate::full;

    void validate(std::size_t k, bool needs_delta) const
    {
        if (k < 2) throw std::invalid_argument("need at least 2 alternatives");
        if (!(alpha > 0.0 && alpha < 1.0 - 1.0 / static_cast<double>(k)))
            throw std::invalid_argument("alpha must lie in (0, 1 - 1/k)");
        if (needs_delta && !delta) throw std::invalid_argument("delta is required");
        if (delta && !(*delta > 0.0)) throw std::invalid_argument("delta must be positive");
        if (n0 < 2) throw std::invalid_argument("n0 must be >= 2");
        if (lambda && delta && !(*lambda > 0.0 && *lambda < *delta))
            throw std::invalid_argument("lambda must lie in (0, delta)");
    }
};

constexpr std::uint64_t kDefaultFhnBudgetCap = 1'000'000;

} // namespace rns
