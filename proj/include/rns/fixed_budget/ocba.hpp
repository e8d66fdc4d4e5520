#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rns/core/oracle.hpp"
#include "rns/core/result.hpp"
#include "rns/core/running_stat.hpp"
#include "rns/fixed_budget/allocation.hpp"

namespace rns {

struct BudgetConfig {
    std::uint64_t budget = 1000;  // N
    std::uint64_t tau = 10;       // per-stage increment
    int n0 = 10;

    void validate(std::size_t k, int min_n0) const
    {
        if (k < 2) throw std::invalid_argument("need at least 2 alternatives");
        if (n0 < min_n0) throw std::invalid_argument("n0 must be >= " + std::to_string(min_n0));
        if (tau < 1) throw std::invalid_argument("tau must be >= 1");
        if (budget < k * static_cast<std::uint64_t>(n0)) throw std::invalid_argument("budget must be >= k * n0");
    }
};

/// One row of a per-stage allocation trace.
struct AllocationEvent {
    std::uint64_t stage = 0;
    std::size_t alternative = 0;
    double target = 0.0;
    std::uint64_t granted = 0;

    bool operator==(const AllocationEvent&) const = default;
};

constexpr double kVarianceFloor = 1e-12;

/// Real-valued OCBA stage targets summing to `budget`, computed from the
/// current estimates. If another alternative ties the sample best, the
/// ratio is unbounded and the lowest-index tied alternative (the sample
/// best itself) takes the whole budget.
inline std::vector<double> ocba_targets(std::span<const double> means, std::span<const double> variances, double budget)
{
    const std::size_t k = means.size();
    const std::size_t best = static_cast<std::size_t>(std::max_element(means.begin(), means.end()) - means.begin());
    std::vector<double> w(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        if (i != best && means[i] == means[best]) {
            w[best] = budget;
            return w;
        }
    std::vector<double> sd(k);
    for (std::size_t i = 0; i < k; ++i) sd[i] = std::sqrt(std::max(variances[i], kVarianceFloor));
    double sq = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (i == best) continue;
        const double ratio = sd[i] / (means[best] - means[i]);
        w[i] = ratio * ratio;
        sq += w[i] * w[i] / (sd[i] * sd[i]);
    }
    w[best] = sd[best] * std::sqrt(sq);
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x *= budget / sum;
    return w;
}

/// Sequential OCBA. Each stage targets b_t + tau total samples; every
/// alternative is granted max{0, target - n_i}, and when those grants exceed
/// tau they are scaled back to exactly tau (largest remainder). The loop
/// exits once b_t >= N, so the final total may exceed N by at most tau - 1.
template <SampleSource S>
SelectionResult ocba(S& source, const BudgetConfig& config, std::vector<AllocationEvent>* trace = nullptr)
{
    const std::size_t k = source.size();
    config.validate(k, 5);
    std::vector<RunningStat> stats(k);
    std::vector<std::uint64_t> counts(k, static_cast<std::uint64_t>(config.n0));
    for (std::size_t i = 0; i < k; ++i)
        for (int j = 0; j < config.n0; ++j) stats[i].add(source.sample(i));
    std::uint64_t b = k * static_cast<std::uint64_t>(config.n0);

    std::vector<double> means(k), vars(k), want(k);
    for (std::uint64_t stage = 1; b < config.budget; ++stage) {
        for (std::size_t i = 0; i < k; ++i) {
            means[i] = stats[i].mean();
            vars[i] = stats[i].variance();
        }
        const std::uint64_t next_b = b + config.tau;
        const auto real_targets = ocba_targets(means, vars, static_cast<double>(next_b));
        const auto targets = largest_remainder(real_targets, next_b);
        for (std::size_t i = 0; i < k; ++i)
            want[i] = targets[i] > counts[i] ? static_cast<double>(targets[i] - counts[i]) : 0.0;
        const auto grants = largest_remainder(want, config.tau);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::uint64_t j = 0; j < grants[i]; ++j) stats[i].add(source.sample(i));
            counts[i] += grants[i];
            if (trace) trace->push_back({stage, i, real_targets[i], grants[i]});
        }
        b = next_b;
    }
    for (std::size_t i = 0; i < k; ++i) means[i] = stats[i].mean();
    return make_result(argmax(means), std::move(counts));
}

/// Equal allocation of N samples (remainder to the lowest indices); the
/// baseline OCBA is compared against.
template <SampleSource S>
SelectionResult equal_allocation(S& source, std::uint64_t budget)
{
    const std::size_t k = source.size();
    if (budget < k) throw std::invalid_argument("equal_allocation: budget must be >= k");
    std::vector<std::uint64_t> counts(k, budget / k);
    for (std::size_t i = 0; i < budget % k; ++i) ++counts[i];
    std::vector<double> means(k);
    for (std::size_t i = 0; i < k; ++i) {
        double sum = 0.0;
        for (std::uint64_t j = 0; j < counts[i]; ++j) sum += source.sample(i);
        means[i] = sum / static_cast<double>(counts[i]);
    }
    return make_result(argmax(means), std::move(counts));
}

} // namespace rns
