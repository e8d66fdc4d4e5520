#pragma once

// Expected-value-of-information allocation under linear loss with a budget
// constraint, LL(B).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rns/core/oracle.hpp"
#include "rns/core/result.hpp"
#include "rns/core/running_stat.hpp"
#include "rns/fixed_budget/allocation.hpp"
#include "rns/fixed_budget/ocba.hpp"
#include "rns/numerics/distributions.hpp"

namespace rns {

/// Result of solving one stage of the LL(B) allocation. `active` marks the
/// set L; `target` holds n_{(i),t+1} (frozen alternatives keep n_{(i),t}).
struct EviStage {
    std::size_t best = 0;
    std::vector<double> lambda;  // lambda_{(i)(k)} from the final pass
    std::vector<double> gap;     // d_{(i)(k)}
    std::vector<double> eta;     // eta_{(i)} from the final pass; 0 outside L
    std::vector<bool> active;
    std::vector<double> target;
    int passes = 0;              // times the Step 6 allocation was evaluated
    bool fallback_to_best = false;
};

/// Solves the constrained stage allocation: compute candidate targets over
/// L, freeze any alternative whose target falls below its current count,
/// update lambda and repeat.
inline EviStage evi_stage(std::span<const double> means, std::span<const double> variances,
                          std::span<const std::uint64_t> counts, std::uint64_t tau)
{
    const std::size_t k = means.size();
    EviStage s;
    s.best = static_cast<std::size_t>(std::max_element(means.begin(), means.end()) - means.begin());
    s.lambda.assign(k, 0.0);
    s.gap.assign(k, 0.0);
    s.eta.assign(k, 0.0);
    s.active.assign(k, true);
    s.target.assign(k, 0.0);
    std::vector<double> var(k), n(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (counts[i] <= 2) throw std::invalid_argument("evi: every alternative needs more than 2 samples");
        var[i] = std::max(variances[i], kVarianceFloor);
        n[i] = static_cast<double>(counts[i]);
        s.gap[i] = means[s.best] - means[i];
        s.target[i] = n[i];
    }

    for (;;) {
        ++s.passes;
        const bool best_active = s.active[s.best];
        double eta_best = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            s.eta[i] = 0.0;
            if (!s.active[i] || i == s.best) continue;
            const double inv = var[i] / n[i] + (best_active ? var[s.best] / n[s.best] : 0.0);
            const double lam = 1.0 / inv;
            s.lambda[i] = lam;
            const double root = std::sqrt(lam);
            const double d = s.gap[i];
            s.eta[i] = root * (n[i] - 1.0 + lam * d * d) / (n[i] - 2.0) *
                       t_pdf(root * d, DistParams{static_cast<int>(counts[i]) - 1});
            eta_best += s.eta[i];
        }
        if (best_active) s.eta[s.best] = eta_best;

        double pool = static_cast<double>(tau);
        double denom = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            if (s.active[i]) {
                pool += n[i];
                denom += std::sqrt(var[i] * s.eta[i]);
            }
        if (!(denom > 0.0)) {
            s.fallback_to_best = true;
            break;
        }
        bool any_negative = false;
        for (std::size_t i = 0; i < k; ++i)
            if (s.active[i]) {
                s.target[i] = pool * std::sqrt(var[i] * s.eta[i]) / denom;
                if (s.target[i] < n[i]) any_negative = true;
            }
        if (!any_negative) break;
        for (std::size_t i = 0; i < k; ++i)
            if (s.active[i] && s.target[i] < n[i]) {
                s.active[i] = false;
                s.target[i] = n[i];
            }
    }
    if (s.fallback_to_best) {
        std::fill(s.active.begin(), s.active.end(), false);
        for (std::size_t i = 0; i < k; ++i) s.target[i] = n[i];
        s.active[s.best] = true;
        s.target[s.best] = n[s.best] + static_cast<double>(tau);
    }
    return s;
}

/// Integer grants for one stage: the positive increments over L rounded by
/// largest remainder to sum to tau.
inline std::vector<std::uint64_t> evi_grants(const EviStage& stage, std::span<const std::uint64_t> counts,
                                             std::uint64_t tau)
{
    std::vector<double> inc(counts.size(), 0.0);
    for (std::size_t i = 0; i < counts.size(); ++i)
        if (stage.active[i]) inc[i] = std::max(0.0, stage.target[i] - static_cast<double>(counts[i]));
    return largest_remainder(inc, tau);
}

template <SampleSource S>
SelectionResult evi_ll(S& source, const BudgetConfig& config, std::vector<AllocationEvent>* trace = nullptr)
{
    const std::size_t k = source.size();
    config.validate(k, 3);
    std::vector<RunningStat> stats(k);
    std::vector<std::uint64_t> counts(k, static_cast<std::uint64_t>(config.n0));
    for (std::size_t i = 0; i < k; ++i)
        for (int j = 0; j < config.n0; ++j) stats[i].add(source.sample(i));
    std::uint64_t b = k * static_cast<std::uint64_t>(config.n0);

    std::vector<double> means(k), vars(k);
    for (std::uint64_t stage = 1; b < config.budget; ++stage) {
        for (std::size_t i = 0; i < k; ++i) {
            means[i] = stats[i].mean();
            vars[i] = stats[i].variance();
        }
        const EviStage solved = evi_stage(means, vars, counts, config.tau);
        const auto grants = evi_grants(solved, counts, config.tau);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::uint64_t j = 0; j < grants[i]; ++j) stats[i].add(source.sample(i));
            counts[i] += grants[i];
            if (trace) trace->push_back({stage, i, solved.target[i], grants[i]});
        }
        b += config.tau;
    }
    for (std::size_t i = 0; i < k; ++i) means[i] = stats[i].mean();
    return make_result(argmax(means), std::move(counts));
}

} // namespace rns
