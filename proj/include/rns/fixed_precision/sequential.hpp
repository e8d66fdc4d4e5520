#pragma once

// Fully sequential elimination procedures: Paulson, KN and the IZ-free FHN.
// All three sample survivors in lockstep, one observation per round, and
// screen at round boundaries against the survivor set at the start of the
// round.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rns/core/oracle.hpp"
#include "rns/core/result.hpp"
#include "rns/core/running_stat.hpp"
#include "rns/fixed_precision/config.hpp"
#include "rns/numerics/constants.hpp"

namespace rns {

namespace detail {

inline std::size_t argmax_among(std::span<const double> sums, std::span<const std::size_t> members)
{
    std::size_t best = members.front();
    for (std::size_t m : members)
        if (sums[m] > sums[best]) best = m;
    return best;
}

} // namespace detail

/// a = ln((k - 1) / alpha) sigma^2 / (delta - lambda).
inline double paulson_a(std::size_t k, double alpha, double sigma2, double delta, double lambda)
{
    return std::log((static_cast<double>(k) - 1.0) / alpha) * sigma2 / (delta - lambda);
}

/// Paulson's procedure for a known common variance. Alternative j is
/// eliminated once n (Xbar_j - Xbar_i) <= -a + lambda n for a surviving i.
template <SampleSource S>
SelectionResult paulson(S& source, double sigma2, const FixedPrecisionConfig& config)
{
    const std::size_t k = source.size();
    config.validate(k, true);
    if (!config.lambda) throw std::invalid_argument("paulson: lambda is required");
    const double lambda = *config.lambda;
    const double a = paulson_a(k, config.alpha, sigma2, *config.delta, lambda);

    std::vector<std::size_t> survivors(k);
    for (std::size_t i = 0; i < k; ++i) survivors[i] = i;
    std::vector<double> sums(k, 0.0);
    std::vector<std::uint64_t> counts(k, 0);
    std::vector<Elimination> log;
    std::uint64_t total = 0;
    Termination termination = Termination::decision;

    for (std::uint64_t n = 1; survivors.size() > 1; ++n) {
        for (std::size_t i : survivors) {
            sums[i] += source.sample(i);
            ++counts[i];
            ++total;
        }
        const double bound = -a + lambda * static_cast<double>(n);
        std::vector<std::size_t> next;
        for (std::size_t j : survivors) {
            bool eliminated = false;
            for (std::size_t i : survivors)
                if (i != j && sums[j] - sums[i] <= bound) {
                    eliminated = true;
                    break;
                }
            if (!eliminated) next.push_back(j);
        }
        // Once the continuation region has closed every pair is decided;
        // the sample-mean leader is the one left standing.
        if (next.empty()) next.push_back(detail::argmax_among(sums, survivors));
        for (std::size_t j : survivors)
            if (std::find(next.begin(), next.end(), j) == next.end()) log.push_back({n, j});
        survivors = std::move(next);
        if (survivors.size() > 1 && config.budget_cap && total >= *config.budget_cap) {
            termination = Termination::budget_cap;
            break;
        }
    }
    return make_result(detail::argmax_among(sums, survivors), std::move(counts), std::move(log), termination);
}

/// Outcome of KN run on a subset of alternatives. `samples` is aligned with
/// the candidate list; log indices are global.
struct KnOutcome {
    std::size_t winner = 0;
    std::vector<std::uint64_t> samples;
    std::uint64_t total = 0;
    std::vector<Elimination> log;
    Termination terminated_by = Termination::decision;
};

/// W_ji = max{0, (delta / 2n) (h^2 S^2_ji / delta^2 - n)}.
inline double kn_half_width(double h2, double s2, double delta, double n)
{
    return std::max(0.0, delta / (2.0 * n) * (h2 * s2 / (delta * delta) - n));
}

/// KN(C, alpha, delta, n0): the KN procedure restricted to the candidates in C.
template <SampleSource S>
KnOutcome kn_match(S& source, std::span<const std::size_t> candidates, double alpha, double delta, int n0,
                   std::optional<std::uint64_t> budget_cap = std::nullopt)
{
    if (candidates.empty()) throw std::invalid_argument("kn_match: empty candidate set");
    if (!(delta > 0.0)) throw std::invalid_argument("kn_match: delta must be positive");
    if (n0 < 2) throw std::invalid_argument("kn_match: n0 must be >= 2");
    const std::size_t m = candidates.size();
    KnOutcome out;
    out.samples.assign(m, 0);
    if (m == 1) {
        out.winner = candidates.front();
        return out;
    }
    const double h2 = kn_h2(static_cast<int>(m), n0, alpha);

    std::vector<std::vector<double>> first(m, std::vector<double>(n0));
    std::vector<double> sums(m, 0.0);
    for (std::size_t a = 0; a < m; ++a)
        for (int l = 0; l < n0; ++l) {
            first[a][l] = source.sample(candidates[a]);
            sums[a] += first[a][l];
        }
    std::vector<double> s2(m * m, 0.0);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b) s2[a * m + b] = s2[b * m + a] = pairwise_variance(first[a], first[b]);
    first.clear();

    std::vector<std::size_t> survivors(m);
    for (std::size_t a = 0; a < m; ++a) {
        survivors[a] = a;
        out.samples[a] = static_cast<std::uint64_t>(n0);
    }
    out.total = m * static_cast<std::uint64_t>(n0);

    for (std::uint64_t n = n0;; ++n) {
        const double nd = static_cast<double>(n);
        std::vector<std::size_t> next;
        next.reserve(survivors.size());
        for (std::size_t j : survivors) {
            bool keep = true;
            for (std::size_t i : survivors) {
                if (i == j) continue;
                const double w = kn_half_width(h2, s2[j * m + i], delta, nd);
                if ((sums[j] - sums[i]) / nd < -w) {
                    keep = false;
                    break;
                }
            }
            if (keep) next.push_back(j);
            else out.log.push_back({n, candidates[j]});
        }
        survivors = std::move(next);
        if (survivors.size() <= 1) break;
        if (budget_cap && out.total >= *budget_cap) {
            out.terminated_by = Termination::budget_cap;
            break;
        }
        for (std::size_t j : survivors) {
            sums[j] += source.sample(candidates[j]);
            ++out.samples[j];
            ++out.total;
        }
    }
    out.winner = candidates[detail::argmax_among(sums, survivors)];
    return out;
}

template <SampleSource S>
SelectionResult kn(S& source, const FixedPrecisionConfig& config)
{
    const std::size_t k = source.size();
    config.validate(k, true);
    std::vector<std::size_t> all(k);
    for (std::size_t i = 0; i < k; ++i) all[i] = i;
    KnOutcome out = kn_match(source, all, config.alpha, *config.delta, config.n0, config.budget_cap);
    return make_result(out.winner, std::move(out.samples), std::move(out.log), out.terminated_by);
}

/// c = -2 log(2 alpha / (k - 1)).
inline double fhn_c(std::size_t k, double alpha) { return -2.0 * std::log(2.0 * alpha / (static_cast<double>(k) - 1.0)); }

/// g(t) = sqrt((c + log(t + 1)) (t + 1)).
inline double fhn_boundary(double c, double t) { return std::sqrt((c + std::log1p(t)) * (t + 1.0)); }

/// FHN survival test for the pair (j, i): t (Xbar_j - Xbar_i) >= -g(t),
/// with t = n / S^2_ji.
inline bool fhn_survives(double c, double n, double s2, double mean_diff)
{
    if (s2 <= 0.0) return mean_diff >= 0.0;
    const double t = n / s2;
    return t * mean_diff >= -fhn_boundary(c, t);
}

/// The indifference-zone-free FHN procedure. Stops on budget_cap (default
/// 10^6 observations) since it need not terminate under exact ties.
template <SampleSource S>
SelectionResult fhn(S& source, const FixedPrecisionConfig& config)
{
    const std::size_t k = source.size();
    config.validate(k, false);
    const double c = fhn_c(k, config.alpha);
    const std::uint64_t cap = config.budget_cap.value_or(kDefaultFhnBudgetCap);
    const bool update = config.fhn_variance_update == FhnVarianceUpdate::full;

    std::vector<std::vector<double>> first(k, std::vector<double>(config.n0));
    std::vector<double> sums(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (int l = 0; l < config.n0; ++l) {
            first[i][l] = source.sample(i);
            sums[i] += first[i][l];
        }
    // Pairwise difference statistics, upper triangle (j < i) only.
    std::vector<RunningStat> diff(k * k);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = j + 1; i < k; ++i)
            for (int l = 0; l < config.n0; ++l) diff[j * k + i].add(first[j][l] - first[i][l]);
    std::vector<double> s2(k * k, 0.0);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = j + 1; i < k; ++i) s2[j * k + i] = s2[i * k + j] = diff[j * k + i].variance();
    first.clear();

    std::vector<std::size_t> survivors(k);
    for (std::size_t i = 0; i < k; ++i) survivors[i] = i;
    std::vector<std::uint64_t> counts(k, static_cast<std::uint64_t>(config.n0));
    std::uint64_t total = k * static_cast<std::uint64_t>(config.n0);
    std::vector<Elimination> log;
    Termination termination = Termination::decision;
    std::vector<double> latest(k);

    for (std::uint64_t n = config.n0;; ++n) {
        const double nd = static_cast<double>(n);
        std::vector<std::size_t> next;
        for (std::size_t j : survivors) {
            bool keep = true;
            for (std::size_t i : survivors) {
                if (i == j) continue;
                if (!fhn_survives(c, nd, s2[j * k + i], (sums[j] - sums[i]) / nd)) {
                    keep = false;
                    break;
                }
            }
            if (keep) next.push_back(j);
            else log.push_back({n, j});
        }
        survivors = std::move(next);
        if (survivors.size() <= 1) break;
        if (total >= cap) {
            termination = Termination::budget_cap;
            break;
        }
        for (std::size_t j : survivors) {
            latest[j] = source.sample(j);
            sums[j] += latest[j];
            ++counts[j];
            ++total;
        }
        if (update) {
            // Survivors always hold equal counts, so pairing is by index.
            for (std::size_t a = 0; a < survivors.size(); ++a)
                for (std::size_t b = a + 1; b < survivors.size(); ++b) {
                    const std::size_t j = survivors[a], i = survivors[b];
                    RunningStat& st = diff[j * k + i];
                    st.add(latest[j] - latest[i]);
                    s2[j * k + i] = s2[i * k + j] = st.variance();
                }
        }
    }
    return make_result(detail::argmax_among(sums, survivors), std::move(counts), std::move(log), termination);
}

} // namespace rns
