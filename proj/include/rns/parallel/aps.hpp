#pragma once

// Asynchronous parallel selection. The master feeds surviving alternatives
// to workers in round-robin order with a phantom marker once per cycle; each
// phantom completion is a screening epoch.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rns/core/oracle.hpp"
#include "rns/core/result.hpp"
#include "rns/fixed_precision/config.hpp"
#include "rns/parallel/pool.hpp"

namespace rns {

struct SampleJob {
    std::size_t alternative = 0;
    std::uint64_t index = 0;  // observation number within the alternative's substream
    bool phantom = false;

    bool operator==(const SampleJob&) const = default;
};

/// a = -log[2 alpha / (k - 1)].
inline double aps_a(std::size_t k, double alpha) { return -std::log(2.0 * alpha / (static_cast<double>(k) - 1.0)); }

/// tau_ij = [S_i^2/N_i + S_j^2/N_j]^-1 once both counts reach n0, else 0.
inline double aps_tau(double s2_i, std::uint64_t n_i, double s2_j, std::uint64_t n_j, int n0)
{
    const auto floor = static_cast<std::uint64_t>(n0);
    if (n_i < floor || n_j < floor) return 0.0;
    const double denom = s2_i / static_cast<double>(n_i) + s2_j / static_cast<double>(n_j);
    if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
    return 1.0 / denom;
}

/// Survivor condition for i against j: tau (Ybar_i - Ybar_j) >= min{0, -a/delta + (delta/2) tau}.
inline bool aps_survives(double tau, double mean_diff, double a, double delta)
{
    if (tau == 0.0) return true;
    if (std::isinf(tau)) return mean_diff >= 0.0;
    return tau * mean_diff >= std::min(0.0, -a / delta + 0.5 * delta * tau);
}

/// Running triple (N, sum Y, sum Y^2) for one alternative.
struct ApsTriple {
    std::uint64_t n = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double y)
    {
        ++n;
        sum += y;
        sum_sq += y * y;
    }
    double mean() const { return sum / static_cast<double>(n); }
    double variance() const
    {
        if (n < 2) return 0.0;
        const double nd = static_cast<double>(n);
        return std::max(0.0, (sum_sq - sum * sum / nd) / (nd - 1.0));
    }
};

struct ApsOutcome {
    SelectionResult result;               // per_alt_samples counts dispatched jobs
    std::vector<std::uint64_t> accepted;  // observations entered into the triples
    std::uint64_t dropped = 0;
    std::uint64_t stages = 0;             // phantom completions
    std::vector<PoolMessage> messages;
};

/// Drives an APS run over an already constructed pool whose jobs are
/// SampleJob and results are observations.
template <class Pool>
ApsOutcome aps_run(Pool& pool, std::size_t k, const FixedPrecisionConfig& config)
{
    config.validate(k, true);
    const double delta = *config.delta;
    const double a = aps_a(k, config.alpha);

    std::vector<bool> alive(k, true);
    std::size_t survivors = k;
    std::vector<ApsTriple> triples(k);
    std::vector<std::uint64_t> dispatched(k, 0);
    std::vector<Elimination> log;
    std::uint64_t dropped = 0;
    std::uint64_t r = 1;

    // Cursor over positions 0..k-1 (alternatives) and k (the phantom).
    std::size_t cursor = 0;
    auto dispatch_one = [&] {
        for (;;) {
            const std::size_t pos = cursor;
            cursor = (cursor + 1) % (k + 1);
            if (pos == k) {
                pool.submit_marker(SampleJob{0, 0, true});
                continue;
            }
            if (!alive[pos]) continue;
            pool.submit(SampleJob{pos, dispatched[pos]++, false});
            return;
        }
    };

    for (std::size_t w = 0; w < pool.workers(); ++w) dispatch_one();

    std::vector<double> means(k), vars(k);
    while (survivors > 1) {
        auto c = pool.next();
        if (c.job.phantom) {
            for (std::size_t i = 0; i < k; ++i)
                if (alive[i] && triples[i].n > 0) {
                    means[i] = triples[i].mean();
                    vars[i] = triples[i].variance();
                }
            std::vector<std::size_t> out;
            for (std::size_t i = 0; i < k; ++i) {
                if (!alive[i]) continue;
                for (std::size_t j = 0; j < k; ++j) {
                    if (j == i || !alive[j]) continue;
                    const double tau = aps_tau(vars[i], triples[i].n, vars[j], triples[j].n, config.n0);
                    if (!aps_survives(tau, means[i] - means[j], a, delta)) {
                        out.push_back(i);
                        break;
                    }
                }
            }
            for (std::size_t i : out) {
                alive[i] = false;
                --survivors;
                log.push_back({r, i});
            }
            ++r;
            continue;
        }
        const std::size_t h = c.job.alternative;
        if (alive[h]) triples[h].add(*c.result);
        else ++dropped;
        dispatch_one();
    }

    std::size_t winner = 0;
    while (!alive[winner]) ++winner;
    ApsOutcome out;
    out.result = make_result(winner, dispatched, std::move(log));
    out.accepted.resize(k);
    for (std::size_t i = 0; i < k; ++i) out.accepted[i] = triples[i].n;
    out.dropped = dropped;
    out.stages = r - 1;
    out.messages = pool.message_log();
    return out;
}

template <SamplingOracle O>
std::function<double(const SampleJob&)> sample_handler(const Sampler<O>& sampler)
{
    return [&sampler](const SampleJob& job) { return sampler.observation(job.alternative, job.index); };
}

/// APS for one macro-replication on a pool built from `pool_config`.
template <SamplingOracle O>
ApsOutcome aps(const Sampler<O>& sampler, const FixedPrecisionConfig& config, const PoolConfig& pool_config,
               RandomnessStream delay_stream)
{
    return with_pool<SampleJob, double>(pool_config, sample_handler(sampler), delay_stream,
                                        [&](auto& pool) { return aps_run(pool, sampler.size(), config); });
}

} // namespace rns
