#pragma once

// Knockout tournament with a Rinott boosting stage. Alternatives are dealt
// round-robin to m workers; each worker plays its own bracket of KN matches
// and then boosts its finalist. The master only sees the m finalists.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rns/core/oracle.hpp"
#include "rns/core/result.hpp"
#include "rns/core/running_stat.hpp"
#include "rns/fixed_precision/config.hpp"
#include "rns/fixed_precision/sequential.hpp"
#include "rns/numerics/constants.hpp"
#include "rns/parallel/pool.hpp"

namespace rns {

struct KtConfig {
    std::size_t g = 2;  // alternatives per match
    std::size_t m = 1;  // workers
    std::optional<double> lambda;  // accepted for completeness; no step uses it

    void validate(std::size_t k, const FixedPrecisionConfig& fp) const
    {
        if (g < 2) throw std::invalid_argument("kt_plus: g must be >= 2");
        if (m < 1) throw std::invalid_argument("kt_plus: m must be >= 1");
        if (k < m) throw std::invalid_argument("kt_plus: need k >= m");
        if (lambda && fp.delta && !(*lambda > 0.0 && *lambda < *fp.delta))
            throw std::invalid_argument("kt_plus: lambda must lie in (0, delta)");
    }
};

/// alpha / 2^r.
inline double kt_round_alpha(double alpha, std::uint64_t r) { return std::ldexp(alpha, -static_cast<int>(r)); }

/// Smallest r >= 0 with g^r * m >= k, i.e. ceil(log_g(k/m)).
inline std::uint64_t kt_ceil_log(std::size_t k, std::size_t m, std::size_t g)
{
    std::uint64_t r = 0;
    for (std::size_t reach = m; reach < k; reach *= g) ++r;
    return r;
}

/// Round index used for the boosting stage.
inline std::uint64_t kt_boost_round(std::size_t k, std::size_t m, std::size_t g) { return kt_ceil_log(k, m, g) + 1; }

/// Alternatives (0-based) assigned to worker w: those with (i mod m) + 1 = w + 1.
inline std::vector<std::size_t> kt_partition(std::size_t k, std::size_t m, std::size_t w)
{
    std::vector<std::size_t> out;
    for (std::size_t i = w; i < k; i += m) out.push_back(i);
    return out;
}

/// N_max = max{n0, ceil((h S / delta)^2)}.
inline std::uint64_t kt_boost_size(double h, double s2, double delta, int n0)
{
    const double raw = std::ceil(h * h * s2 / (delta * delta));
    return std::max<std::uint64_t>(static_cast<std::uint64_t>(n0), static_cast<std::uint64_t>(raw));
}

struct KtMatch {
    std::size_t worker = 0;
    std::uint64_t round = 0;
    double alpha = 0.0;
    std::vector<std::size_t> members;
    std::size_t winner = 0;
    std::uint64_t samples = 0;

    bool operator==(const KtMatch&) const = default;
};

struct KtBracketJob {
    std::size_t worker = 0;
    std::vector<std::size_t> alternatives;
};

struct KtBracketResult {
    std::size_t finalist = 0;
    std::vector<KtMatch> matches;
    std::vector<Elimination> eliminations;
    std::map<std::size_t, std::uint64_t> samples;  // per alternative, bracket plus boosting
    std::uint64_t boost_samples = 0;
    double boosted_mean = 0.0;
};

namespace detail {

/// Sequential view of a Sampler for one worker: keeps its own observation
/// counters so concurrent workers never share mutable state.
template <SamplingOracle O>
class CursorSource {
public:
    CursorSource(const Sampler<O>& sampler, std::map<std::size_t, std::uint64_t>& counts)
        : sampler_(&sampler), counts_(&counts)
    {
    }

    double sample(std::size_t i) { return sampler_->observation(i, (*counts_)[i]++); }
    std::size_t size() const noexcept { return sampler_->size(); }

private:
    const Sampler<O>* sampler_;
    std::map<std::size_t, std::uint64_t>* counts_;
};

} // namespace detail

/// One worker's bracket followed by its boosting stage.
template <SamplingOracle O>
KtBracketResult kt_bracket(const Sampler<O>& sampler, const KtBracketJob& job, const FixedPrecisionConfig& config,
                           const KtConfig& kt)
{
    const std::size_t k = sampler.size();
    const double delta = *config.delta;
    KtBracketResult out;
    detail::CursorSource<O> source(sampler, out.samples);

    std::vector<std::size_t> field = job.alternatives;
    for (std::uint64_t r = 1; field.size() > 1; ++r) {
        const double alpha_r = kt_round_alpha(config.alpha, r);
        std::vector<std::size_t> next;
        for (std::size_t start = 0; start < field.size(); start += kt.g) {
            const std::size_t end = std::min(field.size(), start + kt.g);
            std::vector<std::size_t> members(field.begin() + static_cast<std::ptrdiff_t>(start),
                                             field.begin() + static_cast<std::ptrdiff_t>(end));
            const KnOutcome match = kn_match(source, members, alpha_r, delta, config.n0);
            for (const auto& e : match.log) out.eliminations.push_back({r, e.index});
            // A singleton leftover advances without sampling.
            if (members.size() > 1)
                out.matches.push_back({job.worker, r, alpha_r, members, match.winner, match.total});
            next.push_back(match.winner);
        }
        field = std::move(next);
    }
    out.finalist = field.front();

    const double alpha_b = kt_round_alpha(config.alpha, kt_boost_round(k, kt.m, kt.g));
    const double h = kt.m >= 2 ? rinott_h(static_cast<int>(kt.m), config.n0, alpha_b) : 0.0;
    RunningStat first;
    for (int l = 0; l < config.n0; ++l) first.add(source.sample(out.finalist));
    const std::uint64_t n_max = kt_boost_size(h, first.variance(), delta, config.n0);
    double sum = first.mean() * static_cast<double>(config.n0);
    for (std::uint64_t l = static_cast<std::uint64_t>(config.n0); l < n_max; ++l) sum += source.sample(out.finalist);
    out.boost_samples = n_max;
    out.boosted_mean = sum / static_cast<double>(n_max);
    return out;
}

struct KtOutcome {
    SelectionResult result;
    std::vector<KtMatch> matches;
    std::vector<std::size_t> finalists;       // by worker
    std::vector<double> boosted_means;        // by worker
    std::vector<std::uint64_t> boost_samples; // by worker
    std::uint64_t boost_round = 0;
    std::vector<PoolMessage> messages;        // snapshot taken when the finalists are in
};

template <class Pool>
KtOutcome kt_plus_run(Pool& pool, std::size_t k, const FixedPrecisionConfig& config, const KtConfig& kt)
{
    config.validate(k, true);
    kt.validate(k, config);
    for (std::size_t w = 0; w < kt.m; ++w) pool.submit(KtBracketJob{w, kt_partition(k, kt.m, w)});

    std::vector<KtBracketResult> results(kt.m);
    for (std::size_t got = 0; got < kt.m; ++got) {
        auto c = pool.next();
        results[c.job.worker] = std::move(*c.result);
    }

    KtOutcome out;
    out.messages = pool.message_log();
    out.boost_round = kt_boost_round(k, kt.m, kt.g);
    std::vector<std::uint64_t> per_alt(k, 0);
    std::vector<Elimination> log;
    for (std::size_t w = 0; w < kt.m; ++w) {
        auto& r = results[w];
        out.finalists.push_back(r.finalist);
        out.boosted_means.push_back(r.boosted_mean);
        out.boost_samples.push_back(r.boost_samples);
        for (auto& mt : r.matches) out.matches.push_back(std::move(mt));
        for (const auto& e : r.eliminations) log.push_back(e);
        for (const auto& [i, n] : r.samples) per_alt[i] += n;
    }
    std::stable_sort(log.begin(), log.end(), [](const Elimination& a, const Elimination& b) {
        return a.stage != b.stage ? a.stage < b.stage : a.index < b.index;
    });
    // Largest boosted mean; ties go to the lowest alternative index.
    std::size_t best = 0;
    for (std::size_t w = 1; w < kt.m; ++w) {
        const bool better = out.boosted_means[w] > out.boosted_means[best] ||
                            (out.boosted_means[w] == out.boosted_means[best] && out.finalists[w] < out.finalists[best]);
        if (better) best = w;
    }
    out.result = make_result(out.finalists[best], std::move(per_alt), std::move(log));
    return out;
}

template <SamplingOracle O>
KtOutcome kt_plus(const Sampler<O>& sampler, const FixedPrecisionConfig& config, const KtConfig& kt,
                  const PoolConfig& pool_config, RandomnessStream delay_stream)
{
    PoolConfig pc = pool_config;
    pc.workers = kt.m;
    std::function<KtBracketResult(const KtBracketJob&)> handler = [&](const KtBracketJob& job) {
        return kt_bracket(sampler, job, config, kt);
    };
    return with_pool<KtBracketJob, KtBracketResult>(pc, handler, delay_stream,
                                                    [&](auto& pool) { return kt_plus_run(pool, sampler.size(), config, kt); });
}

} // namespace rns
