#pragma once

// Monte Carlo evaluation: R independent macro-replications, each on its own
// substreams (seed, replication), aggregated in replication order so the
// report does not depend on how replications were scheduled.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rns/core/problem.hpp"
#include "rns/core/result.hpp"
#include "rns/harness/procedure.hpp"
#include "rns/numerics/distributions.hpp"

namespace rns {

struct ExperimentConfig {
    ProblemInstance instance;
    ProcedureSpec procedure;
    std::uint64_t replications = 1;
    std::uint64_t seed = 1;
    std::optional<double> good_delta;  // PGS threshold; falls back to the IZ delta

    void validate() const
    {
        if (replications < 1) throw std::invalid_argument("harness.replications must be >= 1");
    }

    std::optional<double> pgs_delta() const
    {
        if (good_delta) return good_delta;
        if (procedure.fixed.delta) return procedure.fixed.delta;
        return instance.iz_delta();
    }
};

struct ReplicationOutcome {
    std::size_t selected = 0;
    bool correct = false;
    bool good = false;
    bool aborted = false;
    double opportunity_cost = 0.0;
    std::uint64_t total_samples = 0;

    bool operator==(const ReplicationOutcome&) const = default;
};

/// Proportion or mean with its standard error.
struct Estimate {
    double value = 0.0;
    double se = 0.0;

    bool operator==(const Estimate&) const = default;
};

struct EvalReport {
    std::string procedure;
    std::size_t k = 0;
    std::uint64_t replications = 0;
    Estimate pcs;
    Estimate pgs;
    Estimate eoc;
    Estimate mean_total_samples;
    double pcs_wilson_low = 0.0;
    double pcs_wilson_high = 0.0;
    std::uint64_t aborted = 0;
    double runtime_s = 0.0;
    std::vector<ReplicationOutcome> outcomes;

    /// Equality of everything but wall-clock runtime.
    bool same_results(const EvalReport& o) const
    {
        return procedure == o.procedure && k == o.k && replications == o.replications && pcs == o.pcs &&
               pgs == o.pgs && eoc == o.eoc && mean_total_samples == o.mean_total_samples &&
               pcs_wilson_low == o.pcs_wilson_low && pcs_wilson_high == o.pcs_wilson_high && aborted == o.aborted &&
               outcomes == o.outcomes;
    }
};

/// sqrt(p (1 - p) / R).
inline Estimate proportion(std::uint64_t hits, std::uint64_t n)
{
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

inline Estimate sample_mean(const std::vector<double>& xs)
{
    const double n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / n;
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

/// Wilson score interval at z = 1.96.
inline std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t n, double z = 1.959963984540054)
{
    const double nd = static_cast<double>(n);
    const double p = static_cast<double>(hits) / nd;
    const double z2 = z * z;
    const double center = (p + z2 / (2.0 * nd)) / (1.0 + z2 / nd);
    const double half = z / (1.0 + z2 / nd) * std::sqrt(p * (1.0 - p) / nd + z2 / (4.0 * nd * nd));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Judges one finished replication against the ground truth.
inline ReplicationOutcome judge(const ProblemInstance& instance, const SelectionResult& result,
                                std::optional<double> good_delta)
{
    ReplicationOutcome o;
    o.selected = result.selected;
    o.total_samples = result.total_samples;
    o.aborted = result.terminated_by != Termination::decision;
    if (o.aborted) {
        const auto means = instance.means();
        o.opportunity_cost = instance.best_mean() - *std::min_element(means.begin(), means.end());
        return o;
    }
    o.correct = instance.is_best(result.selected);
    o.good = o.correct || (good_delta && instance.is_good(result.selected, *good_delta));
    o.opportunity_cost = instance.best_mean() - instance.mean(result.selected);
    return o;
}

/// Runs one replication. Invalid parameters propagate; any other failure
/// inside the procedure is recorded as an aborted replication.
inline ReplicationOutcome run_replication(const ExperimentConfig& config, std::uint64_t rep)
{
    try {
        const SelectionResult r = run_once(config.procedure, config.instance, config.seed, rep);
        return judge(config.instance, r, config.pgs_delta());
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::domain_error&) {
        throw;
    } catch (const std::exception&) {
        SelectionResult failed;
        failed.terminated_by = Termination::budget_cap;
        return judge(config.instance, failed, config.pgs_delta());
    }
}

inline EvalReport aggregate(const ExperimentConfig& config, std::vector<ReplicationOutcome> outcomes)
{
    EvalReport rep;
    rep.procedure = std::string(to_string(config.procedure.kind));
    rep.k = config.instance.k();
    rep.replications = outcomes.size();
    std::uint64_t correct = 0, good = 0;
    std::vector<double> costs, samples;
    costs.reserve(outcomes.size());
    samples.reserve(outcomes.size());
    for (const auto& o : outcomes) {
        correct += o.correct;
        good += o.good;
        rep.aborted += o.aborted;
        costs.push_back(o.opportunity_cost);
        samples.push_back(static_cast<double>(o.total_samples));
    }
    rep.pcs = proportion(correct, rep.replications);
    rep.pgs = proportion(good, rep.replications);
    rep.eoc = sample_mean(costs);
    rep.mean_total_samples = sample_mean(samples);
    std::tie(rep.pcs_wilson_low, rep.pcs_wilson_high) = wilson_interval(correct, rep.replications);
    rep.outcomes = std::move(outcomes);
    return rep;
}

/// Evaluates `config` with up to `jobs` replications in flight at once.
inline EvalReport evaluate(const ExperimentConfig& config, unsigned jobs = 1)
{
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t R = config.replications;
    std::vector<ReplicationOutcome> outcomes(R);

    jobs = std::max(1u, jobs);
    if (jobs == 1 || R == 1) {
        for (std::uint64_t r = 0; r < R; ++r) outcomes[r] = run_replication(config, r);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        auto body = [&] {
            for (std::uint64_t r; (r = next.fetch_add(1)) < R;) {
                try {
                    outcomes[r] = run_replication(config, r);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = R;
                }
            }
        };
        std::vector<std::thread> threads;
        const auto n = static_cast<unsigned>(std::min<std::uint64_t>(jobs, R));
        for (unsigned t = 0; t < n; ++t) threads.emplace_back(body);
        for (auto& t : threads) t.join();
        if (error) std::rethrow_exception(error);
    }

    EvalReport rep = aggregate(config, std::move(outcomes));
    rep.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

/// Upper tail P(X >= s) for X ~ Binomial(n, 1/2).
inline double sign_test_p(std::uint64_t successes, std::uint64_t trials)
{
    if (successes == 0) return 1.0;
    if (successes > trials) return 0.0;
    const double s = static_cast<double>(successes);
    const double n = static_cast<double>(trials);
    return incomplete_beta(s, n - s + 1.0, 0.5, 0.5);
}

struct PairedReport {
    EvalReport a;
    EvalReport b;
    double pcs_difference = 0.0;       // pcs(a) - pcs(b)
    std::uint64_t a_only_correct = 0;  // discordant pairs favoring a
    std::uint64_t b_only_correct = 0;
    double pcs_p_value = 1.0;          // one-sided: a has higher PCS
    std::uint64_t a_fewer_samples = 0;
    std::uint64_t b_fewer_samples = 0;
    double samples_p_value = 1.0;      // one-sided: a uses fewer samples
    double mean_samples_difference = 0.0;
};

/// Paired comparison on shared substreams. Both configs must describe the
/// same instance, seed and replication count.
inline PairedReport compare(const ExperimentConfig& a, const ExperimentConfig& b, unsigned jobs = 1)
{
    if (!(a.instance == b.instance)) throw std::invalid_argument("compare: instances differ");
    if (a.replications != b.replications) throw std::invalid_argument("compare: replication counts differ");
    PairedReport p;
    p.a = evaluate(a, jobs);
    p.b = evaluate(b, jobs);
    for (std::uint64_t r = 0; r < a.replications; ++r) {
        const auto& x = p.a.outcomes[r];
        const auto& y = p.b.outcomes[r];
        p.a_only_correct += x.correct && !y.correct;
        p.b_only_correct += y.correct && !x.correct;
        p.a_fewer_samples += x.total_samples < y.total_samples;
        p.b_fewer_samples += y.total_samples < x.total_samples;
    }
    p.pcs_difference = p.a.pcs.value - p.b.pcs.value;
    p.pcs_p_value = sign_test_p(p.a_only_correct, p.a_only_correct + p.b_only_correct);
    p.samples_p_value = sign_test_p(p.a_fewer_samples, p.a_fewer_samples + p.b_fewer_samples);
    p.mean_samples_difference = p.a.mean_total_samples.value - p.b.mean_total_samples.value;
    return p;
}

enum class Verdict { pass, fail, inconclusive };

constexpr std::string_view to_string(Verdict v) noexcept
{
    return v == Verdict::pass ? "PASS" : v == Verdict::fail ? "FAIL" : "INCONCLUSIVE";
}

/// pcs_hat against 1 - alpha - 2 SE; a single replication has no usable SE.
inline Verdict guarantee_verdict(const EvalReport& report, double alpha)
{
    if (report.replications < 2) return Verdict::inconclusive;
    return report.pcs.value >= 1.0 - alpha - 2.0 * report.pcs.se ? Verdict::pass : Verdict::fail;
}

} // namespace rns
