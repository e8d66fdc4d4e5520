#pragma once

// Uniform entry point over every procedure: a ProcedureSpec names the
// procedure and carries its parameters; run_procedure executes one
// macro-replication of it against a sampler.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rns/core/oracle.hpp"
#include "rns/core/problem.hpp"
#include "rns/core/result.hpp"
#include "rns/fixed_budget/evi.hpp"
#include "rns/fixed_budget/kg.hpp"
#include "rns/fixed_budget/ocba.hpp"
#include "rns/fixed_precision/config.hpp"
#include "rns/fixed_precision/sequential.hpp"
#include "rns/fixed_precision/stagewise.hpp"
#include "rns/parallel/aps.hpp"
#include "rns/parallel/kt_plus.hpp"
#include "rns/parallel/pool.hpp"

namespace rns {

enum class ProcedureKind { bechhofer, rinott, paulson, kn, fhn, ocba, equal, evi, kg, aps, kt_plus };

inline constexpr std::array<std::pair<ProcedureKind, std::string_view>, 11> kProcedureNames{{
    {ProcedureKind::bechhofer, "bechhofer"},
    {ProcedureKind::rinott, "rinott"},
    {ProcedureKind::paulson, "paulson"},
    {ProcedureKind::kn, "kn"},
    {ProcedureKind::fhn, "fhn"},
    {ProcedureKind::ocba, "ocba"},
    {ProcedureKind::equal, "equal"},
    {ProcedureKind::evi, "evi"},
    {ProcedureKind::kg, "kg"},
    {ProcedureKind::aps, "aps"},
    {ProcedureKind::kt_plus, "kt_plus"},
}};

constexpr std::string_view to_string(ProcedureKind kind) noexcept
{
    for (const auto& [k, name] : kProcedureNames)
        if (k == kind) return name;
    return "unknown";
}

inline std::optional<ProcedureKind> parse_procedure(std::string_view name)
{
    for (const auto& [k, n] : kProcedureNames)
        if (n == name) return k;
    return std::nullopt;
}

constexpr bool is_fixed_budget(ProcedureKind kind) noexcept
{
    return kind == ProcedureKind::ocba || kind == ProcedureKind::equal || kind == ProcedureKind::evi ||
           kind == ProcedureKind::kg;
}

constexpr bool needs_delta(ProcedureKind kind) noexcept
{
    return !is_fixed_budget(kind) && kind != ProcedureKind::fhn;
}

constexpr bool needs_known_variance(ProcedureKind kind) noexcept
{
    return kind == ProcedureKind::bechhofer || kind == ProcedureKind::paulson || kind == ProcedureKind::kg;
}

constexpr bool is_parallel(ProcedureKind kind) noexcept
{
    return kind == ProcedureKind::aps || kind == ProcedureKind::kt_plus;
}

struct ProcedureSpec {
    ProcedureKind kind = ProcedureKind::kn;
    FixedPrecisionConfig fixed;
    BudgetConfig budget;
    std::optional<double> sigma2;  // known common variance; defaults to the instance's
    std::optional<KgPriors> priors;
    KtConfig kt;
    PoolConfig pool;
};

/// Optional per-run diagnostics.
struct RunTrace {
    std::vector<AllocationEvent> allocation;
    std::vector<PoolMessage> messages;
    std::vector<KtMatch> matches;
};

/// Common variance a known-variance procedure should assume.
inline double known_variance(const ProcedureSpec& spec, const ProblemInstance& instance)
{
    if (spec.sigma2) return *spec.sigma2;
    if (auto v = instance.common_variance()) return *v;
    throw std::invalid_argument(std::string(to_string(spec.kind)) +
                                ": needs a known common variance (procedure.sigma2) for unequal variances");
}

template <SamplingOracle O>
SelectionResult run_procedure(const ProcedureSpec& spec, Sampler<O>& sampler, double sigma2, std::uint64_t seed,
                              std::uint64_t replication, RunTrace* trace = nullptr)
{
    auto* alloc = trace ? &trace->allocation : nullptr;
    switch (spec.kind) {
    case ProcedureKind::bechhofer: return bechhofer(sampler, sigma2, spec.fixed);
    case ProcedureKind::rinott: return rinott(sampler, spec.fixed);
    case ProcedureKind::paulson: return paulson(sampler, sigma2, spec.fixed);
    case ProcedureKind::kn: return kn(sampler, spec.fixed);
    case ProcedureKind::fhn: return fhn(sampler, spec.fixed);
    case ProcedureKind::ocba: return ocba(sampler, spec.budget, alloc);
    case ProcedureKind::equal: return equal_allocation(sampler, spec.budget.budget);
    case ProcedureKind::evi: return evi_ll(sampler, spec.budget, alloc);
    case ProcedureKind::kg: return kg(sampler, spec.budget.budget, sigma2, spec.priors);
    case ProcedureKind::aps: {
        auto out = aps(sampler, spec.fixed, spec.pool, pool_delay_stream(seed, replication));
        if (trace) trace->messages = std::move(out.messages);
        return out.result;
    }
    case ProcedureKind::kt_plus: {
        auto out = kt_plus(sampler, spec.fixed, spec.kt, spec.pool, pool_delay_stream(seed, replication));
        if (trace) {
            trace->messages = std::move(out.messages);
            trace->matches = std::move(out.matches);
        }
        return out.result;
    }
    }
    throw std::logic_error("run_procedure: unknown procedure");
}

/// One macro-replication of `spec` on a Gaussian oracle for `instance`.
inline SelectionResult run_once(const ProcedureSpec& spec, const ProblemInstance& instance, std::uint64_t seed,
                                std::uint64_t replication, RunTrace* trace = nullptr)
{
    GaussianOracle oracle(instance);
    Sampler sampler(oracle, seed, replication);
    const double sigma2 = needs_known_variance(spec.kind) ? known_variance(spec, instance) : 0.0;
    return run_procedure(spec, sampler, sigma2, seed, replication, trace);
}

} // namespace rns
