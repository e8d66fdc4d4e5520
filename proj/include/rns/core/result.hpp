#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string_view>
#include <vector>

namespace rns {

enum class Termination { decision, budget_cap };

constexpr std::string_view to_string(Termination t) noexcept
{
    return t == Termination::decision ? "decision" : "budget_cap";
}

struct Elimination {
    std::uint64_t stage = 0;
    std::size_t index = 0;

    bool operator==(const Elimination&) const = default;
};

/// Outcome of one procedure run. Indices are 0-based.
struct SelectionResult {
    std::size_t selected = 0;
    std::vector<std::uint64_t> per_alt_samples;
    std::uint64_t total_samples = 0;
    std::vector<Elimination> elimination_log;
    Termination terminated_by = Termination::decision;

    bool operator==(const SelectionResult&) const = default;
};

inline SelectionResult make_result(std::size_t selected, std::vector<std::uint64_t> per_alt,
                                   std::vector<Elimination> log = {},
                                   Termination termination = Termination::decision)
{
    SelectionResult r;
    r.selected = selected;
    r.total_samples = std::accumulate(per_alt.begin(), per_alt.end(), std::uint64_t{0});
    r.per_alt_samples = std::move(per_alt);
    r.elimination_log = std::move(log);
    r.terminated_by = termination;
    return r;
}

/// Argmax with ties broken to the lowest index.
inline std::size_t argmax(std::span<const double> values)
{
    return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

} // namespace rns
