#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rns {

/// Ground truth for k alternatives: means, variances and an optional
/// indifference-zone parameter. Used by synthetic oracles and by the harness
/// to judge selections.
class ProblemInstance {
public:
    ProblemInstance(std::vector<double> means, std::vector<double> variances,
                    std::optional<double> iz_delta = std::nullopt)
        : means_(std::move(means)), variances_(std::move(variances)), iz_delta_(iz_delta)
    {
        if (means_.size() < 2) throw std::invalid_argument("ProblemInstance: need at least 2 alternatives");
        if (variances_.size() != means_.size())
            throw std::invalid_argument("ProblemInstance: means and variances differ in length");
        for (double v : variances_)
            if (!(v > 0.0)) throw std::invalid_argument("ProblemInstance: variances must be positive");
        if (iz_delta_ && !(*iz_delta_ > 0.0)) throw std::invalid_argument("ProblemInstance: iz_delta must be positive");
    }

    std::size_t k() const noexcept { return means_.size(); }
    std::span<const double> means() const noexcept { return means_; }
    std::span<const double> variances() const noexcept { return variances_; }
    double mean(std::size_t i) const { return means_.at(i); }
    double variance(std::size_t i) const { return variances_.at(i); }
    std::optional<double> iz_delta() const noexcept { return iz_delta_; }

    double best_mean() const { return *std::max_element(means_.begin(), means_.end()); }

    /// Lowest-index maximizer.
    std::size_t best_index() const
    {
        return static_cast<std::size_t>(std::max_element(means_.begin(), means_.end()) - means_.begin());
    }

    /// Any tied maximizer counts as a correct selection.
    bool is_best(std::size_t i) const { return means_.at(i) == best_mean(); }

    /// Good selection: mu_i > mu_[k] - delta (strict).
    bool is_good(std::size_t i, double delta) const { return means_.at(i) > best_mean() - delta; }

    /// Common variance if all alternatives share one.
    std::optional<double> common_variance() const
    {
        if (std::all_of(variances_.begin(), variances_.end(), [&](double v) { return v == variances_.front(); }))
            return variances_.front();
        return std::nullopt;
    }

    bool operator==(const ProblemInstance&) const = default;

private:
    std::vector<double> means_;
    std::vector<double> variances_;
    std::optional<double> iz_delta_;
};

} // namespace rns
