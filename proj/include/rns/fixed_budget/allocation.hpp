#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace rns {

/// Rounds nonnegative shares to integers summing to `total`. Shares are
/// rescaled to `total` first; leftover units go to the largest fractional
/// parts, ties to the lowest index.
inline std::vector<std::uint64_t> largest_remainder(std::span<const double> shares, std::uint64_t total)
{
    const std::size_t k = shares.size();
    std::vector<std::uint64_t> out(k, 0);
    if (k == 0 || total == 0) return out;
    const double sum = std::accumulate(shares.begin(), shares.end(), 0.0);
    if (!(sum > 0.0)) {
        out[0] = total;
        return out;
    }
    std::vector<double> frac(k);
    std::uint64_t assigned = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const double exact = std::max(0.0, shares[i]) * static_cast<double>(total) / sum;
        const double fl = std::floor(exact);
        out[i] = static_cast<std::uint64_t>(fl);
        frac[i] = exact - fl;
        assigned += out[i];
    }
    // Floating error can push the floors one unit over in pathological cases.
    while (assigned > total) {
        const auto it = std::max_element(out.begin(), out.end());
        --*it;
        --assigned;
    }
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    for (std::size_t r = 0; assigned < total; r = (r + 1) % k) {
        ++out[order[r]];
        ++assigned;
    }
    return out;
}

/// Large-deviations optimal static allocation for selecting the largest
/// mean: non-best shares proportional to sigma^2 / gap^2, and the best gets
/// sigma_best * sqrt(sum (n_j / sigma_j)^2). Scaled to sum to `total`.
inline std::vector<double> glynn_juneja_allocation(std::span<const double> means, std::span<const double> variances,
                                                   double total)
{
    const std::size_t k = means.size();
    if (k < 2 || variances.size() != k) throw std::invalid_argument("glynn_juneja_allocation: bad dimensions");
    const std::size_t best = static_cast<std::size_t>(std::max_element(means.begin(), means.end()) - means.begin());
    std::vector<double> n(k, 0.0);
    double sq = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (i == best) continue;
        const double gap = means[best] - means[i];
        if (!(gap > 0.0)) throw std::invalid_argument("glynn_juneja_allocation: best mean is not unique");
        if (!(variances[i] > 0.0)) throw std::invalid_argument("glynn_juneja_allocation: variances must be positive");
        n[i] = variances[i] / (gap * gap);
        sq += n[i] * n[i] / variances[i];
    }
    n[best] = std::sqrt(variances[best]) * std::sqrt(sq);
    const double sum = std::accumulate(n.begin(), n.end(), 0.0);
    for (double& x : n) x *= total / sum;
    return n;
}

} // namespace rns
