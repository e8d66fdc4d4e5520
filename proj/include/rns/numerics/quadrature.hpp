#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace rns {

/// Gauss-Legendre rule applied over a symmetric truncation window
/// [center - truncation_halfwidth, center + truncation_halfwidth].
struct Quadrature {
    int node_count = 200;
    double truncation_halfwidth = 8.0;

    void validate() const
    {
        if (node_count < 16) throw std::invalid_argument("Quadrature: node_count must be >= 16");
        if (!(truncation_halfwidth > 0.0)) throw std::invalid_argument("Quadrature: truncation_halfwidth must be > 0");
    }
};

struct GaussLegendreRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

namespace detail {

inline GaussLegendreRule build_gauss_legendre(int n)
{
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::fabs(dz) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

} // namespace detail

/// Nodes and weights for an n-point rule, built once per n.
inline const GaussLegendreRule& gauss_legendre(int n)
{
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<GaussLegendreRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<GaussLegendreRule>(detail::build_gauss_legendre(n));
    return *slot;
}

template <class F>
double integrate(F&& f, double lo, double hi, int node_count = 200)
{
    const auto& rule = gauss_legendre(node_count);
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double sum = 0.0;
    for (int i = 0; i < node_count; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

template <class F>
double integrate(F&& f, const Quadrature& q, double center = 0.0)
{
    q.validate();
    return integrate(std::forward<F>(f), center - q.truncation_halfwidth, center + q.truncation_halfwidth, q.node_count);
}

} // namespace rns
