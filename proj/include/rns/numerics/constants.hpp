#pragma once

// Procedure constants: Bechhofer's h, Rinott's h_R and the KN eta.

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "rns/numerics/distributions.hpp"
#include "rns/numerics/quadrature.hpp"
#include "rns/numerics/roots.hpp"

namespace rns {

namespace detail {

inline void check_selection_alpha(const char* who, int k, double alpha)
{
    if (k < 2) throw std::invalid_argument(std::string(who) + ": k must be >= 2");
    // alpha == 1 - 1/k is admitted; the constant is then exactly 0.
    if (!(alpha > 0.0 && alpha <= 1.0 - 1.0 / k + 1e-15))
        throw std::invalid_argument(std::string(who) + ": alpha must lie in (0, 1 - 1/k]");
}

constexpr double kConstantTolerance = 1e-10;
/// Quadrature noise in the defining probabilities; h = 0 is returned when
/// the probability at h = 0 already reaches 1 - alpha within this slack.
constexpr double kProbabilitySlack = 1e-10;

} // namespace detail

/// P(max_i Z_i <= h) for k-1 standard normals with common correlation 1/2,
/// written through a shared latent variable: Z_i = (Y_i - Y_0) / sqrt(2).
inline double bechhofer_probability(int k, double h, const Quadrature& q = {})
{
    const double shift = std::numbers::sqrt2 * h;
    return integrate([&](double w) { return normal_pdf(w) * std::pow(normal_cdf(w + shift), k - 1); }, q);
}

/// The (1 - alpha) quantile of the maximum of k-1 equicorrelated (rho = 1/2)
/// standard normals.
inline double bechhofer_h(int k, double alpha, const Quadrature& q = {})
{
    detail::check_selection_alpha("bechhofer_h", k, alpha);
    auto f = [&](double h) { return bechhofer_probability(k, h, q) - (1.0 - alpha); };
    if (f(0.0) >= -detail::kProbabilitySlack) return 0.0;
    auto [lo, hi] = expand_bracket_up(f, 0.0, 4.0);
    return find_root(f, lo, hi, detail::kConstantTolerance);
}

/// Precomputed quadrature for integrals of the form E[g(T)], T ~ t_dof.
/// Uses t = sinh(s) so that heavy tails (small dof) decay exponentially in s.
class StudentTExpectation {
public:
    explicit StudentTExpectation(int dof, int node_count = 400) : dof_(dof)
    {
        const DistParams params{dof};
        const double tail = -t_quantile(1e-14, params);
        const double s_max = std::asinh(std::max(tail, 8.0));
        const auto& rule = gauss_legendre(node_count);
        points_.reserve(node_count);
        weights_.reserve(node_count);
        for (int i = 0; i < node_count; ++i) {
            const double s = s_max * rule.nodes[i];
            const double t = std::sinh(s);
            points_.push_back(t);
            weights_.push_back(s_max * rule.weights[i] * t_pdf(t, params) * std::cosh(s));
        }
    }

    template <class G>
    double operator()(G&& g) const
    {
        double sum = 0.0;
        for (std::size_t i = 0; i < points_.size(); ++i) sum += weights_[i] * g(points_[i]);
        return sum;
    }

    int dof() const noexcept { return dof_; }

private:
    int dof_;
    std::vector<double> points_;
    std::vector<double> weights_;
};

/// Left-hand side of Rinott's defining equation:
/// integral of Psi^{k-1}(t + h) psi(t) dt with Psi, psi the t_{n0-1} cdf/pdf.
inline double rinott_probability(int k, int n0, double h)
{
    const StudentTExpectation expect(n0 - 1);
    const DistParams params{n0 - 1};
    return expect([&](double t) { return std::pow(t_cdf(t + h, params), k - 1); });
}

namespace detail {

inline double solve_rinott_h(int k, int n0, double alpha)
{
    const StudentTExpectation expect(n0 - 1);
    const DistParams params{n0 - 1};
    auto f = [&](double h) {
        return expect([&](double t) { return std::pow(t_cdf(t + h, params), k - 1); }) - (1.0 - alpha);
    };
    if (f(0.0) >= -detail::kProbabilitySlack) return 0.0;
    auto [lo, hi] = expand_bracket_up(f, 0.0, 4.0);
    return find_root(f, lo, hi, kConstantTolerance);
}

} // namespace detail

/// Rinott's two-stage constant h_R for k alternatives, first-stage size n0.
/// Results are memoized by (k, n0, alpha); safe for concurrent callers.
inline double rinott_h(int k, int n0, double alpha)
{
    detail::check_selection_alpha("rinott_h", k, alpha);
    if (n0 < 2) throw std::invalid_argument("rinott_h: n0 must be >= 2");

    static std::mutex mutex;
    static std::map<std::tuple<int, int, double>, double> cache;
    const auto key = std::make_tuple(k, n0, alpha);
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    const double h = detail::solve_rinott_h(k, n0, alpha);
    std::lock_guard lock(mutex);
    cache.emplace(key, h);
    return h;
}

/// eta = ((2 alpha / (k - 1))^{-2/(n0-1)} - 1) / 2, the KN screening constant.
inline double kn_eta(int k, int n0, double alpha)
{
    if (k < 2) throw std::invalid_argument("kn_eta: k must be >= 2");
    if (n0 < 2) throw std::invalid_argument("kn_eta: n0 must be >= 2");
    if (!(alpha > 0.0 && 2.0 * alpha < k - 1.0)) throw std::invalid_argument("kn_eta: alpha must lie in (0, (k-1)/2)");
    return 0.5 * std::expm1(-2.0 / (n0 - 1.0) * std::log(2.0 * alpha / (k - 1.0)));
}

/// h^2 = 2 eta (n0 - 1).
inline double kn_h2(int k, int n0, double alpha) { return 2.0 * kn_eta(k, n0, alpha) * (n0 - 1.0); }

} // namespace rns
