#pragma once

// Standard normal and Student-t distribution functions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rns {

/// Degrees of freedom of a Student-t distribution.
struct DistParams {
    int dof = 1;
};

inline double normal_pdf(double x) noexcept
{
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double x) noexcept
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

namespace detail {

// Acklam's rational approximation (relative error ~1.2e-9), used as the
// starting point for a Halley refinement against erfc.
inline double normal_quantile_guess(double p) noexcept
{
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double incbeta_cf(double a, double b, double x)
{
    constexpr int max_iter = 2000;
    constexpr double eps = 1e-16;
    constexpr double tiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

} // namespace detail

/// Regularized incomplete beta I_x(a, b). `y` must equal 1 - x; passing it
/// separately avoids cancellation when x is close to 1.
inline double incomplete_beta(double a, double b, double x, double y)
{
    if (x <= 0.0) return 0.0;
    if (y <= 0.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log(y);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::incbeta_cf(a, b, x) / a;
    return 1.0 - front * detail::incbeta_cf(b, a, y) / b;
}

inline double normal_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must lie in (0, 1)");
    double x = detail::normal_quantile_guess(p);
    // One Halley step brings the error to ~1e-15.
    const double e = (p < 0.5) ? normal_cdf(x) - p : -(0.5 * std::erfc(x / std::numbers::sqrt2) - (1.0 - p));
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

namespace detail {

inline void check_dof(int dof)
{
    if (dof < 1) throw std::domain_error("student-t: degrees of freedom must be >= 1");
}

} // namespace detail

inline double t_pdf(double x, DistParams params)
{
    detail::check_dof(params.dof);
    const double nu = params.dof;
    const double log_norm =
        std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * std::numbers::pi);
    return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

inline double t_cdf(double x, DistParams params)
{
    detail::check_dof(params.dof);
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    const double nu = params.dof;
    const double denom = nu + x * x;
    // Tail mass P(T < -|x|) = I_{nu/(nu+x^2)}(nu/2, 1/2) / 2.
    const double tail = 0.5 * incomplete_beta(0.5 * nu, 0.5, nu / denom, x * x / denom);
    return x > 0 ? 1.0 - tail : tail;
}

/// Upper-tail-accurate complement, P(T > x).
inline double t_sf(double x, DistParams params) { return t_cdf(-x, params); }

inline double t_quantile(double p, DistParams params)
{
    detail::check_dof(params.dof);
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("t_quantile: p must lie in (0, 1)");
    if (p == 0.5) return 0.0;
    const double q = std::min(p, 1.0 - p);
    const double sign = p < 0.5 ? 1.0 : -1.0;

    double x;
    if (params.dof == 1) {
        x = std::tan(std::numbers::pi * (q - 0.5));
    } else if (params.dof == 2) {
        x = (2.0 * q - 1.0) / std::sqrt(2.0 * q * (1.0 - q));
    } else {
        // The lower half of the cdf is convex, so Newton from the right of the
        // root converges monotonically. Start at a point no larger than the root.
        x = std::min(normal_quantile(q), -1e-3);
        double hi = 0.0;
        for (int it = 0; it < 200; ++it) {
            const double f = t_cdf(x, params) - q;
            if (f > 0) hi = x;
            const double step = f / t_pdf(x, params);
            double next = x - step;
            if (!(next < hi)) next = 0.5 * (x + hi);
            if (std::fabs(next - x) <= 1e-15 * std::max(1.0, std::fabs(x))) {
                x = next;
                break;
            }
            x = next;
        }
    }
    return sign * x;
}

} // namespace rns
