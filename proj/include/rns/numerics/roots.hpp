#pragma once

#include <cmath>
#include <utility>

#include "rns/numerics/error.hpp"

namespace rns {

/// Finds a root of f in [lo, hi] given f(lo) * f(hi) <= 0. Secant steps
/// (Illinois variant) are taken while they keep shrinking the bracket;
/// otherwise the step falls back to bisection. Stops when the bracket is
/// narrower than `tol` or f vanishes exactly.
template <class F>
double find_root(F&& f, double lo, double hi, double tol = 1e-8)
{
    double f_lo = f(lo);
    double f_hi = f(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if (std::isnan(f_lo) || std::isnan(f_hi) || (f_lo > 0) == (f_hi > 0))
        throw NumericalError("find_root: root not bracketed", lo, hi, f_lo, f_hi);

    int side = 0;
    for (int it = 0; it < 400 && std::fabs(hi - lo) > tol; ++it) {
        const double width = hi - lo;
        double x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        // Fall back to bisection when the secant point hugs an endpoint.
        if (!(x > lo + 0.01 * width && x < hi - 0.01 * width)) x = 0.5 * (lo + hi);
        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0) == (f_hi > 0)) {
            hi = x;
            f_hi = fx;
            if (side == -1) f_lo *= 0.5;
            side = -1;
        } else {
            lo = x;
            f_lo = fx;
            if (side == 1) f_hi *= 0.5;
            side = 1;
        }
    }
    return 0.5 * (lo + hi);
}

/// Doubles `hi` until f changes sign over [lo, hi]. Assumes f increasing.
template <class F>
std::pair<double, double> expand_bracket_up(F&& f, double lo, double hi, int max_doublings = 60)
{
    double f_hi = f(hi);
    for (int i = 0; i < max_doublings && f_hi < 0; ++i) {
        lo = hi;
        hi *= 2.0;
        f_hi = f(hi);
    }
    if (f_hi < 0) throw NumericalError("expand_bracket_up: no sign change found", lo, hi, f(lo), f_hi);
    return {lo, hi};
}

} // namespace rns
