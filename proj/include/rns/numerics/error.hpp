#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace rns {

/// Raised when a numerical routine cannot produce a result, e.g. a root
/// that is not bracketed. Carries the bracket for diagnostics.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double lo, double hi, double f_lo, double f_hi)
        : std::runtime_error(format(what, lo, hi, f_lo, f_hi)), lo_(lo), hi_(hi), f_lo_(f_lo), f_hi_(f_hi)
    {
    }

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double f_lo() const noexcept { return f_lo_; }
    double f_hi() const noexcept { return f_hi_; }

private:
    static std::string format(const std::string& what, double lo, double hi, double f_lo, double f_hi)
    {
        std::ostringstream os;
        os.precision(17);
        os << what << " [bracket lo=" << lo << " f(lo)=" << f_lo << ", hi=" << hi << " f(hi)=" << f_hi << "]";
        return os.str();
    }

    double lo_, hi_, f_lo_, f_hi_;
};

} // namespace rns
