#pragma once

// Knowledge-gradient sampling for independent normal beliefs with a common,
// known sampling variance.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rns/core/oracle.hpp"
#include "rns/core/result.hpp"
#include "rns/numerics/distributions.hpp"

namespace rns {

/// Per-alternative normal belief (mean, precision) plus the sampling
/// precision beta = 1 / sigma^2.
struct PosteriorState {
    std::vector<double> mean;
    std::vector<double> precision;
    double sampling_precision = 1.0;

    bool operator==(const PosteriorState&) const = default;
};

struct KgPriors {
    std::vector<double> means;
    std::vector<double> variances;
};

constexpr double kDiffusePriorPrecision = 1e-6;

inline PosteriorState make_posterior(std::size_t k, double sigma2, const std::optional<KgPriors>& priors)
{
    if (!(sigma2 > 0.0)) throw std::invalid_argument("kg: sampling variance must be positive");
    PosteriorState s;
    s.sampling_precision = 1.0 / sigma2;
    if (!priors) {
        s.mean.assign(k, 0.0);
        s.precision.assign(k, kDiffusePriorPrecision);
        return s;
    }
    if (priors->means.size() != k || priors->variances.size() != k)
        throw std::invalid_argument("kg: priors must have one entry per alternative");
    s.mean = priors->means;
    s.precision.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (priors->variances[i] < 0.0) throw std::invalid_argument("kg: prior variances must be nonnegative");
        s.precision[i] = priors->variances[i] == 0.0 ? std::numeric_limits<double>::infinity()
                                                     : 1.0 / priors->variances[i];
    }
    return s;
}

/// zeta Phi(zeta) + phi(zeta).
inline double kg_factor(double zeta) { return zeta * normal_cdf(zeta) + normal_pdf(zeta); }

/// Standard deviation of the change in the posterior mean from one more
/// sample: sqrt(1/beta_i - 1/(beta_i + beta)).
inline double kg_sigma_tilde(double precision, double sampling_precision)
{
    if (std::isinf(precision)) return 0.0;
    return std::sqrt(sampling_precision / (precision * (precision + sampling_precision)));
}

inline std::vector<double> kg_values(const PosteriorState& s)
{
    const std::size_t k = s.mean.size();
    std::vector<double> values(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const double st = kg_sigma_tilde(s.precision[i], s.sampling_precision);
        if (!(st > 0.0)) continue;
        double other = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j)
            if (j != i) other = std::max(other, s.mean[j]);
        const double zeta = -std::fabs((s.mean[i] - other) / st);
        values[i] = st * kg_factor(zeta);
    }
    return values;
}

inline void kg_update(PosteriorState& s, std::size_t i, double y)
{
    if (std::isinf(s.precision[i])) return;
    const double next = s.precision[i] + s.sampling_precision;
    s.mean[i] = (s.precision[i] * s.mean[i] + s.sampling_precision * y) / next;
    s.precision[i] = next;
}

/// Called after each step with (step t, sampled alternative, posterior after the update).
using KgObserver = std::function<void(std::uint64_t, std::size_t, const PosteriorState&)>;

template <SampleSource S>
SelectionResult kg(S& source, std::uint64_t budget, double sigma2, const std::optional<KgPriors>& priors = std::nullopt,
                   const KgObserver& observer = {})
{
    const std::size_t k = source.size();
    if (k < 2) throw std::invalid_argument("kg: need at least 2 alternatives");
    if (budget < 1) throw std::invalid_argument("kg: budget must be >= 1");
    PosteriorState state = make_posterior(k, sigma2, priors);
    std::vector<std::uint64_t> counts(k, 0);
    for (std::uint64_t t = 0; t < budget; ++t) {
        const auto values = kg_values(state);
        const std::size_t z = argmax(values);
        kg_update(state, z, source.sample(z));
        ++counts[z];
        if (observer) observer(t + 1, z, state);
    }
    return make_result(argmax(state.mean), std::move(counts));
}

} // namespace rns
