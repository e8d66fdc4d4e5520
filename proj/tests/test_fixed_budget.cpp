#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "rns/core/oracle.hpp"
#include "rns/fixed_budget/allocation.hpp"
#include "rns/fixed_budget/evi.hpp"
#include "rns/fixed_budget/kg.hpp"
#include "rns/fixed_budget/ocba.hpp"
#include "rns/harness/instances.hpp"
#include "support/oracles.hpp"

using Catch::Approx;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

std::uint64_t sum(const std::vector<std::uint64_t>& v) { return std::accumulate(v.begin(), v.end(), std::uint64_t{0}); }

rns::BudgetConfig budget(std::uint64_t n, std::uint64_t tau, int n0)
{
    rns::BudgetConfig b;
    b.budget = n;
    b.tau = tau;
    b.n0 = n0;
    return b;
}

} // namespace

TEST_CASE("largest remainder rounding")
{
    const std::vector<double> a{1.0, 1.0, 1.0};
    CHECK(rns::largest_remainder(a, 10) == std::vector<std::uint64_t>{4, 3, 3});
    const std::vector<double> b{0.1, 0.6, 0.3};
    CHECK(rns::largest_remainder(b, 10) == std::vector<std::uint64_t>{1, 6, 3});
    const std::vector<double> c{0.15, 0.15, 0.7};
    CHECK(rns::largest_remainder(c, 10) == std::vector<std::uint64_t>{2, 1, 7});
    const std::vector<double> z{0.0, 0.0};
    CHECK(rns::largest_remainder(z, 5) == std::vector<std::uint64_t>{5, 0});

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> s(1 + trial % 9);
        for (double& x : s) x = u(rng);
        const std::uint64_t total = trial * 7 % 1000;
        const auto r = rns::largest_remainder(s, total);
        CHECK(sum(r) == total);
        const double ss = sum(s);
        for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::fabs(r[i] - s[i] * total / ss) < 1.0);
    }
}

TEST_CASE("glynn-juneja allocation on the four-level instance")
{
    const std::vector<double> m{0.0, 1.0, 2.0, 3.0}, v(4, 1.0);
    const auto n = rns::glynn_juneja_allocation(m, v, 1000.0);
    // Unnormalized: 1/9, 1/4, 1 and sqrt(1/81 + 1/16 + 1).
    const double best = std::sqrt(1.0 / 81.0 + 1.0 / 16.0 + 1.0);
    CHECK(best == Approx(1.0368).margin(1e-4));
    const double total = 1.0 / 9.0 + 0.25 + 1.0 + best;
    CHECK(n[0] == Approx(1000.0 / 9.0 / total).epsilon(1e-12));
    CHECK(n[1] == Approx(250.0 / total).epsilon(1e-12));
    CHECK(n[2] == Approx(1000.0 / total).epsilon(1e-12));
    CHECK(n[3] == Approx(1000.0 * best / total).epsilon(1e-12));
    CHECK(sum(n) == Approx(1000.0).epsilon(1e-14));
}

TEST_CASE("glynn-juneja allocation satisfies both optimality relations")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.1, 4.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 2 + trial % 8;
        std::vector<double> m(k), v(k);
        for (std::size_t i = 0; i < k; ++i) {
            m[i] = static_cast<double>(i) * 0.5 + 0.1 * u(rng);
            v[i] = u(rng);
        }
        const auto n = rns::glynn_juneja_allocation(m, v, 500.0);
        const std::size_t b = k - 1;
        double sq = 0.0;
        for (std::size_t i = 0; i + 1 < k; ++i) {
            sq += n[i] * n[i] / v[i];
            const double gi = (m[b] - m[i]) * (m[b] - m[i]);
            const double g0 = (m[b] - m[0]) * (m[b] - m[0]);
            CHECK(std::fabs(n[i] / n[0] - (v[i] / gi) / (v[0] / g0)) <= 1e-8 * (v[i] / gi) / (v[0] / g0));
        }
        CHECK(std::fabs(n[b] - std::sqrt(v[b] * sq)) <= 1e-8 * n[b]);
    }
}

TEST_CASE("glynn-juneja allocation symmetry, homogeneity and errors")
{
    const std::vector<double> m2{0.0, 1.0}, v2{2.0, 2.0};
    const auto two = rns::glynn_juneja_allocation(m2, v2, 100.0);
    CHECK(two[0] == Approx(50.0));
    CHECK(two[1] == Approx(50.0));

    const std::vector<double> m{0.0, 0.7, 1.5}, v{1.0, 3.0, 2.0}, v2x{2.0, 6.0, 4.0};
    const auto a = rns::glynn_juneja_allocation(m, v, 1.0), b = rns::glynn_juneja_allocation(m, v2x, 1.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(a[i] == Approx(b[i]).epsilon(1e-14));

    const std::vector<double> tied{1.0, 1.0, 0.0}, ones(3, 1.0);
    CHECK_THROWS_AS(rns::glynn_juneja_allocation(tied, ones, 10.0), std::invalid_argument);
}

TEST_CASE("ocba targets")
{
    // Two alternatives: proportional to standard deviations.
    const std::vector<double> m{0.0, 1.0}, v{1.0, 4.0};
    const auto t = rns::ocba_targets(m, v, 300.0);
    CHECK(t[0] == Approx(100.0));
    CHECK(t[1] == Approx(200.0));
    CHECK(t[0] / 1.0 == Approx(t[1] / 2.0));

    // Frozen true estimates reproduce the static optimum.
    const std::vector<double> m4{0.0, 1.0, 2.0, 3.0}, v4(4, 1.0);
    const auto o = rns::ocba_targets(m4, v4, 1e6);
    const auto g = rns::glynn_juneja_allocation(m4, v4, 1e6);
    for (std::size_t i = 0; i < 4; ++i) CHECK(o[i] == Approx(g[i]).epsilon(0.01));
    const auto r = rns::largest_remainder(o, 1000000);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::fabs(static_cast<double>(r[i]) - g[i]) <= 1.0);

    // A tie with the sample best puts the whole stage on the lowest tied index.
    const std::vector<double> tie{0.0, 2.0, 1.0, 2.0}, vt(4, 1.0);
    CHECK(rns::ocba_targets(tie, vt, 40.0) == std::vector<double>{0.0, 40.0, 0.0, 0.0});

    // Zero variance is floored, never divided by.
    const std::vector<double> zero{0.0, 0.0};
    for (double x : rns::ocba_targets(m, zero, 10.0)) CHECK(std::isfinite(x));
}

TEST_CASE("ocba stage targets are nonnegative and sum to the next budget")
{
    const rns::GaussianOracle g(rns::monotone_config(5, 0.5, 1.0));
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        rns::Sampler s(g, 8, rep);
        std::vector<rns::AllocationEvent> trace;
        const auto r = rns::ocba(s, budget(500, 10, 10), &trace);
        REQUIRE(trace.size() % 5 == 0);
        std::uint64_t b = 50;
        for (std::size_t at = 0; at < trace.size(); at += 5) {
            double t = 0.0;
            std::uint64_t granted = 0;
            for (std::size_t i = 0; i < 5; ++i) {
                CHECK(trace[at + i].target >= 0.0);
                CHECK(trace[at + i].stage == at / 5 + 1);
                t += trace[at + i].target;
                granted += trace[at + i].granted;
            }
            b += 10;
            CHECK(t == Approx(static_cast<double>(b)).epsilon(1e-12));
            CHECK(granted == 10);
        }
        CHECK(r.total_samples == 500);
        for (auto n : r.per_alt_samples) CHECK(n >= 10);
    }
}

TEST_CASE("staged procedures overshoot by less than one stage")
{
    const rns::GaussianOracle g(rns::slippage_config(4, 0.5, 1.0));
    for (std::uint64_t n : {40, 41, 47, 49, 50, 333}) {
        rns::Sampler a(g, 2, n), b(g, 2, n);
        const auto o = rns::ocba(a, budget(n, 10, 10));
        const auto e = rns::evi_ll(b, budget(n, 10, 10));
        for (const auto& r : {o, e}) {
            CHECK(r.total_samples >= n);
            CHECK(r.total_samples <= n + 9);
            CHECK((r.total_samples - 40) % 10 == 0);
            CHECK(r.total_samples == sum(r.per_alt_samples));
        }
    }
}

TEST_CASE("budget config validation")
{
    const rns::ConstantOracle c({0.0, 1.0, 2.0});
    rns::Sampler s(c, 1, 0);
    CHECK_THROWS_AS(rns::ocba(s, budget(100, 10, 4)), std::invalid_argument);
    CHECK_THROWS_AS(rns::ocba(s, budget(20, 10, 10)), std::invalid_argument);
    CHECK_THROWS_AS(rns::ocba(s, budget(100, 0, 10)), std::invalid_argument);
    CHECK_THROWS_AS(rns::evi_ll(s, budget(100, 10, 2)), std::invalid_argument);
    CHECK_NOTHROW(rns::evi_ll(s, budget(100, 10, 3)));
    CHECK_THROWS_AS(rns::equal_allocation(s, 2), std::invalid_argument);
}

TEST_CASE("equal allocation spreads the remainder over the lowest indices")
{
    const rns::ConstantOracle c({0.0, 2.0, 1.0});
    rns::Sampler s(c, 1, 0);
    const auto r = rns::equal_allocation(s, 11);
    CHECK(r.per_alt_samples == std::vector<std::uint64_t>{4, 4, 3});
    CHECK(r.selected == 1);
}

TEST_CASE("evi stage matches a hand trace")
{
    // Alternative 0 drops out on the first pass; the rest split 40 samples.
    const std::vector<double> m{0.0, 0.5, 1.0}, v{1.0, 2.0, 1.5};
    const std::vector<std::uint64_t> n{10, 12, 8};
    const auto s = rns::evi_stage(m, v, n, 10);
    CHECK(s.best == 2);
    CHECK(s.passes == 2);
    CHECK(s.active == std::vector<bool>{false, true, true});
    CHECK(s.eta[1] == Approx(0.52818333493975883019).epsilon(1e-12));
    CHECK(s.eta[2] == Approx(0.52818333493975883019).epsilon(1e-12));
    CHECK(s.target[0] == 10.0);
    CHECK(s.target[1] == Approx(16.076951545867362388).epsilon(1e-12));
    CHECK(s.target[2] == Approx(13.923048454132637612).epsilon(1e-12));
    CHECK(rns::evi_grants(s, n, 10) == std::vector<std::uint64_t>{0, 4, 6});
}

TEST_CASE("evi stage with the sample best frozen")
{
    const std::vector<double> m{0.0, 0.9, 1.0, 0.2}, v{1.0, 1.0, 1.0, 3.0};
    const std::vector<std::uint64_t> n{10, 10, 40, 10};
    const auto s = rns::evi_stage(m, v, n, 20);
    CHECK(s.best == 2);
    CHECK(s.active == std::vector<bool>{false, true, false, true});
    CHECK(s.eta[1] == Approx(1.3207718034610240634).epsilon(1e-12));
    CHECK(s.eta[3] == Approx(0.34035480200034531904).epsilon(1e-12));
    CHECK(s.target[1] == Approx(21.285080321957912587).epsilon(1e-12));
    CHECK(s.target[2] == 40.0);
    CHECK(s.target[3] == Approx(18.714919678042087413).epsilon(1e-12));
    // With the best frozen, lambda is just n_i / sigma_i^2.
    CHECK(s.lambda[1] == Approx(10.0));
    CHECK(s.lambda[3] == Approx(10.0 / 3.0));
}

TEST_CASE("evi stage properties")
{
    // Symmetric two-alternative case splits the stage evenly.
    const std::vector<double> m{0.0, 1e-9}, v{1.0, 1.0};
    const std::vector<std::uint64_t> n{10, 10};
    const auto s = rns::evi_stage(m, v, n, 10);
    CHECK(s.target[0] == Approx(s.target[1]).epsilon(1e-6));
    CHECK(rns::evi_grants(s, n, 10) == std::vector<std::uint64_t>{5, 5});

    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 2.0), pv(0.2, 3.0);
    std::uniform_int_distribution<std::uint64_t> cnt(3, 60);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t k = 2 + trial % 7;
        std::vector<double> mm(k), vv(k);
        std::vector<std::uint64_t> nn(k);
        for (std::size_t i = 0; i < k; ++i) {
            mm[i] = u(rng);
            vv[i] = pv(rng);
            nn[i] = cnt(rng);
        }
        const auto st = rns::evi_stage(mm, vv, nn, 10);
        CHECK(st.passes <= static_cast<int>(k));
        if (st.active[st.best] && !st.fallback_to_best) {
            double others = 0.0;
            for (std::size_t i = 0; i < k; ++i)
                if (i != st.best && st.active[i]) others += st.eta[i];
            CHECK(st.eta[st.best] == Approx(others).epsilon(1e-12));
        }
        for (std::size_t i = 0; i < k; ++i) CHECK(st.target[i] >= static_cast<double>(nn[i]) - 1e-9);
        CHECK(sum(rns::evi_grants(st, nn, 10)) == 10);
    }

    const std::vector<std::uint64_t> small{2, 10};
    CHECK_THROWS_AS(rns::evi_stage(m, v, small, 10), std::invalid_argument);
}

TEST_CASE("kg primitives")
{
    CHECK(rns::kg_factor(0.0) == Approx(0.39894).margin(1e-5));
    CHECK(rns::kg_factor(0.0) == Approx(oracle::normal_density(0.0)).epsilon(1e-15));
    for (double z = -8.0; z <= 0.0; z += 0.5) CHECK(rns::kg_factor(z) > 0.0);

    rns::PosteriorState s{{0.0}, {1.0}, 1.0};
    rns::kg_update(s, 0, 2.0);
    CHECK(s.precision[0] == 2.0);
    CHECK(s.mean[0] == 1.0);

    CHECK(rns::kg_sigma_tilde(1.0, 1.0) == Approx(std::sqrt(1.0 - 0.5)));
    CHECK(rns::kg_sigma_tilde(std::numeric_limits<double>::infinity(), 1.0) == 0.0);
}

TEST_CASE("kg values for tied and uninformative beliefs")
{
    const rns::PosteriorState tied{{0.3, 0.3}, {2.0, 2.0}, 1.0};
    const auto v = rns::kg_values(tied);
    CHECK(v[0] == v[1]);
    CHECK(rns::argmax(v) == 0);

    const auto post = rns::make_posterior(3, 1.0, rns::KgPriors{{0.0, 1.0, 0.5}, {0.0, 1.0, 1.0}});
    CHECK(rns::kg_values(post)[0] == 0.0);
    CHECK_THROWS_AS(rns::make_posterior(2, 1.0, rns::KgPriors{{0.0, 1.0}, {-1.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(rns::make_posterior(2, 0.0, std::nullopt), std::invalid_argument);

    // All beliefs known exactly: every value is zero and index 0 is sampled.
    const rns::ConstantOracle c({0.0, 1.0});
    rns::Sampler s(c, 1, 0);
    const auto r = rns::kg(s, 5, 1.0, rns::KgPriors{{0.0, 1.0}, {0.0, 0.0}});
    CHECK(r.per_alt_samples == std::vector<std::uint64_t>{5, 0});
    CHECK(r.selected == 1);
}

TEST_CASE("kg posterior evolution")
{
    const rns::GaussianOracle g(rns::monotone_config(5, 0.5, 1.0));
    for (std::uint64_t rep = 0; rep < 10; ++rep) {
        rns::Sampler s(g, 4, rep);
        rns::PosteriorState prev = rns::make_posterior(5, 1.0, std::nullopt);
        std::uint64_t steps = 0;
        const auto r = rns::kg(s, 200, 1.0, std::nullopt,
                               [&](std::uint64_t t, std::size_t z, const rns::PosteriorState& now) {
                                   CHECK(t == ++steps);
                                   for (std::size_t i = 0; i < 5; ++i) {
                                       CHECK(now.precision[i] >= prev.precision[i]);
                                       if (i != z) {
                                           CHECK(now.mean[i] == prev.mean[i]);
                                           CHECK(now.precision[i] == prev.precision[i]);
                                       }
                                   }
                                   CHECK(now.precision[z] == prev.precision[z] + 1.0);
                                   prev = now;
                               });
        CHECK(steps == 200);
        CHECK(r.total_samples == 200);
        CHECK(r.selected == rns::argmax(prev.mean));
    }
}

TEST_CASE("identical priors sample the lowest index first")
{
    const rns::ConstantOracle c({0.0, 0.0, 0.0});
    rns::Sampler s(c, 1, 0);
    std::size_t first = 99;
    rns::kg(s, 1, 1.0, rns::KgPriors{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}},
            [&](std::uint64_t, std::size_t z, const rns::PosteriorState&) { first = z; });
    CHECK(first == 0);
}

TEST_CASE("fixed-budget procedures are reproducible")
{
    const rns::GaussianOracle g(rns::slippage_config(4, 0.5, 1.0));
    rns::Sampler a(g, 6, 1), b(g, 6, 1);
    CHECK(rns::ocba(a, budget(300, 10, 10)) == rns::ocba(b, budget(300, 10, 10)));
    rns::Sampler c(g, 6, 1), d(g, 6, 1);
    CHECK(rns::evi_ll(c, budget(300, 10, 10)) == rns::evi_ll(d, budget(300, 10, 10)));
    rns::Sampler e(g, 6, 1), f(g, 6, 1);
    CHECK(rns::kg(e, 300, 1.0) == rns::kg(f, 300, 1.0));
}
