#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "rns/numerics/constants.hpp"
#include "rns/numerics/distributions.hpp"
#include "rns/numerics/error.hpp"
#include "rns/numerics/quadrature.hpp"
#include "rns/numerics/roots.hpp"
#include "support/oracles.hpp"

using Catch::Approx;
using rns::DistParams;

// Reference values below were produced with mpmath at 30 significant digits,
// evaluated at the exact double nearest each decimal argument.

TEST_CASE("normal cdf and quantile hit reference values")
{
    CHECK(rns::normal_cdf(0.0) == 0.5);
    CHECK(rns::normal_quantile(0.5) == 0.0);
    CHECK(rns::normal_cdf(-5.0) == Approx(2.86651571879193911673752332875e-7).epsilon(1e-12));
    CHECK(rns::normal_cdf(-1.5) == Approx(0.0668072012688580660044940409799).epsilon(1e-13));
    CHECK(rns::normal_cdf(0.7) == Approx(0.758036347776926971383789317686).epsilon(1e-14));
    CHECK(rns::normal_cdf(3.0) == Approx(0.998650101968369905473348185232).epsilon(1e-14));

    CHECK(rns::normal_quantile(1e-10) == Approx(-6.36134090240405620469535501582).epsilon(1e-12));
    CHECK(rns::normal_quantile(0.025) == Approx(-1.95996398454005423552459443052).epsilon(1e-13));
    CHECK(rns::normal_quantile(0.975) == Approx(1.95996398454005423552459443052).epsilon(1e-13));
    CHECK(rns::normal_quantile(0.999999) == Approx(4.75342430881708776568809703068).epsilon(1e-12));
}

TEST_CASE("normal quantile at 0.95 agrees with bisection on integrated density")
{
    const auto cdf = [](double x) { return 0.5 + oracle::simpson(oracle::normal_density, 0.0, x, 2000); };
    const double q = oracle::bisect([&](double x) { return cdf(x) - 0.95; }, 0.0, 4.0, 80);
    CHECK(rns::normal_quantile(0.95) == Approx(q).margin(1e-4));
    CHECK(rns::normal_quantile(0.95) == Approx(1.6449).margin(1e-4));
}

TEST_CASE("normal quantile rejects the endpoints")
{
    CHECK_THROWS_AS(rns::normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(rns::normal_quantile(1.0), std::domain_error);
    CHECK_THROWS_AS(rns::normal_quantile(-0.1), std::domain_error);
    CHECK_THROWS_AS(rns::normal_quantile(std::nan("")), std::domain_error);
}

TEST_CASE("student t cdf hits reference values")
{
    struct Row {
        int nu;
        double x, p;
    };
    const Row rows[] = {
        {1, -2.5, 0.121118941590843398723582589372}, {1, 0.3, 0.592773579077742340315449067959},
        {1, 1.7, 0.830746972669667332610265299906},  {1, 4.0, 0.922020869622630674539487110227},
        {3, -2.5, 0.0438533235040327736251247136486}, {3, 0.3, 0.608118353980040478854396721543},
        {3, 1.7, 0.906154679223294955761249210987},  {3, 4.0, 0.985995771994926916515748137844},
        {9, -2.5, 0.016930913841492869604829756648},  {9, 0.3, 0.614504648129237553701651080658},
        {9, 1.7, 0.938326168928088045781169778481},  {9, 4.0, 0.998444785844807072306873491911},
        {19, -2.5, 0.0108702055841987234256312792231}, {19, 0.3, 0.616282669830368222338985523878},
        {19, 1.7, 0.947278366705986588124754243792}, {19, 4.0, 0.99961690383138567688287082615},
    };
    for (const auto& r : rows) {
        INFO("nu=" << r.nu << " x=" << r.x);
        CHECK(rns::t_cdf(r.x, DistParams{r.nu}) == Approx(r.p).epsilon(1e-12));
    }
    CHECK(rns::t_cdf(0.0, DistParams{7}) == 0.5);
    CHECK(rns::t_pdf(0.4, DistParams{5}) == Approx(0.345378075752733362054853206342).epsilon(1e-13));
}

TEST_CASE("student t quantile hits reference values")
{
    CHECK(rns::t_quantile(0.975, DistParams{3}) == Approx(3.18244630528370959272322542578).epsilon(1e-11));
    CHECK(rns::t_quantile(0.975, DistParams{19}) == Approx(2.09302405440830976917731528219).epsilon(1e-11));
    CHECK(rns::t_quantile(0.975, DistParams{100}) == Approx(1.98397151852355228659518486799).epsilon(1e-11));
    CHECK(rns::t_quantile(0.5, DistParams{4}) == 0.0);
}

TEST_CASE("t quantile at nu=10 agrees with bisection on integrated density")
{
    const auto cdf = [](double x) {
        return 0.5 + oracle::simpson([](double t) { return oracle::t_density(t, 10); }, 0.0, x, 4000);
    };
    const double q = oracle::bisect([&](double x) { return cdf(x) - 0.975; }, 0.0, 6.0, 80);
    CHECK(rns::t_quantile(0.975, DistParams{10}) == Approx(q).margin(1e-4));
}

TEST_CASE("t density approaches the normal density for large dof")
{
    for (double x : {-2.0, 0.0, 2.0}) CHECK(rns::t_pdf(x, DistParams{10000}) == Approx(rns::normal_pdf(x)).margin(1e-3));
}

TEST_CASE("t functions reject nonpositive dof")
{
    CHECK_THROWS_AS(rns::t_cdf(0.1, DistParams{0}), std::domain_error);
    CHECK_THROWS_AS(rns::t_pdf(0.1, DistParams{-3}), std::domain_error);
    CHECK_THROWS_AS(rns::t_quantile(0.3, DistParams{0}), std::domain_error);
    CHECK_THROWS_AS(rns::t_quantile(1.0, DistParams{4}), std::domain_error);
}

TEST_CASE("regularized incomplete beta hits reference values")
{
    CHECK(rns::incomplete_beta(2.5, 0.5, 0.3, 0.7) == Approx(0.0189271240719456516534522087067).epsilon(1e-12));
    CHECK(rns::incomplete_beta(3.0, 7.0, 0.2, 0.8) == Approx(0.261802496000000029336661100388).epsilon(1e-12));
    CHECK(rns::incomplete_beta(2.0, 3.0, 0.0, 1.0) == 0.0);
    CHECK(rns::incomplete_beta(2.0, 3.0, 1.0, 0.0) == 1.0);
}

TEST_CASE("cdfs are monotone, bounded and inverted by their quantiles")
{
    for (int nu : {0, 1, 2, 3, 7, 30}) {
        INFO("nu=" << nu << " (0 means normal)");
        auto cdf = [&](double x) { return nu == 0 ? rns::normal_cdf(x) : rns::t_cdf(x, DistParams{nu}); };
        auto quantile = [&](double p) { return nu == 0 ? rns::normal_quantile(p) : rns::t_quantile(p, DistParams{nu}); };
        double prev = 0.0;
        for (int i = 0; i <= 400; ++i) {
            const double x = -20.0 + 0.1 * i;
            const double p = cdf(x);
            CHECK(p >= prev);
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            prev = p;
        }
        for (int i = 1; i <= 100; ++i) {
            const double p = i / 101.0;
            CHECK(cdf(quantile(p)) == Approx(p).margin(1e-8));
        }
        for (int i = 0; i < 100; ++i) {
            const double x = -4.0 + 0.08 * i;
            CHECK(quantile(cdf(x)) == Approx(x).margin(1e-8));
        }
    }
}

TEST_CASE("densities integrate to one over the default window")
{
    CHECK(rns::integrate(rns::normal_pdf, rns::Quadrature{}) == Approx(1.0).margin(1e-8));
    CHECK(rns::integrate(rns::normal_pdf, -8.0, 8.0) == Approx(1.0).margin(1e-8));
    CHECK(rns::integrate([](double x) { return x * rns::normal_pdf(x); }, -8.0, 8.0) == Approx(0.0).margin(1e-10));
    CHECK(rns::integrate([](double x) { return rns::t_pdf(x, DistParams{30}); }, -40.0, 40.0, 400) ==
          Approx(1.0).margin(1e-8));
}

TEST_CASE("quadrature settings are validated")
{
    CHECK_THROWS_AS((rns::Quadrature{8, 8.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((rns::Quadrature{200, 0.0}.validate()), std::invalid_argument);
    CHECK_NOTHROW((rns::Quadrature{16, 1.0}.validate()));
}

TEST_CASE("find_root solves bracketed problems and reports bad brackets")
{
    CHECK(rns::find_root([](double x) { return x - 1.0; }, 0.0, 2.0) == Approx(1.0).margin(1e-12));
    const double r = rns::find_root([](double x) { return std::cos(x) - x; }, 0.0, 1.0, 1e-12);
    CHECK(std::fabs(std::cos(r) - r) <= 1e-12);
    CHECK(rns::find_root([](double x) { return std::exp(x) - 1e6; }, 0.0, 100.0, 1e-8) ==
          Approx(std::log(1e6)).margin(1e-8));
    try {
        rns::find_root([](double x) { return x * x + 1.0; }, -1.0, 2.0);
        FAIL("expected NumericalError");
    } catch (const rns::NumericalError& e) {
        CHECK(e.lo() == -1.0);
        CHECK(e.hi() == 2.0);
        CHECK(e.f_lo() == 2.0);
        CHECK(e.f_hi() == 5.0);
    }
}

TEST_CASE("bechhofer_h hits reference values")
{
    CHECK(rns::bechhofer_h(2, 0.05) == Approx(1.64485362695147268795212807646).epsilon(1e-8));
    CHECK(rns::bechhofer_h(2, 0.05) == Approx(rns::normal_quantile(0.95)).margin(1e-8));
    CHECK(rns::bechhofer_h(10, 0.05) == Approx(2.41701752459560309021026228747).epsilon(1e-8));
    CHECK(rns::bechhofer_h(5, 0.1) == Approx(1.83826810841948398819565334529).epsilon(1e-8));
    CHECK(rns::bechhofer_h(2, 0.5) == 0.0);
}

TEST_CASE("bechhofer_h for k=10 matches a Monte Carlo of the equicorrelated maximum")
{
    // P(max of 9 equicorrelated (rho = 1/2) normals <= h) with Z_i = (U_i - U_0)/sqrt(2).
    const double h = rns::bechhofer_h(10, 0.05);
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> z;
    const int draws = 10'000'000;
    int hits = 0;
    for (int d = 0; d < draws; ++d) {
        const double u0 = z(rng);
        bool ok = true;
        for (int i = 0; i < 9; ++i)
            if ((z(rng) - u0) / std::sqrt(2.0) > h) ok = false;
        hits += ok;
    }
    const double p = static_cast<double>(hits) / draws;
    const double se = std::sqrt(0.95 * 0.05 / draws);
    CHECK(std::fabs(p - 0.95) <= 3.0 * se);
}

TEST_CASE("rinott_h hits reference values and its defining equation")
{
    CHECK(rns::rinott_h(2, 10, 0.05) == Approx(2.614119295309406106719115).epsilon(1e-7));
    CHECK(rns::rinott_h(10, 20, 0.05) == Approx(3.678803408604061878374612).epsilon(1e-7));
    CHECK(rns::rinott_h(5, 5, 0.1) == Approx(3.525644012150552861048527).epsilon(1e-7));
    for (auto [k, n0, a] : {std::tuple{2, 10, 0.05}, {10, 20, 0.05}, {5, 5, 0.1}}) {
        const double h = rns::rinott_h(k, n0, a);
        CHECK(std::fabs(rns::rinott_probability(k, n0, h) - (1.0 - a)) <= 1e-6);
    }
    CHECK(rns::rinott_h(2, 15, 0.5) == 0.0);
    CHECK(rns::rinott_h(2, 10000, 0.05) == Approx(std::sqrt(2.0) * rns::normal_quantile(0.95)).margin(5e-3));
}

TEST_CASE("constants increase with k and with confidence")
{
    double prev_b = 0.0, prev_r = 0.0;
    for (int k = 2; k <= 20; ++k) {
        const double b = rns::bechhofer_h(k, 0.05);
        const double r = rns::rinott_h(k, 10, 0.05);
        CHECK(b > prev_b);
        CHECK(r > prev_r);
        prev_b = b;
        prev_r = r;
    }
    CHECK(rns::bechhofer_h(5, 0.01) > rns::bechhofer_h(5, 0.05));
    CHECK(rns::rinott_h(5, 10, 0.01) > rns::rinott_h(5, 10, 0.05));
}

TEST_CASE("constants reject invalid arguments")
{
    CHECK_THROWS_AS(rns::bechhofer_h(1, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(rns::bechhofer_h(3, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(rns::bechhofer_h(3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(rns::rinott_h(3, 1, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(rns::kn_eta(2, 20, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(rns::kn_eta(1, 20, 0.05), std::invalid_argument);
}

TEST_CASE("rinott_h memo is safe under concurrent callers")
{
    std::vector<double> got(4);
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) threads.emplace_back([&, t] { got[t] = rns::rinott_h(7, 12, 0.05); });
    for (auto& t : threads) t.join();
    for (double g : got) CHECK(g == got[0]);
}

TEST_CASE("kn_eta matches direct substitution and high-precision values")
{
    CHECK(rns::kn_eta(2, 2, 0.25) == Approx(1.5).epsilon(1e-15));
    CHECK(rns::kn_eta(10, 20, 0.05) == Approx(0.302933803649274952830881927019729794672).epsilon(1e-13));
    CHECK(rns::kn_h2(10, 20, 0.05) == Approx(11.51148453867244820757351322674973219754).epsilon(1e-13));
    CHECK(rns::kn_eta(2, 20, 0.025) == Approx(0.1853628031883593096707838543455010326867).epsilon(1e-13));
    CHECK(rns::kn_eta(2, 20, 0.4999999) < 1e-6);
    CHECK(rns::kn_eta(2, 20, 0.4999999) > 0.0);
}
