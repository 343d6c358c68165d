#include "doctest.h"

#include <cmath>

#include "abckit/models.hpp"
#include "test_util.hpp"

using namespace abckit;

TEST_CASE("gaussian simulator is a pure function of its seed") {
    RngEngine a(123), b(123);
    const auto da = simulate_gaussian(a);
    const auto db = simulate_gaussian(b);
    CHECK(da.sigma2 == db.sigma2);
    CHECK(da.xbar == db.xbar);
    CHECK(da.s2 == db.s2);
}

TEST_CASE("gaussian prior: empirical median of sigma2 matches Inv-chi2(1)") {
    // median of 1/chi2_1 = 1/chi2_quantile(0.5, 1), frozen from quadrature
    const double exact_median = 2.198109338317736;
    RngEngine rng(2024);
    const int n = 100000;
    std::vector<double> draws(n);
    for (auto& v : draws) v = simulate_gaussian(rng).sigma2;
    std::nth_element(draws.begin(), draws.begin() + n / 2, draws.end());
    const double med = draws[n / 2];
    // 3 MC standard errors via the asymptotic median formula, f(med) ~ 0.0975
    CHECK(std::abs(med - exact_median) < 3.0 / (2.0 * 0.0975 * std::sqrt(double(n))));
}

TEST_CASE("gaussian conditional: Var(xbar) = 1 + 1/N when sigma2 is pinned to 1") {
    RngEngine rng(9);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double xb = simulate_gaussian_given_sigma2(rng, 1.0).xbar;
        sum += xb;
        sumsq += xb * xb;
    }
    const double var = (sumsq - sum * sum / n) / (n - 1);
    // law of total variance: Var(xbar) = Var(mu) + 1/N = 1 + 1/50
    const double expect = 1.0 + 1.0 / 50.0;
    CHECK(std::abs(var - expect) < 3.0 * expect * std::sqrt(2.0 / double(n - 1)));
}

TEST_CASE("exact gaussian posterior: frozen Iris quantiles") {
    auto post = exact_gaussian_posterior(5.552, 0.304, 50);
    CHECK(post.df == 51.0);
    CHECK(post.scale == doctest::Approx(0.9042411380238369).epsilon(1e-14));
    // frozen once from high-precision quadrature of the scaled Inv-chi2 density
    CHECK(post.quantile(0.5) == doctest::Approx(0.916189236439023).epsilon(1e-10));
    CHECK(post.quantile(0.025) == doctest::Approx(0.635070823907867).epsilon(1e-10));
    CHECK(post.quantile(0.975) == doctest::Approx(1.39064577299579).epsilon(1e-10));
    CHECK(post.quantile(0.25) == doctest::Approx(0.803403289161758).epsilon(1e-10));
    CHECK(post.quantile(0.75) == doctest::Approx(1.0510966822763).epsilon(1e-10));
}

TEST_CASE("exact gaussian posterior: density integrates to one and inverts the cdf") {
    auto post = exact_gaussian_posterior(5.552, 0.304, 50);
    const double mass =
        simpson([&](double v) { return post.pdf(v); }, 1e-9, 60.0, 400000);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    for (double p : {0.1, 0.5, 0.9}) CHECK(post.cdf(post.quantile(p)) == doctest::Approx(p).epsilon(1e-10));
    // quantile function is monotone
    double prev = 0.0;
    for (double p = 0.05; p < 1.0; p += 0.05) {
        const double q = post.quantile(p);
        CHECK(q > prev);
        prev = q;
    }
}

TEST_CASE("coalescent: no mutations means S = rho = 0") {
    CoalescentConfig config;
    config.mutation_rate = 0.0;
    RngEngine rng(4);
    for (int i = 0; i < 50; ++i) {
        const auto d = simulate_coalescent(rng, config);
        CHECK(d.segregating_sites == 0.0);
        CHECK(d.rho == 0.0);
        CHECK(d.tmrca > 0.0);
    }
}

TEST_CASE("coalescent with pinned population size matches closed-form means") {
    RngEngine rng(11);
    const int n = 100000;
    const double N = 5000.0;
    double sum_t = 0.0, sumsq_t = 0.0, sum_s = 0.0, sumsq_s = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto d = simulate_coalescent_given_popsize(rng, N);
        sum_t += d.tmrca;
        sumsq_t += d.tmrca * d.tmrca;
        sum_s += d.segregating_sites;
        sumsq_s += d.segregating_sites * d.segregating_sites;
    }
    const double mean_t = sum_t / n;
    const double se_t = std::sqrt((sumsq_t / n - mean_t * mean_t) / n);
    // E[TMRCA | N] = sum_k 2N/(k(k-1)) = 2N(1 - 1/m)
    CHECK(std::abs(mean_t - 9000.0) < 3.0 * se_t);

    const double mean_s = sum_s / n;
    const double se_s = std::sqrt((sumsq_s / n - mean_s * mean_s) / n);
    // E[S | N] = u E[total length | N] = u * 2N * H_{m-1}
    double harmonic = 0.0;
    for (int k = 1; k <= 9; ++k) harmonic += 1.0 / k;
    const double expect_s = 1.8e-3 * 2.0 * N * harmonic;
    CHECK(std::abs(mean_s - expect_s) < 3.0 * se_s);
}

TEST_CASE("coalescent draws respect their support") {
    RngEngine rng(12);
    for (int i = 0; i < 2000; ++i) {
        const auto d = simulate_coalescent(rng);
        CHECK(d.tmrca > 0.0);
        CHECK(d.pop_size > 0.0);
        CHECK(d.pop_size < 10000.0);
        CHECK(d.segregating_sites >= 0.0);
        CHECK(d.segregating_sites == std::floor(d.segregating_sites));
        CHECK(d.rho >= 0.0);
        CHECK(std::isfinite(d.rho));
    }
}

TEST_CASE("coalescent prior TMRCA 95% interval is near (300, 30800)") {
    // the model's true interval is (324.3, 30344); the reference values are
    // rounded, so the lower endpoint sits close to the +10% edge and the
    // sample must be large enough to pin the order statistic
    const auto& info = model_by_name("coalescent");
    const Eigen::Index n = 200000;
    ReferenceTable table = info.simulate_table(31, n);
    std::vector<double> tmrca(table.params.col(0).data(),
                              table.params.col(0).data() + table.n());
    std::sort(tmrca.begin(), tmrca.end());
    const double lo = tmrca[static_cast<std::size_t>(std::ceil(0.025 * n)) - 1];
    const double hi = tmrca[static_cast<std::size_t>(std::ceil(0.975 * n)) - 1];
    CHECK(lo == doctest::Approx(300.0).epsilon(0.10));
    CHECK(hi == doctest::Approx(30800.0).epsilon(0.10));
}

TEST_CASE("birth-death: no mutation collapses the sample to one genotype") {
    RngEngine rng(21);
    BirthDeathConfig config;
    config.stop_population = 2000;
    const auto d = simulate_birthdeath_given_rates(rng, {1.0, 0.2, 0.0}, config);
    CHECK(d.genotypes == 1.0);
    CHECK(d.homozygosity == 1.0);
}

TEST_CASE("birth-death: high mutation and no death makes nearly everyone distinct") {
    RngEngine rng(22);
    BirthDeathConfig config;
    config.stop_population = 10000;
    const auto d = simulate_birthdeath_given_rates(rng, {1.0, 0.0, 20.0}, config);
    CHECK(d.genotypes > 400.0);
    CHECK(d.homozygosity < 1.5 / 473.0 * 1.2);
    CHECK(d.restarts == 0);
}

TEST_CASE("birth-death conservation: births - deaths = stop - 1 on clean trajectories") {
    RngEngine rng(23);
    BirthDeathConfig config;
    config.stop_population = 5000;
    for (int i = 0; i < 5; ++i) {
        const auto d = simulate_birthdeath_given_rates(rng, {1.0, 0.3, 0.25}, config);
        if (d.restarts == 0) CHECK(d.births - d.deaths == config.stop_population - 1);
        CHECK(d.genotypes >= 1.0);
        CHECK(d.genotypes <= double(config.sample_size));
        CHECK(d.homozygosity >= 1.0 / double(config.sample_size));
        CHECK(d.homozygosity <= 1.0);
    }
}

TEST_CASE("birth-death prior respects its support constraints") {
    RngEngine rng(24);
    for (int i = 0; i < 2000; ++i) {
        const auto r = draw_birthdeath_rates(rng);
        CHECK(r.alpha > r.delta);
        CHECK(r.delta > 0.0);
        CHECK(r.theta > 0.0);
        CHECK(std::isfinite(r.alpha));
    }
}

TEST_CASE("birth-death caps surface as numerical errors") {
    BirthDeathConfig config;
    config.theta_mean = -50.0;  // theta > 0 essentially never
    config.max_prior_rejections = 500;
    RngEngine rng(25);
    CHECK_THROWS_AS(draw_birthdeath_rates(rng, config), NumericalError);

    BirthDeathConfig config2;
    config2.stop_population = 4000;
    config2.max_restarts = 0;
    RngEngine rng2(26);
    // near-critical rates go extinct at least once before reaching the cap
    CHECK_THROWS_AS(simulate_birthdeath_given_rates(rng2, {0.4, 0.39, 0.01}, config2),
                    NumericalError);
}

TEST_CASE("model registry: table shapes, determinism, and sanity") {
    const auto& info = model_by_name("gaussian");
    ReferenceTable t1 = info.simulate_table(77, 500);
    ReferenceTable t2 = info.simulate_table(77, 500);
    CHECK(t1.params == t2.params);
    CHECK(t1.stats == t2.stats);
    CHECK(t1.n() == 500);
    CHECK(t1.param_names == std::vector<std::string>{"sigma2"});
    CHECK(t1.stat_names == std::vector<std::string>{"xbar", "s2"});
    for (Eigen::Index i = 0; i < t1.n(); ++i) {
        CHECK(t1.params(i, 0) > 0.0);
        CHECK(t1.stats(i, 1) > 0.0);
        CHECK(std::isfinite(t1.stats(i, 0)));
    }
    CHECK_THROWS_AS(model_by_name("nope"), ConfigError);

    const auto& coal = model_by_name("coalescent");
    ReferenceTable t3 = coal.simulate_table(78, 200);
    for (Eigen::Index i = 0; i < t3.n(); ++i) {
        CHECK(t3.stats(i, 0) == std::floor(t3.stats(i, 0)));
        CHECK(t3.stats(i, 0) >= 0.0);
    }
}
