#include "doctest.h"

#include <random>

#include "abckit/estimators.hpp"

using namespace abckit;

namespace {
const UnivariateKernel kEpan{KernelFamily::epanechnikov};

AdjustedSample sample_of(std::vector<double> values, std::vector<double> weights, int degree = 0) {
    AdjustedSample s;
    s.values = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    s.weights =
        Eigen::Map<Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
    s.degree = degree;
    return s;
}

double trapezoid(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    double acc = 0.0;
    for (Eigen::Index i = 1; i < x.size(); ++i)
        acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return acc;
}
}  // namespace

TEST_CASE("one-point KDE at its own location") {
    auto s = sample_of({1.7}, {1.0});
    Eigen::VectorXd grid(1);
    grid[0] = 1.7;
    const double bp = 0.3;
    CHECK(estimate_density(s, kEpan, bp, grid)[0] ==
          doctest::Approx(kEpan(0.0) / bp).epsilon(1e-14));
}

TEST_CASE("symmetric sample on a symmetric grid gives a symmetric density") {
    auto s = sample_of({-2.0, -1.0, 0.0, 1.0, 2.0}, {1.0, 1.0, 1.0, 1.0, 1.0});
    Eigen::VectorXd grid(9);
    for (int i = 0; i < 9; ++i) grid[i] = -2.0 + 0.5 * i;
    auto density = estimate_density(s, kEpan, 0.8, grid);
    for (int i = 0; i < 9; ++i) CHECK(density[i] == density[8 - i]);
}

TEST_CASE("KDE matches the double-loop oracle to 1e-12") {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> norm(0.0, 1.0);
    std::uniform_real_distribution<double> wdist(0.1, 2.0);
    std::vector<double> values(10), weights(10);
    for (int i = 0; i < 10; ++i) {
        values[static_cast<std::size_t>(i)] = norm(rng);
        weights[static_cast<std::size_t>(i)] = wdist(rng);
    }
    auto s = sample_of(values, weights);
    Eigen::VectorXd grid(5);
    for (int g = 0; g < 5; ++g) grid[g] = -1.0 + 0.5 * g;
    const double bp = 0.7;
    auto density = estimate_density(s, kEpan, bp, grid);

    double wsum = 0.0;
    for (double w : weights) wsum += w;
    for (int g = 0; g < 5; ++g) {
        double acc = 0.0;
        for (int i = 0; i < 10; ++i)
            acc += weights[static_cast<std::size_t>(i)] *
                   kEpan((values[static_cast<std::size_t>(i)] - grid[g]) / bp) / bp;
        CHECK(density[g] == doctest::Approx(acc / wsum).epsilon(1e-12));
    }
}

TEST_CASE("density errors: all-zero weights") {
    auto s = sample_of({1.0, 2.0}, {0.0, 0.0});
    Eigen::VectorXd grid(1);
    grid[0] = 0.0;
    CHECK_THROWS_AS(estimate_density(s, kEpan, 0.5, grid), NumericalError);
}

TEST_CASE("weighted quantiles") {
    SUBCASE("equal weights, median of three") {
        auto s = sample_of({1.0, 2.0, 3.0}, {1.0, 1.0, 1.0});
        CHECK(weighted_quantiles(s, {0.5})[0] == 2.0);
    }
    SUBCASE("cumulative weight reaches 0.75 at the first value") {
        auto s = sample_of({1.0, 2.0}, {3.0, 1.0});
        CHECK(weighted_quantiles(s, {0.5})[0] == 1.0);
    }
    SUBCASE("matches a sort-based oracle exactly") {
        std::mt19937_64 rng(101);
        std::normal_distribution<double> norm(0.0, 1.0);
        std::uniform_real_distribution<double> wdist(0.1, 1.0);
        const int n = 257;
        std::vector<double> values(n), weights(n);
        for (int i = 0; i < n; ++i) {
            values[static_cast<std::size_t>(i)] = norm(rng);
            weights[static_cast<std::size_t>(i)] = wdist(rng);
        }
        auto s = sample_of(values, weights);
        std::vector<std::pair<double, double>> pairs;
        for (int i = 0; i < n; ++i)
            pairs.emplace_back(values[static_cast<std::size_t>(i)],
                               weights[static_cast<std::size_t>(i)]);
        std::sort(pairs.begin(), pairs.end());
        double wsum = 0.0;
        for (auto& pr : pairs) wsum += pr.second;
        for (double p : {0.025, 0.25, 0.5, 0.75, 0.975}) {
            double cum = 0.0, oracle = pairs.back().first;
            for (auto& pr : pairs) {
                cum += pr.second;
                if (cum >= p * wsum) {
                    oracle = pr.first;
                    break;
                }
            }
            CHECK(weighted_quantiles(s, {p})[0] == oracle);
        }
    }
    SUBCASE("quantile function is monotone in p") {
        std::mt19937_64 rng(103);
        std::normal_distribution<double> norm(0.0, 1.0);
        std::vector<double> values(50), weights(50, 1.0);
        for (auto& v : values) v = norm(rng);
        auto s = sample_of(values, weights);
        double prev = -1e300;
        for (double p = 0.05; p < 1.0; p += 0.05) {
            const double q = weighted_quantiles(s, {p})[0];
            CHECK(q >= prev);
            prev = q;
        }
    }
}

TEST_CASE("posterior mode on the grid") {
    Eigen::VectorXd grid(5), density(5);
    grid << 0, 1, 2, 3, 4;
    SUBCASE("unique peak") {
        density << 0.1, 0.2, 0.9, 0.3, 0.1;
        CHECK(posterior_mode(grid, density) == 2.0);
    }
    SUBCASE("flat density ties break toward the smallest theta") {
        density << 0.25, 0.25, 0.25, 0.25, 0.25;
        CHECK(posterior_mode(grid, density) == 0.0);
    }
}

TEST_CASE("silverman bandwidth") {
    SUBCASE("matches the direct formula on standard normal draws") {
        std::mt19937_64 rng(107);
        std::normal_distribution<double> norm(0.0, 1.0);
        const int n = 1000;
        std::vector<double> values(n), weights(n, 1.0);
        for (auto& v : values) v = norm(rng);
        auto s = sample_of(values, weights);

        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= n;
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        var /= n;
        auto qs = weighted_quantiles(s, {0.25, 0.75});
        const double spread = std::min(std::sqrt(var), (qs[1] - qs[0]) / 1.34);
        const double expect = 0.9 * spread * std::pow(double(n), -0.2);
        CHECK(silverman_bandwidth(s) == doctest::Approx(expect).epsilon(1e-12));
    }
    SUBCASE("two values give a positive finite bandwidth") {
        auto s = sample_of({0.0, 1.0}, {1.0, 1.0});
        const double b = silverman_bandwidth(s);
        CHECK(b > 0.0);
        CHECK(std::isfinite(b));
    }
    SUBCASE("zero spread is degenerate") {
        auto s = sample_of({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
        CHECK_THROWS_AS(silverman_bandwidth(s), NumericalError);
    }
    SUBCASE("weights concentrated on one point are degenerate") {
        auto s = sample_of({1.0, 2.0, 3.0}, {1.0, 1e-300, 1e-300});
        // n_eff -> 1 and the weighted spread collapses
        CHECK_THROWS_AS(silverman_bandwidth(s), NumericalError);
    }
}

TEST_CASE("build_posterior: density integrates to about one on the default grid") {
    std::mt19937_64 rng(109);
    std::normal_distribution<double> norm(0.0, 1.0);
    std::uniform_real_distribution<double> wdist(0.2, 1.0);
    const int n = 400;
    std::vector<double> values(n), weights(n);
    for (int i = 0; i < n; ++i) {
        values[static_cast<std::size_t>(i)] = norm(rng);
        weights[static_cast<std::size_t>(i)] = wdist(rng);
    }
    auto s = sample_of(values, weights, 1);

    SUBCASE("identity scale") {
        auto est = build_posterior(s, kEpan, ParamTransform::identity());
        CHECK(est.density.minCoeff() >= 0.0);
        const double mass = trapezoid(est.grid, est.density);
        CHECK(mass > 0.99);
        CHECK(mass < 1.01);
    }
    SUBCASE("log scale maps back with the Jacobian") {
        auto est = build_posterior(s, kEpan, ParamTransform::log());
        CHECK(est.density.minCoeff() >= 0.0);
        for (Eigen::Index i = 0; i < est.grid.size(); ++i) CHECK(est.grid[i] > 0.0);
        const double mass = trapezoid(est.grid, est.density);
        CHECK(mass > 0.99);
        CHECK(mass < 1.01);
    }
    SUBCASE("logit scale stays inside the bounds") {
        auto est = build_posterior(s, kEpan, ParamTransform::logit(-8.0, 8.0));
        for (Eigen::Index i = 0; i < est.grid.size(); ++i) {
            CHECK(est.grid[i] > -8.0);
            CHECK(est.grid[i] < 8.0);
        }
        const double mass = trapezoid(est.grid, est.density);
        CHECK(mass > 0.99);
        CHECK(mass < 1.01);
    }
}

TEST_CASE("posterior estimate quantiles are the weighted quantiles of back-transformed draws") {
    auto s = sample_of({0.0, 0.5, 1.0, 1.5}, {1.0, 2.0, 2.0, 1.0}, 1);
    auto est = build_posterior(s, kEpan, ParamTransform::log());
    auto qs = est.quantiles({0.5});
    AdjustedSample back = s;
    back.values = back.values.array().exp();
    CHECK(qs[0] == weighted_quantiles(back, {0.5})[0]);
}
