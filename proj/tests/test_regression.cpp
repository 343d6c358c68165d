#include "doctest.h"

#include <random>

#include "abckit/regression.hpp"

using namespace abckit;

namespace {

// assembles an AcceptedSet directly, bypassing the window machinery
AcceptedSet make_accepted(Eigen::MatrixXd stats, Eigen::VectorXd theta, Eigen::VectorXd weights,
                          Eigen::VectorXd s_obs) {
    AcceptedSet acc;
    acc.stats = std::move(stats);
    acc.theta = std::move(theta);
    acc.weights = std::move(weights);
    acc.s_obs = std::move(s_obs);
    acc.bandwidth = BandwidthMatrix{Eigen::VectorXd::Ones(acc.s_obs.size()), 1.0};
    for (Eigen::Index i = 0; i < acc.theta.size(); ++i) acc.rows.push_back(i);
    return acc;
}

AcceptedSet random_accepted(std::mt19937_64& rng, int n, int d) {
    std::normal_distribution<double> norm(0.0, 1.0);
    std::uniform_real_distribution<double> wdist(0.05, 2.0);
    Eigen::MatrixXd stats(n, d);
    Eigen::VectorXd theta(n), w(n), s_obs(d);
    for (int j = 0; j < d; ++j) s_obs[j] = norm(rng);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) stats(i, j) = s_obs[j] + norm(rng);
        theta[i] = norm(rng);
        w[i] = wdist(rng);
    }
    return make_accepted(stats, theta, w, s_obs);
}

// explicit (X^t W X)^{-1} X^t W theta via dense inversion
Eigen::VectorXd normal_equation_oracle(const Eigen::MatrixXd& x, const Eigen::VectorXd& theta,
                                       const Eigen::VectorXd& w) {
    Eigen::MatrixXd xtwx = x.transpose() * w.asDiagonal() * x;
    return xtwx.inverse() * (x.transpose() * (w.asDiagonal() * theta));
}

}  // namespace

TEST_CASE("design matrix layout") {
    std::mt19937_64 rng(1);

    SUBCASE("degree 0 is a single all-ones column") {
        auto acc = random_accepted(rng, 10, 3);
        auto design = build_design(acc, 0);
        CHECK(design.X.cols() == 1);
        CHECK(design.X.col(0).isOnes());
    }

    SUBCASE("d=2 degree 2 has the six documented columns") {
        auto acc = random_accepted(rng, 12, 2);
        auto design = build_design(acc, 2);
        REQUIRE(design.X.cols() == 6);
        for (Eigen::Index i = 0; i < design.X.rows(); ++i) {
            const double d1 = acc.stats(i, 0) - acc.s_obs[0];
            const double d2 = acc.stats(i, 1) - acc.s_obs[1];
            CHECK(design.X(i, 0) == 1.0);
            CHECK(design.X(i, 1) == doctest::Approx(d1));
            CHECK(design.X(i, 2) == doctest::Approx(d2));
            CHECK(design.X(i, 3) == doctest::Approx(d1 * d1 / 2.0));
            CHECK(design.X(i, 4) == doctest::Approx(d1 * d2));
            CHECK(design.X(i, 5) == doctest::Approx(d2 * d2 / 2.0));
        }
    }

    SUBCASE("d=3 degree 2 has 10 columns") {
        auto acc = random_accepted(rng, 30, 3);
        CHECK(build_design(acc, 2).X.cols() == 10);
        CHECK(design_columns(2, 3) == 10);
    }

    SUBCASE("too few rows is underdetermined") {
        auto acc = random_accepted(rng, 5, 2);
        CHECK_THROWS_AS(build_design(acc, 2), NumericalError);
    }
}

TEST_CASE("weighted least squares: weighted mean for the constant design") {
    Eigen::MatrixXd stats(3, 1);
    stats << 0.0, 0.1, -0.1;
    Eigen::VectorXd theta(3);
    theta << 1.0, 2.0, 3.0;
    auto acc = make_accepted(stats, theta, Eigen::VectorXd::Ones(3), Eigen::VectorXd::Zero(1));
    auto fit = weighted_least_squares(build_design(acc, 0), acc.theta, acc.weights);
    CHECK(fit.alpha == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(fit.n_effective == 3);
    CHECK_FALSE(fit.rank_deficient);
}

TEST_CASE("weighted least squares matches the normal-equation oracle on 200 random problems") {
    std::mt19937_64 rng(42);
    for (int rep = 0; rep < 200; ++rep) {
        const int d = 1 + int(rng() % 3);
        const int degree = int(rng() % 3);
        const int n = 20 + int(rng() % 30);
        auto acc = random_accepted(rng, n, d);
        auto design = build_design(acc, degree);
        auto fit = weighted_least_squares(design, acc.theta, acc.weights);

        Eigen::VectorXd coef = normal_equation_oracle(design.X, acc.theta, acc.weights);
        CHECK(fit.alpha == doctest::Approx(coef[0]).epsilon(1e-8));
        if (degree >= 1)
            for (int j = 0; j < d; ++j)
                CHECK(fit.beta[j] == doctest::Approx(coef[1 + j]).epsilon(1e-8));
        if (degree == 2) {
            int c = 1 + d;
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j)
                    CHECK(fit.gamma(i, j) == doctest::Approx(coef[c++]).epsilon(1e-8));
        }
    }
}

TEST_CASE("exactly linear data has zero residuals") {
    std::mt19937_64 rng(7);
    auto acc = random_accepted(rng, 40, 2);
    Eigen::VectorXd b(2);
    b << 1.5, -0.25;
    for (Eigen::Index i = 0; i < acc.theta.size(); ++i)
        acc.theta[i] = 0.7 + b.dot(acc.stats.row(i).transpose() - acc.s_obs);
    auto fit = weighted_least_squares(build_design(acc, 1), acc.theta, acc.weights);
    CHECK(fit.wssr == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(fit.alpha == doctest::Approx(0.7).epsilon(1e-10));
}

TEST_CASE("adjust: degree 0 leaves the draws unchanged") {
    std::mt19937_64 rng(9);
    auto acc = random_accepted(rng, 25, 2);
    auto fit = weighted_least_squares(build_design(acc, 0), acc.theta, acc.weights);
    auto adj = adjust(acc, fit);
    CHECK(adj.values == acc.theta);
    CHECK(adj.degree == 0);
}

TEST_CASE("exact-recovery ladder: noiseless polynomial collapses to a point mass") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> norm(0.0, 1.0);
    for (int d = 1; d <= 3; ++d) {
        // degree 1: theta = a + b's
        {
            auto acc = random_accepted(rng, 30 + 10 * d, d);
            Eigen::VectorXd b(d);
            for (int j = 0; j < d; ++j) b[j] = norm(rng);
            const double a = norm(rng);
            for (Eigen::Index i = 0; i < acc.theta.size(); ++i)
                acc.theta[i] = a + b.dot(acc.stats.row(i));
            auto fit = weighted_least_squares(build_design(acc, 1), acc.theta, acc.weights);
            auto adj = adjust(acc, fit);
            const double target = a + b.dot(acc.s_obs);
            for (Eigen::Index i = 0; i < adj.values.size(); ++i)
                CHECK(adj.values[i] == doctest::Approx(target).epsilon(1e-8));
        }
        // degree 2: theta = a + b's + s'Cs
        {
            auto acc = random_accepted(rng, 60 + 10 * d, d);
            Eigen::VectorXd b(d);
            Eigen::MatrixXd c(d, d);
            for (int j = 0; j < d; ++j) b[j] = norm(rng);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) c(i, j) = norm(rng);
            c = Eigen::MatrixXd(0.5 * (c + c.transpose()));
            const double a = norm(rng);
            auto poly = [&](const Eigen::VectorXd& s) { return a + b.dot(s) + s.dot(c * s); };
            for (Eigen::Index i = 0; i < acc.theta.size(); ++i)
                acc.theta[i] = poly(acc.stats.row(i).transpose());
            auto fit = weighted_least_squares(build_design(acc, 2), acc.theta, acc.weights);
            auto adj = adjust(acc, fit);
            const double target = poly(acc.s_obs);
            for (Eigen::Index i = 0; i < adj.values.size(); ++i)
                CHECK(adj.values[i] == doctest::Approx(target).epsilon(1e-8));
        }
    }
}

TEST_CASE("homoscedastic linear model: adjustment shifts the noise fit to m(s_obs)") {
    // theta_i = m(s_i) + eps_i with m linear: by linearity of WLS the adjusted
    // draws decompose exactly as m(s_obs) + eps*_i where eps*_i adjusts the
    // pure-noise regression, so the linear trend drops out elementwise
    std::mt19937_64 rng(17);
    std::normal_distribution<double> norm(0.0, 1.0);
    auto acc = random_accepted(rng, 50, 2);
    Eigen::VectorXd b(2);
    b << 2.0, -1.0;
    Eigen::VectorXd eps(acc.theta.size());
    for (Eigen::Index i = 0; i < acc.theta.size(); ++i) {
        eps[i] = 0.3 * norm(rng);
        acc.theta[i] = 1.0 + b.dot(acc.stats.row(i)) + eps[i];
    }
    auto fit = weighted_least_squares(build_design(acc, 1), acc.theta, acc.weights);
    auto adj = adjust(acc, fit);

    AcceptedSet noise = acc;
    noise.theta = eps;
    auto fit_eps = weighted_least_squares(build_design(noise, 1), noise.theta, noise.weights);
    auto adj_eps = adjust(noise, fit_eps);
    const double m_obs = 1.0 + b.dot(acc.s_obs);
    for (Eigen::Index i = 0; i < adj.values.size(); ++i)
        CHECK(adj.values[i] == doctest::Approx(m_obs + adj_eps.values[i]).epsilon(1e-9));

    // and the paper's definition itself: adjusted = m_hat(s_obs) + empirical residual
    for (Eigen::Index i = 0; i < adj.values.size(); ++i) {
        Eigen::VectorXd delta = acc.stats.row(i).transpose() - acc.s_obs;
        CHECK(adj.values[i] ==
              doctest::Approx(fit.alpha + (acc.theta[i] - fit.fitted_at(delta))).epsilon(1e-12));
    }
}

TEST_CASE("adjustment identity: weighted mean shift equals fitted-trend shift") {
    std::mt19937_64 rng(19);
    auto acc = random_accepted(rng, 40, 2);
    for (int degree : {1, 2}) {
        auto fit = weighted_least_squares(build_design(acc, degree), acc.theta, acc.weights);
        auto adj = adjust(acc, fit);
        const double wsum = acc.weights.sum();
        double lhs = 0.0, rhs = 0.0;
        for (Eigen::Index i = 0; i < acc.theta.size(); ++i) {
            Eigen::VectorXd delta = acc.stats.row(i).transpose() - acc.s_obs;
            lhs += acc.weights[i] * (acc.theta[i] - adj.values[i]);
            rhs += acc.weights[i] * (fit.fitted_at(delta) - fit.alpha);
        }
        CHECK(lhs / wsum == doctest::Approx(rhs / wsum).epsilon(1e-12));
    }
}

TEST_CASE("fitted values at s_obs are invariant under affine rescaling of statistics") {
    std::mt19937_64 rng(23);
    auto acc = random_accepted(rng, 60, 3);
    for (int degree : {1, 2}) {
        auto fit = weighted_least_squares(build_design(acc, degree), acc.theta, acc.weights);

        AcceptedSet scaled = acc;
        Eigen::VectorXd a(3), c(3);
        a << 12.0, -0.5, 3.0;
        c << 4.0, 100.0, -2.0;
        for (int j = 0; j < 3; ++j) {
            scaled.stats.col(j) = c[j] * acc.stats.col(j).array() + a[j];
            scaled.s_obs[j] = c[j] * acc.s_obs[j] + a[j];
        }
        auto fit2 =
            weighted_least_squares(build_design(scaled, degree), scaled.theta, scaled.weights);
        CHECK(fit2.alpha == doctest::Approx(fit.alpha).epsilon(1e-6));
    }
}

TEST_CASE("rank-deficient designs fall back to the minimum-norm solution with a flag") {
    // duplicate a statistic so X has linearly dependent columns
    std::mt19937_64 rng(29);
    auto acc = random_accepted(rng, 30, 1);
    AcceptedSet dup = acc;
    dup.stats.resize(acc.stats.rows(), 2);
    dup.stats.col(0) = acc.stats.col(0);
    dup.stats.col(1) = acc.stats.col(0);
    dup.s_obs.resize(2);
    dup.s_obs << acc.s_obs[0], acc.s_obs[0];
    auto fit = weighted_least_squares(build_design(dup, 1), dup.theta, dup.weights);
    CHECK(fit.rank_deficient);
    CHECK(std::isfinite(fit.alpha));
    CHECK(std::isfinite(fit.wssr));
}

TEST_CASE("WLS is scale-invariant in the weights") {
    std::mt19937_64 rng(31);
    auto acc = random_accepted(rng, 40, 2);
    auto fit = weighted_least_squares(build_design(acc, 1), acc.theta, acc.weights);
    auto fit2 = weighted_least_squares(build_design(acc, 1), acc.theta,
                                       Eigen::VectorXd(17.5 * acc.weights));
    CHECK(fit.alpha == doctest::Approx(fit2.alpha).epsilon(1e-12));
    CHECK(fit.beta[0] == doctest::Approx(fit2.beta[0]).epsilon(1e-12));
}
