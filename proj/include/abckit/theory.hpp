#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "abckit/kernels.hpp"
#include "abckit/rng.hpp"

namespace abckit {

//! A model with closed-form marginal p(s), partial posterior g(theta|s),
//! conditional mean m(s) and residual density h(eps|s), plus every derivative
//! entering the leading bias and variance terms. Derivative callables are
//! validated against finite differences of the base callables.
struct AnalyticModel {
    int dim = 1;  // d
    std::string name;

    std::function<double(const Eigen::VectorXd&)> p;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> p_grad;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> p_hess;

    std::function<double(double, const Eigen::VectorXd&)> g;
    std::function<double(double, const Eigen::VectorXd&)> g_dtheta2;
    std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> g_grad_s;
    std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)> g_hess_s;

    std::function<double(const Eigen::VectorXd&)> m;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> m_hess;

    std::function<double(double, const Eigen::VectorXd&)> h;
    std::function<double(double, const Eigen::VectorXd&)> h_deps;
    std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> h_grad_s;
    std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)> h_hess_s;

    //! draws one (theta, s) pair, when the model is simulable
    std::function<std::pair<double, Eigen::VectorXd>(RngEngine&)> draw;
};

//! Largest relative mismatch between the derivative callables and central
//! finite differences of the base callables at the given points.
double derivative_mismatch(const AnalyticModel& model, double theta,
                           const std::vector<Eigen::VectorXd>& points, double step = 1e-4);

struct KernelSpecs {
    KernelFamily multivariate = KernelFamily::epanechnikov;  // K (spherical)
    KernelFamily univariate = KernelFamily::epanechnikov;    // Ktilde
};

//! Leading bias/variance constants of the three estimators. For the diagonal
//! bandwidth B = b D these are the C's (bias = C1 b'^2 + C2_j b^2, variance =
//! C3/(n b^d b')); for a general non-singular B the bias reads D1 b'^2 + D2_j
//! with BB^t in place of b^2 D^2.
struct TheoryConstants {
    double c1 = 0.0;
    double c2_0 = 0.0;
    double c2_1 = 0.0;
    double c2_2 = 0.0;
    double c3 = 0.0;
    double mu2_k = 0.0;
    double mu2_ktilde = 0.0;
    double r_k = 0.0;
    double r_ktilde = 0.0;
};

TheoryConstants constants(const AnalyticModel& model, const Eigen::VectorXd& s_obs,
                          double theta, const Eigen::VectorXd& scale_diag,
                          const KernelSpecs& kernels = {});

//! General-bandwidth variant: c2_j hold the D2_j terms (absolute bias
//! contributions) and c3 holds R(K)R(Ktilde) g / p, the variance constant per
//! n |B| b'.
TheoryConstants general_constants(const AnalyticModel& model, const Eigen::VectorXd& s_obs,
                                  double theta, const Eigen::MatrixXd& bandwidth,
                                  const KernelSpecs& kernels = {});

//! Remark-2 effective local size n |D| p(s_obs) b^d.
double effective_local_size(double n, const Eigen::VectorXd& scale_diag, double b,
                            double p_at_sobs);

struct HarnessCell {
    std::int64_t n = 0;
    double b = 0.0;
    double b_prime = 0.0;
    int degree = 0;
    double bias = 0.0;
    double variance = 0.0;
    double mc_se_bias = 0.0;
    double mc_se_variance = 0.0;
    double mean_accepted = 0.0;
    int replicates_used = 0;
    int replicates_dropped = 0;
};

//! Monte Carlo bias/variance of g_hat_j(theta | s_obs) at fixed bandwidths,
//! over independent replicate tables of size n. Replicates are distributed
//! across workers with per-replicate derived seeds.
HarnessCell empirical_bias_variance(const AnalyticModel& model, int degree, std::int64_t n,
                                    double b, double b_prime, int replicates,
                                    std::uint64_t seed, double theta,
                                    const Eigen::VectorXd& s_obs,
                                    const KernelSpecs& kernels = {});

//! Registered closed-form models for the CLI and the test harness.
const AnalyticModel& analytic_model_by_name(const std::string& name);
std::vector<std::string> analytic_model_names();

}  // namespace abckit
