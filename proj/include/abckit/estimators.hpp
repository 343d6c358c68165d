#pragma once

#include <Eigen/Dense>

#include <vector>

#include "abckit/kernels.hpp"
#include "abckit/regression.hpp"
#include "abckit/transforms.hpp"

namespace abckit {

//! Weighted kernel density estimate of the adjusted sample, evaluated on
//! `grid` (same scale as the sample values):
//! g_hat(theta) = sum_i w_i Ktilde_{b'}(v_i - theta) / sum_i w_i.
Eigen::VectorXd estimate_density(const AdjustedSample& sample, const UnivariateKernel& ktilde,
                                 double b_prime, const Eigen::VectorXd& grid);

//! Equally spaced grid spanning the positive-weight sample range widened by
//! 3 b' on each side.
Eigen::VectorXd default_grid(const AdjustedSample& sample, double b_prime, int size = 512);

//! Weighted empirical quantiles: sorted values, cumulative normalized weights,
//! left-continuous inverse.
std::vector<double> weighted_quantiles(const AdjustedSample& sample,
                                       const std::vector<double>& probs);

//! Grid argmax of the density; ties break toward the smallest theta.
double posterior_mode(const Eigen::VectorXd& grid, const Eigen::VectorXd& density);

//! 0.9 min(weighted sd, weighted IQR/1.34) n_eff^{-1/5} with
//! n_eff = (sum w)^2 / sum w^2.
double silverman_bandwidth(const AdjustedSample& sample);

//! One partial-posterior estimate for a scalar parameter: the weighted
//! adjusted sample plus a density curve, both reported on the original
//! parameter scale (the regression ran on the transformed scale).
struct PosteriorEstimate {
    int degree = 0;
    AdjustedSample sample;       // transformed scale
    Eigen::VectorXd grid;        // original scale
    Eigen::VectorXd density;     // original scale (Jacobian applied)
    double b_prime = 0.0;
    ParamTransform param_transform;

    Eigen::VectorXd values_original() const;  // back-transformed adjusted draws
    std::vector<double> quantiles(const std::vector<double>& probs) const;
    double mode() const;
};

//! Runs the density step: b' from the Silverman rule unless given, KDE on the
//! transformed scale, then the change of variables back to the original scale.
PosteriorEstimate build_posterior(const AdjustedSample& sample, const UnivariateKernel& ktilde,
                                  const ParamTransform& transform, int grid_size = 512,
                                  double b_prime = 0.0);

}  // namespace abckit
