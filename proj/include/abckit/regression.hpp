#pragma once

#include <Eigen/Dense>

#include "abckit/window.hpp"

namespace abckit {

//! Local polynomial design at s_obs. Column layout for degree 2 with d
//! statistics: [1 | delta_1 .. delta_d | delta_i*delta_j for i<=j in
//! lexicographic order], where the pure squares carry a factor 1/2 and the
//! cross terms a factor 1.
struct DesignMatrix {
    int degree = 0;
    Eigen::MatrixXd X;
};

int design_columns(int degree, int d);
DesignMatrix build_design(const AcceptedSet& accepted, int degree);

//! Degree-j weighted least-squares fit at s_obs. alpha is the fitted
//! conditional mean at s_obs for every degree.
struct RegressionFit {
    int degree = 0;
    double alpha = 0.0;
    Eigen::VectorXd beta;   // d, empty for degree 0
    Eigen::MatrixXd gamma;  // d x d symmetric, degree 2 only
    double wssr = 0.0;      // sum of w_i * residual_i^2
    Eigen::Index n_effective = 0;  // rows with positive weight
    bool rank_deficient = false;

    //! m_hat(s_obs + delta)
    double fitted_at(const Eigen::VectorXd& delta) const;
};

RegressionFit weighted_least_squares(const DesignMatrix& design, const Eigen::VectorXd& theta,
                                     const Eigen::VectorXd& weights);

//! Kernel-weighted adjusted draws: theta*_i (degree 1) or theta**_i (degree 2);
//! degree 0 leaves the draws unchanged.
struct AdjustedSample {
    Eigen::VectorXd values;
    Eigen::VectorXd weights;
    int degree = 0;
};

AdjustedSample adjust(const AcceptedSet& accepted, const RegressionFit& fit);

}  // namespace abckit
