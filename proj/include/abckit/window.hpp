#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "abckit/kernels.hpp"

namespace abckit {

//! The simulations retained near s_obs together with their kernel weights and
//! the bandwidth (D, b) that produced them. Coordinates are on whatever scale
//! the caller passed in (possibly transformed).
struct AcceptedSet {
    Eigen::MatrixXd stats;            // n_acc x d
    Eigen::VectorXd theta;            // n_acc
    Eigen::VectorXd weights;          // K_B(s_i - s_obs) > 0
    Eigen::VectorXd s_obs;            // d
    BandwidthMatrix bandwidth;        // B = b D
    std::vector<Eigen::Index> rows;   // indices into the source rows

    Eigen::Index size() const { return theta.size(); }
};

//! Per-statistic standard deviation (unbiased) of the full table; the diagonal
//! of the scale matrix D.
Eigen::VectorXd statistic_scale(const Eigen::MatrixXd& stats);

//! Standardized Euclidean distances ||D^{-1}(s_i - s_obs)||.
std::vector<double> standardized_distances(const Eigen::MatrixXd& stats,
                                           const Eigen::VectorXd& s_obs,
                                           const Eigen::VectorXd& scale);

//! Smooth-rejection step: b is the order statistic of the standardized
//! distances at `accept_count`, weights are spherical kernel weights, and rows
//! with zero weight are dropped. `exclude` removes one source row first
//! (leave-one-out refits).
AcceptedSet accept_window(const Eigen::MatrixXd& stats, const Eigen::VectorXd& theta,
                          const Eigen::VectorXd& s_obs, const MultivariateKernel& kernel,
                          Eigen::Index accept_count,
                          std::optional<Eigen::Index> exclude = std::nullopt);

//! Same, with the acceptance count derived from a fraction q of n_total rows
//! (n_total defaults to the number of rows supplied).
AcceptedSet accept_window_q(const Eigen::MatrixXd& stats, const Eigen::VectorXd& theta,
                            const Eigen::VectorXd& s_obs, const MultivariateKernel& kernel,
                            double q, Eigen::Index n_total = 0);

}  // namespace abckit
