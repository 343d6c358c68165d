#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "abckit/transforms.hpp"
#include "abckit/window.hpp"

namespace abckit {

struct SelectionOptions {
    double q = 0.025;                      // acceptance fraction
    KernelFamily fit_kernel = KernelFamily::epanechnikov;  // CV refit weights
    int cv_subsample = 1000;               // max leave-one-out folds
    std::uint64_t seed = 0;                // fold subsampling seed
    double max_undefined_fraction = 0.1;   // per-candidate row-drop budget
    int exhaustive_limit = 729;            // beyond 3^d candidates, go greedy
};

struct CandidateScore {
    StatTransform transform;
    double wssr = std::numeric_limits<double>::quiet_NaN();
    bool applicable = false;
    std::string skip_reason;
};

struct CvResult {
    double score = std::numeric_limits<double>::quiet_NaN();
    Eigen::Index folds_evaluated = 0;
    Eigen::Index folds_skipped = 0;
    bool unreliable = false;  // more than 10% of the folds skipped
};

struct SelectionReport {
    std::vector<CandidateScore> candidates;  // fixed enumeration order
    bool greedy = false;
    int chosen_candidate = -1;
    std::array<CvResult, 3> cv{};
    std::array<bool, 3> cv_evaluated{false, false, false};
    int chosen_degree = -1;

    const StatTransform& chosen_transform() const;
};

//! Weighted mean squared residual of the degree-1 local fit at s_obs after
//! transforming the statistics: uniform acceptance kernel, scale D and
//! acceptance recomputed on the transformed table. theta must already be on
//! the regression (parameter-transformed) scale.
double wssr_score(const Eigen::MatrixXd& stats, const Eigen::VectorXd& theta,
                  const Eigen::VectorXd& s_obs, const StatTransform& transform, double q);

//! argmin over applicable candidates; exact ties prefer fewer transformed
//! coordinates, then enumeration order. Returns -1 when nothing applies.
int pick_candidate(const std::vector<CandidateScore>& candidates);

//! Scores transform candidates and fills `candidates`/`chosen_candidate`.
//! Exhaustive over the 3^d candidates up to `exhaustive_limit`, otherwise one
//! coordinate-wise greedy pass (3 d evaluations). Ties prefer fewer
//! transformed coordinates, then enumeration order.
SelectionReport search_transforms(const Eigen::MatrixXd& stats, const Eigen::VectorXd& theta,
                                  const Eigen::VectorXd& s_obs, const SelectionOptions& options);

//! Mean squared leave-one-out prediction error of the degree-j local
//! polynomial, refit at each accepted s_i with the same acceptance rule.
CvResult cv_score(const Eigen::MatrixXd& stats, const Eigen::VectorXd& theta,
                  const Eigen::VectorXd& s_obs, const StatTransform& transform, int degree,
                  const SelectionOptions& options);

//! Runs the degree competition over {0,1,2} and fills the cv fields.
void select_degree(const Eigen::MatrixXd& stats, const Eigen::VectorXd& theta,
                   const Eigen::VectorXd& s_obs, const StatTransform& transform,
                   const SelectionOptions& options, SelectionReport& report);

}  // namespace abckit
