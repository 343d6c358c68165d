#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>

#include "abckit/estimators.hpp"
#include "abckit/models.hpp"
#include "abckit/selection.hpp"
#include "abckit/table.hpp"

namespace abckit {

struct EstimateOptions {
    double q = 0.025;
    KernelFamily accept_kernel = KernelFamily::epanechnikov;   // K1 of the spherical K
    KernelFamily density_kernel = KernelFamily::epanechnikov;  // Ktilde
    int grid_size = 512;
    int cv_subsample = 1000;
    double max_undefined_fraction = 0.1;
    std::uint64_t seed = 0;  // cross-validation fold subsampling

    std::optional<StatTransform> fixed_transform;  // empty = WSSR search
    std::optional<int> fixed_degree;               // empty = leave-one-out CV
};

//! Full single-parameter result: posterior estimate plus the selection report
//! and window diagnostics.
struct ParameterEstimate {
    std::string param_name;
    PosteriorEstimate posterior;
    SelectionReport selection;
    StatTransform transform;
    int degree = 0;
    ParamTransform param_transform;

    Eigen::Index n_accepted = 0;
    double bandwidth = 0.0;             // b
    Eigen::VectorXd statistic_scales;   // diag(D) on the transformed table
    bool rank_deficient = false;

    double mode = 0.0;
    std::map<double, double> quantiles;
    std::array<double, 2> ci95{0.0, 0.0};
};

//! Runs transform search (unless fixed), CV degree choice (unless fixed), the
//! local fit and adjustment, and the density estimate, for one scalar
//! parameter coordinate of the table.
ParameterEstimate estimate_parameter(const ReferenceTable& table, int param_index,
                                     const Eigen::VectorXd& s_obs,
                                     const ParamTransform& param_transform,
                                     const EstimateOptions& options);

}  // namespace abckit
