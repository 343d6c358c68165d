#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "abckit/common.hpp"

namespace abckit {

//! Per-coordinate transformation of the summary statistics.
enum class StatTag { identity, sqrt, log };

std::string_view stat_tag_name(StatTag tag);
StatTag stat_tag_from_name(std::string_view name);

struct StatTransform {
    std::vector<StatTag> tags;

    bool all_identity() const;
    int transformed_count() const;  // coordinates with a non-identity tag
    std::string spec() const;       // "id,log" form
    //! parses "id,log" / "identity,sqrt,..." against dimension d
    static StatTransform parse(std::string_view spec, int d);
    static StatTransform identity(int d);
};

//! Statistics with a transform applied. Rows where the transform is undefined
//! (log of a nonpositive value, sqrt of a negative one) are dropped; `rows`
//! maps the retained rows back to the source table.
struct TransformedStats {
    Eigen::MatrixXd stats;
    Eigen::VectorXd s_obs;
    std::vector<Eigen::Index> rows;
    Eigen::Index n_dropped = 0;
};

//! Non-empty reason when the candidate cannot be evaluated at all: the
//! observed value is outside the transform domain, or more than
//! `max_undefined_fraction` of the table rows are.
std::optional<std::string> stat_transform_obstacle(const Eigen::MatrixXd& stats,
                                                   const Eigen::VectorXd& s_obs,
                                                   const StatTransform& transform,
                                                   double max_undefined_fraction);

TransformedStats apply_stat_transform(const Eigen::MatrixXd& stats,
                                      const Eigen::VectorXd& s_obs,
                                      const StatTransform& transform);

//! Monotone reparameterization of a scalar parameter chosen from the prior
//! support: log for the positive half-line, logit for a bounded interval.
//! backward() maps any real strictly into the support.
struct ParamTransform {
    enum class Kind { identity, log, logit };
    Kind kind = Kind::identity;
    double lower = 0.0;  // logit bounds
    double upper = 1.0;

    double forward(double x) const;
    double backward(double z) const;
    //! d backward / dz, the change-of-variables factor for densities
    double backward_jacobian(double z) const;
    Eigen::VectorXd forward(const Eigen::VectorXd& values) const;
    Eigen::VectorXd backward(const Eigen::VectorXd& values) const;
    bool in_support(double x) const;

    std::string name() const;
    static ParamTransform identity();
    static ParamTransform log();
    static ParamTransform logit(double lower, double upper);
};

}  // namespace abckit
