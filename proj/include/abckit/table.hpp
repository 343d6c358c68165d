#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "abckit/common.hpp"

namespace abckit {

//! Raw simulation output: n rows of (parameter vector, summary-statistic vector).
struct ReferenceTable {
    std::vector<std::string> param_names;
    std::vector<std::string> stat_names;
    Eigen::MatrixXd params;  // n x p
    Eigen::MatrixXd stats;   // n x d

    Eigen::Index n() const { return params.rows(); }
    int n_params() const { return static_cast<int>(params.cols()); }
    int n_stats() const { return static_cast<int>(stats.cols()); }

    int param_index(const std::string& name) const;
};

// CSV layout: header `theta_<name>,...,stat_<name>,...`, UTF-8, LF line endings.
void write_reference_table_csv(const ReferenceTable& table, const std::string& path);
ReferenceTable read_reference_table_csv(const std::string& path);

}  // namespace abckit
