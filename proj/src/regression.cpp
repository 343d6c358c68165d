#include "abckit/regression.hpp"

#include <cmath>

namespace abckit {

int design_columns(int degree, int d) {
    switch (degree) {
        case 0: return 1;
        case 1: return 1 + d;
        case 2: return 1 + d + d * (d + 1) / 2;
    }
    throw ConfigError("regression degree must be 0, 1 or 2");
}

DesignMatrix build_design(const AcceptedSet& accepted, int degree) {
    const Eigen::Index n = accepted.size();
    const int d = static_cast<int>(accepted.stats.cols());
    const int cols = design_columns(degree, d);
    if (n < cols) throw NumericalError("underdetermined local regression");

    DesignMatrix design;
    design.degree = degree;
    design.X.resize(n, cols);
    design.X.col(0).setOnes();
    if (degree >= 1)
        design.X.middleCols(1, d) = accepted.stats.rowwise() - accepted.s_obs.transpose();
    if (degree == 2) {
        int c = 1 + d;
        for (int i = 0; i < d; ++i) {
            for (int j = i; j < d; ++j) {
                const double factor = (i == j) ? 0.5 : 1.0;
                design.X.col(c++) =
                    factor * design.X.col(1 + i).cwiseProduct(design.X.col(1 + j));
            }
        }
    }
    return design;
}

double RegressionFit::fitted_at(const Eigen::VectorXd& delta) const {
    double v = alpha;
    if (degree >= 1) v += beta.dot(delta);
    if (degree == 2) v += 0.5 * delta.dot(gamma * delta);
    return v;
}

RegressionFit weighted_least_squares(const DesignMatrix& design, const Eigen::VectorXd& theta,
                                     const Eigen::VectorXd& weights) {
    const Eigen::Index n = design.X.rows();
    const Eigen::Index cols = design.X.cols();
    if (theta.size() != n || weights.size() != n)
        throw NumericalError("regression input size mismatch");

    Eigen::Index n_pos = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (weights[i] < 0.0) throw NumericalError("negative kernel weight");
        if (weights[i] > 0.0) ++n_pos;
    }
    if (n_pos < cols) throw NumericalError("underdetermined local regression");

    // Factor the sqrt(w)-scaled design rather than forming X^t W X.
    Eigen::VectorXd sw = weights.cwiseSqrt();
    Eigen::MatrixXd A = sw.asDiagonal() * design.X;
    Eigen::VectorXd y = sw.cwiseProduct(theta);

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    Eigen::VectorXd coef = cod.solve(y);

    RegressionFit fit;
    fit.degree = design.degree;
    fit.rank_deficient = cod.rank() < cols;
    fit.n_effective = n_pos;
    fit.alpha = coef[0];
    int d = 0;  // statistic dimension, recovered from the column count
    if (design.degree == 1) d = static_cast<int>(cols - 1);
    if (design.degree == 2)
        d = static_cast<int>(std::lround((std::sqrt(8.0 * double(cols - 1) + 9.0) - 3.0) / 2.0));
    if (design.degree >= 1) fit.beta = coef.segment(1, d);
    if (design.degree == 2) {
        fit.gamma.setZero(d, d);
        int c = 1 + d;
        for (int i = 0; i < d; ++i) {
            for (int j = i; j < d; ++j) {
                fit.gamma(i, j) = coef[c];
                fit.gamma(j, i) = coef[c];
                ++c;
            }
        }
    }
    Eigen::VectorXd resid = theta - design.X * coef;
    fit.wssr = weights.dot(resid.cwiseAbs2());
    return fit;
}

AdjustedSample adjust(const AcceptedSet& accepted, const RegressionFit& fit) {
    AdjustedSample out;
    out.degree = fit.degree;
    out.weights = accepted.weights;
    if (fit.degree == 0) {
        out.values = accepted.theta;
        return out;
    }
    const Eigen::Index n = accepted.size();
    out.values.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd delta = accepted.stats.row(i).transpose() - accepted.s_obs;
        out.values[i] = fit.alpha + (accepted.theta[i] - fit.fitted_at(delta));
    }
    return out;
}

}  // namespace abckit
