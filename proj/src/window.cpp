#include "abckit/window.hpp"

#include <algorithm>
#include <cmath>

namespace abckit {

Eigen::VectorXd statistic_scale(const Eigen::MatrixXd& stats) {
    const Eigen::Index n = stats.rows();
    if (n < 2) throw NumericalError("degenerate reference table");
    Eigen::VectorXd mean = stats.colwise().mean();
    Eigen::VectorXd var =
        (stats.rowwise() - mean.transpose()).array().square().colwise().sum() / double(n - 1);
    Eigen::VectorXd sd = var.cwiseSqrt();
    for (Eigen::Index j = 0; j < sd.size(); ++j)
        if (!(sd[j] > 0.0) || !std::isfinite(sd[j]))
            throw NumericalError("degenerate reference table");
    return sd;
}

std::vector<double> standardized_distances(const Eigen::MatrixXd& stats,
                                           const Eigen::VectorXd& s_obs,
                                           const Eigen::VectorXd& scale) {
    std::vector<double> dist(static_cast<std::size_t>(stats.rows()));
    Eigen::VectorXd inv = scale.cwiseInverse();
    for (Eigen::Index i = 0; i < stats.rows(); ++i) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < stats.cols(); ++j) {
            const double z = (stats(i, j) - s_obs[j]) * inv[j];
            acc += z * z;
        }
        dist[static_cast<std::size_t>(i)] = std::sqrt(acc);
    }
    return dist;
}

AcceptedSet accept_window(const Eigen::MatrixXd& stats, const Eigen::VectorXd& theta,
                          const Eigen::VectorXd& s_obs, const MultivariateKernel& kernel,
                          Eigen::Index accept_count, std::optional<Eigen::Index> exclude) {
    if (stats.rows() != theta.size()) throw NumericalError("stats/theta row mismatch");
    if (stats.cols() != s_obs.size()) throw NumericalError("observed statistics dimension mismatch");

    AcceptedSet out;
    out.s_obs = s_obs;
    out.bandwidth.scale = statistic_scale(stats);

    auto dist = standardized_distances(stats, s_obs, out.bandwidth.scale);
    std::vector<double> pool;
    pool.reserve(dist.size());
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (exclude && static_cast<Eigen::Index>(i) == *exclude) continue;
        pool.push_back(dist[i]);
    }
    if (pool.empty()) throw NumericalError("degenerate reference table");
    accept_count = std::clamp<Eigen::Index>(accept_count, 1,
                                            static_cast<Eigen::Index>(pool.size()));
    std::nth_element(pool.begin(), pool.begin() + (accept_count - 1), pool.end());
    const double b = pool[static_cast<std::size_t>(accept_count - 1)];
    if (!(b > 0.0)) throw NumericalError("degenerate reference table");
    out.bandwidth.global = b;

    std::vector<Eigen::Index> rows;
    std::vector<double> weights;
    const double cnorm = kernel.normalizing();
    const double bdet = out.bandwidth.det();
    for (Eigen::Index i = 0; i < stats.rows(); ++i) {
        if (exclude && i == *exclude) continue;
        const double r = dist[static_cast<std::size_t>(i)] / out.bandwidth.global;
        if (kernel.base.compact_support() && r > 1.0) continue;
        const double w = cnorm * kernel.base(r) / bdet;
        if (w > 0.0) {
            rows.push_back(i);
            weights.push_back(w);
        }
    }
    if (rows.empty()) throw NumericalError("empty neighborhood");

    const auto m = static_cast<Eigen::Index>(rows.size());
    out.stats.resize(m, stats.cols());
    out.theta.resize(m);
    out.weights.resize(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        out.stats.row(k) = stats.row(rows[static_cast<std::size_t>(k)]);
        out.theta[k] = theta[rows[static_cast<std::size_t>(k)]];
        out.weights[k] = weights[static_cast<std::size_t>(k)];
    }
    out.rows = std::move(rows);
    return out;
}

AcceptedSet accept_window_q(const Eigen::MatrixXd& stats, const Eigen::VectorXd& theta,
                            const Eigen::VectorXd& s_obs, const MultivariateKernel& kernel,
                            double q, Eigen::Index n_total) {
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("acceptance fraction must lie in (0,1)");
    if (n_total <= 0) n_total = stats.rows();
    const auto count = static_cast<Eigen::Index>(std::ceil(q * double(n_total)));
    return accept_window(stats, theta, s_obs, kernel, count);
}

}  // namespace abckit
