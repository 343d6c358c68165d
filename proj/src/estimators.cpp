#include "abckit/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace abckit {

namespace {

void check_weights(const AdjustedSample& sample) {
    if (sample.values.size() == 0 || sample.values.size() != sample.weights.size())
        throw NumericalError("empty neighborhood");
    double total = 0.0;
    for (Eigen::Index i = 0; i < sample.weights.size(); ++i) {
        if (sample.weights[i] < 0.0) throw NumericalError("negative kernel weight");
        total += sample.weights[i];
    }
    if (!(total > 0.0)) throw NumericalError("empty neighborhood");
}

}  // namespace

Eigen::VectorXd estimate_density(const AdjustedSample& sample, const UnivariateKernel& ktilde,
                                 double b_prime, const Eigen::VectorXd& grid) {
    check_weights(sample);
    if (!(b_prime > 0.0)) throw NumericalError("density bandwidth must be positive");
    const double wsum = sample.weights.sum();
    Eigen::VectorXd density(grid.size());
    for (Eigen::Index g = 0; g < grid.size(); ++g) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < sample.values.size(); ++i)
            acc += sample.weights[i] * ktilde((sample.values[i] - grid[g]) / b_prime);
        density[g] = acc / (b_prime * wsum);
    }
    return density;
}

Eigen::VectorXd default_grid(const AdjustedSample& sample, double b_prime, int size) {
    check_weights(sample);
    if (size < 2) throw ConfigError("grid size must be at least 2");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < sample.values.size(); ++i) {
        if (sample.weights[i] > 0.0) {
            lo = std::min(lo, sample.values[i]);
            hi = std::max(hi, sample.values[i]);
        }
    }
    lo -= 3.0 * b_prime;
    hi += 3.0 * b_prime;
    Eigen::VectorXd grid(size);
    const double step = (hi - lo) / double(size - 1);
    for (int g = 0; g < size; ++g) grid[g] = lo + step * g;
    return grid;
}

std::vector<double> weighted_quantiles(const AdjustedSample& sample,
                                       const std::vector<double>& probs) {
    check_weights(sample);
    for (double p : probs)
        if (!(p > 0.0 && p < 1.0)) throw ConfigError("quantile probabilities must lie in (0,1)");

    const Eigen::Index n = sample.values.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return sample.values[a] < sample.values[b];
    });
    const double wsum = sample.weights.sum();

    std::vector<double> out(probs.size());
    for (std::size_t k = 0; k < probs.size(); ++k) {
        const double target = probs[k] * wsum;
        double cum = 0.0;
        double q = sample.values[order.back()];
        for (Eigen::Index i = 0; i < n; ++i) {
            cum += sample.weights[order[static_cast<std::size_t>(i)]];
            if (cum >= target) {
                q = sample.values[order[static_cast<std::size_t>(i)]];
                break;
            }
        }
        out[k] = q;
    }
    return out;
}

double posterior_mode(const Eigen::VectorXd& grid, const Eigen::VectorXd& density) {
    if (grid.size() == 0 || grid.size() != density.size())
        throw NumericalError("empty density grid");
    Eigen::Index best = 0;
    for (Eigen::Index g = 1; g < grid.size(); ++g)
        if (density[g] > density[best]) best = g;
    return grid[best];
}

double silverman_bandwidth(const AdjustedSample& sample) {
    check_weights(sample);
    const double wsum = sample.weights.sum();
    const double wsq = sample.weights.cwiseAbs2().sum();
    const double n_eff = wsum * wsum / wsq;
    if (n_eff <= 1.0 + 1e-9) throw NumericalError("degenerate sample");

    const double mean = sample.weights.dot(sample.values) / wsum;
    const double var =
        sample.weights.dot((sample.values.array() - mean).square().matrix()) / wsum;
    const double sd = std::sqrt(std::max(var, 0.0));

    auto iq = weighted_quantiles(sample, {0.25, 0.75});
    const double iqr = iq[1] - iq[0];

    double spread = sd;
    if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) throw NumericalError("degenerate sample");
    return 0.9 * spread * std::pow(n_eff, -0.2);
}

Eigen::VectorXd PosteriorEstimate::values_original() const {
    return param_transform.backward(sample.values);
}

std::vector<double> PosteriorEstimate::quantiles(const std::vector<double>& probs) const {
    AdjustedSample original{values_original(), sample.weights, sample.degree};
    return weighted_quantiles(original, probs);
}

double PosteriorEstimate::mode() const { return posterior_mode(grid, density); }

PosteriorEstimate build_posterior(const AdjustedSample& sample, const UnivariateKernel& ktilde,
                                  const ParamTransform& transform, int grid_size,
                                  double b_prime) {
    PosteriorEstimate est;
    est.degree = sample.degree;
    est.sample = sample;
    est.param_transform = transform;
    est.b_prime = b_prime > 0.0 ? b_prime : silverman_bandwidth(sample);

    Eigen::VectorXd zgrid = default_grid(sample, est.b_prime, grid_size);
    Eigen::VectorXd zdensity = estimate_density(sample, ktilde, est.b_prime, zgrid);

    est.grid.resize(zgrid.size());
    est.density.resize(zgrid.size());
    for (Eigen::Index g = 0; g < zgrid.size(); ++g) {
        est.grid[g] = transform.backward(zgrid[g]);
        const double jac = transform.backward_jacobian(zgrid[g]);
        est.density[g] = jac > 0.0 ? zdensity[g] / jac : 0.0;
    }
    return est;
}

}  // namespace abckit
