#include "abckit/pipeline.hpp"

#include <cmath>

namespace abckit {

namespace {

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& rows) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (Eigen::Index k = 0; k < out.size(); ++k) out[k] = v[rows[static_cast<std::size_t>(k)]];
    return out;
}

}  // namespace

ParameterEstimate estimate_parameter(const ReferenceTable& table, int param_index,
                                     const Eigen::VectorXd& s_obs,
                                     const ParamTransform& param_transform,
                                     const EstimateOptions& options) {
    if (param_index < 0 || param_index >= table.n_params())
        throw ConfigError("parameter index out of range");
    if (s_obs.size() != table.n_stats())
        throw ConfigError("observed statistics dimension mismatch");

    ParameterEstimate result;
    result.param_name = table.param_names[static_cast<std::size_t>(param_index)];
    result.param_transform = param_transform;

    const Eigen::VectorXd theta_t = param_transform.forward(table.params.col(param_index));

    SelectionOptions sel;
    sel.q = options.q;
    sel.fit_kernel = options.accept_kernel;
    sel.cv_subsample = options.cv_subsample;
    sel.seed = options.seed;
    sel.max_undefined_fraction = options.max_undefined_fraction;

    // summary-statistic transform: WSSR search unless pinned
    if (options.fixed_transform) {
        result.transform = *options.fixed_transform;
        if (static_cast<int>(result.transform.tags.size()) != table.n_stats())
            throw ConfigError("fixed transform dimension mismatch");
        auto obstacle = stat_transform_obstacle(table.stats, s_obs, result.transform,
                                                options.max_undefined_fraction);
        if (obstacle) throw NumericalError("fixed transform not usable: " + *obstacle);
    } else {
        result.selection = search_transforms(table.stats, theta_t, s_obs, sel);
        result.transform = result.selection.chosen_transform();
    }

    // regression degree: leave-one-out CV unless pinned
    if (options.fixed_degree) {
        result.degree = *options.fixed_degree;
        if (result.degree < 0 || result.degree > 2)
            throw ConfigError("regression degree must be 0, 1 or 2");
    } else {
        select_degree(table.stats, theta_t, s_obs, result.transform, sel, result.selection);
        result.degree = result.selection.chosen_degree;
    }

    // final window on the transformed scale
    TransformedStats ts = apply_stat_transform(table.stats, s_obs, result.transform);
    Eigen::VectorXd theta_kept = gather(theta_t, ts.rows);
    MultivariateKernel kernel{{options.accept_kernel}, table.n_stats()};
    AcceptedSet accepted =
        accept_window_q(ts.stats, theta_kept, ts.s_obs, kernel, options.q, table.n());

    DesignMatrix design = build_design(accepted, result.degree);
    RegressionFit fit = weighted_least_squares(design, accepted.theta, accepted.weights);
    AdjustedSample adjusted = adjust(accepted, fit);

    result.n_accepted = accepted.size();
    result.bandwidth = accepted.bandwidth.global;
    result.statistic_scales = accepted.bandwidth.scale;
    result.rank_deficient = fit.rank_deficient;

    UnivariateKernel ktilde{options.density_kernel};
    result.posterior =
        build_posterior(adjusted, ktilde, param_transform, options.grid_size);

    result.mode = result.posterior.mode();
    const std::vector<double> probs{0.025, 0.25, 0.5, 0.75, 0.975};
    auto qs = result.posterior.quantiles(probs);
    for (std::size_t i = 0; i < probs.size(); ++i) result.quantiles[probs[i]] = qs[i];
    result.ci95 = {qs.front(), qs.back()};
    return result;
}

}  // namespace abckit
