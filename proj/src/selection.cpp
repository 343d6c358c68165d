#include "abckit/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "abckit/regression.hpp"
#include "abckit/rng.hpp"

namespace abckit {

namespace {

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& rows) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (Eigen::Index k = 0; k < out.size(); ++k) out[k] = v[rows[static_cast<std::size_t>(k)]];
    return out;
}

}  // namespace

const StatTransform& SelectionReport::chosen_transform() const {
    if (chosen_candidate < 0 || chosen_candidate >= static_cast<int>(candidates.size()))
        throw NumericalError("no applicable transform candidate");
    return candidates[static_cast<std::size_t>(chosen_candidate)].transform;
}

double wssr_score(const Eigen::MatrixXd& stats, const Eigen::VectorXd& theta,
                  const Eigen::VectorXd& s_obs, const StatTransform& transform, double q) {
    TransformedStats ts = apply_stat_transform(stats, s_obs, transform);
    Eigen::VectorXd theta_kept = gather(theta, ts.rows);

    MultivariateKernel uniform{{KernelFamily::uniform}, static_cast<int>(stats.cols())};
    AcceptedSet accepted =
        accept_window_q(ts.stats, theta_kept, ts.s_obs, uniform, q, stats.rows());

    DesignMatrix design = build_design(accepted, 1);
    RegressionFit fit = weighted_least_squares(design, accepted.theta, accepted.weights);
    return fit.wssr / accepted.weights.sum();
}

namespace {

CandidateScore score_candidate(const Eigen::MatrixXd& stats, const Eigen::VectorXd& theta,
                               const Eigen::VectorXd& s_obs, StatTransform transform,
                               const SelectionOptions& options) {
    CandidateScore cs;
    cs.transform = std::move(transform);
    auto obstacle =
        stat_transform_obstacle(stats, s_obs, cs.transform, options.max_undefined_fraction);
    if (obstacle) {
        cs.skip_reason = *obstacle;
        return cs;
    }
    try {
        cs.wssr = wssr_score(stats, theta, s_obs, cs.transform, options.q);
        cs.applicable = true;
    } catch (const NumericalError& e) {
        cs.skip_reason = e.what();
    }
    return cs;
}

}  // namespace

int pick_candidate(const std::vector<CandidateScore>& candidates) {
    int best = -1;
    for (int i = 0; i < static_cast<int>(candidates.size()); ++i) {
        const auto& c = candidates[static_cast<std::size_t>(i)];
        if (!c.applicable) continue;
        if (best < 0) {
            best = i;
            continue;
        }
        const auto& b = candidates[static_cast<std::size_t>(best)];
        if (c.wssr < b.wssr ||
            (c.wssr == b.wssr &&
             c.transform.transformed_count() < b.transform.transformed_count()))
            best = i;
    }
    return best;
}

SelectionReport search_transforms(const Eigen::MatrixXd& stats, const Eigen::VectorXd& theta,
                                  const Eigen::VectorXd& s_obs,
                                  const SelectionOptions& options) {
    const int d = static_cast<int>(stats.cols());
    if (d < 1) throw ConfigError("transform search needs at least one statistic");
    static constexpr std::array<StatTag, 3> kOrder{StatTag::identity, StatTag::sqrt,
                                                   StatTag::log};

    SelectionReport report;
    double total = std::pow(3.0, d);
    if (total <= double(options.exhaustive_limit)) {
        const long count = static_cast<long>(total);
        for (long idx = 0; idx < count; ++idx) {
            // odometer with the first coordinate slowest
            StatTransform t = StatTransform::identity(d);
            long rem = idx;
            for (int j = d - 1; j >= 0; --j) {
                t.tags[static_cast<std::size_t>(j)] = kOrder[static_cast<std::size_t>(rem % 3)];
                rem /= 3;
            }
            report.candidates.push_back(score_candidate(stats, theta, s_obs, t, options));
        }
        report.chosen_candidate = pick_candidate(report.candidates);
        return report;
    }

    // coordinate-wise greedy: one pass, fixing each coordinate's best tag
    // given the choices so far
    report.greedy = true;
    StatTransform current = StatTransform::identity(d);
    for (int j = 0; j < d; ++j) {
        int base = static_cast<int>(report.candidates.size());
        for (StatTag tag : kOrder) {
            StatTransform t = current;
            t.tags[static_cast<std::size_t>(j)] = tag;
            report.candidates.push_back(score_candidate(stats, theta, s_obs, t, options));
        }
        int best_local = -1;
        for (int k = 0; k < 3; ++k) {
            const auto& c = report.candidates[static_cast<std::size_t>(base + k)];
            if (!c.applicable) continue;
            if (best_local < 0 ||
                c.wssr < report.candidates[static_cast<std::size_t>(base + best_local)].wssr)
                best_local = k;
        }
        if (best_local > 0) current.tags[static_cast<std::size_t>(j)] =
            kOrder[static_cast<std::size_t>(best_local)];
    }
    report.chosen_candidate = pick_candidate(report.candidates);
    return report;
}

CvResult cv_score(const Eigen::MatrixXd& stats, const Eigen::VectorXd& theta,
                  const Eigen::VectorXd& s_obs, const StatTransform& transform, int degree,
                  const SelectionOptions& options) {
    TransformedStats ts = apply_stat_transform(stats, s_obs, transform);
    Eigen::VectorXd theta_kept = gather(theta, ts.rows);
    const int d = static_cast<int>(stats.cols());
    MultivariateKernel kernel{{options.fit_kernel}, d};

    const auto accept_count =
        static_cast<Eigen::Index>(std::ceil(options.q * double(stats.rows())));
    AcceptedSet base =
        accept_window(ts.stats, theta_kept, ts.s_obs, kernel, accept_count);
    if (base.size() <= design_columns(degree, d) + 1)
        throw NumericalError("underdetermined local regression");

    // fold set: the accepted rows, subsampled deterministically when large
    std::vector<Eigen::Index> folds = base.rows;
    if (options.cv_subsample > 0 &&
        static_cast<int>(folds.size()) > options.cv_subsample) {
        RngEngine rng(derive_seed(options.seed, 0x6376));
        std::shuffle(folds.begin(), folds.end(), rng);
        folds.resize(static_cast<std::size_t>(options.cv_subsample));
        std::sort(folds.begin(), folds.end());
    }

    CvResult result;
    double sum_sq = 0.0;
    for (Eigen::Index fold : folds) {
        const Eigen::VectorXd center = ts.stats.row(fold);
        try {
            AcceptedSet local = accept_window(ts.stats, theta_kept, center, kernel,
                                              accept_count, fold);
            DesignMatrix design = build_design(local, degree);
            RegressionFit fit =
                weighted_least_squares(design, local.theta, local.weights);
            const double err = fit.alpha - theta_kept[fold];
            sum_sq += err * err;
            ++result.folds_evaluated;
        } catch (const NumericalError&) {
            ++result.folds_skipped;
        }
    }
    if (result.folds_evaluated == 0) throw NumericalError("all cross-validation folds failed");
    result.score = sum_sq / double(result.folds_evaluated);
    result.unreliable =
        result.folds_skipped * 10 > (result.folds_evaluated + result.folds_skipped);
    return result;
}

void select_degree(const Eigen::MatrixXd& stats, const Eigen::VectorXd& theta,
                   const Eigen::VectorXd& s_obs, const StatTransform& transform,
                   const SelectionOptions& options, SelectionReport& report) {
    int best = -1;
    for (int degree = 0; degree <= 2; ++degree) {
        report.cv[static_cast<std::size_t>(degree)] =
            cv_score(stats, theta, s_obs, transform, degree, options);
        report.cv_evaluated[static_cast<std::size_t>(degree)] = true;
        const double score = report.cv[static_cast<std::size_t>(degree)].score;
        if (best < 0 || score < report.cv[static_cast<std::size_t>(best)].score) best = degree;
    }
    report.chosen_degree = best;
}

}  // namespace abckit
