#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "abckit/rng.hpp"
#include "abckit/table.hpp"
#include "abckit/transforms.hpp"

namespace abckit {

// ---------------------------------------------------------------------------
// Gaussian location-scale model: sigma2 ~ Inv-chi2(df=1), mu | sigma2 ~
// N(0, sigma2), data x_1..x_N iid N(mu, sigma2). Statistics: sample mean and
// unbiased sample variance.
// ---------------------------------------------------------------------------

struct GaussianConfig {
    int sample_size = 50;
};

struct GaussianDraw {
    double sigma2;
    double xbar;
    double s2;
};

GaussianDraw simulate_gaussian(RngEngine& rng, const GaussianConfig& config = {});
//! test hook: pin sigma2, draw mu | sigma2 and the data
GaussianDraw simulate_gaussian_given_sigma2(RngEngine& rng, double sigma2,
                                            const GaussianConfig& config = {});

//! Marginal posterior of sigma2 under the conjugate Normal-Inv-chi2 update:
//! a scaled inverse chi-square law with closed-form density and quantiles.
struct ExactGaussianPosterior {
    double df;     // nu_n
    double scale;  // sigma_n^2

    double pdf(double sigma2) const;
    double cdf(double sigma2) const;
    double quantile(double p) const;
};

struct GaussianPrior {
    double nu0 = 1.0;
    double s0sq = 1.0;
    double kappa0 = 1.0;
    double mu0 = 0.0;
};

ExactGaussianPosterior exact_gaussian_posterior(double xbar, double s2, int n,
                                                const GaussianPrior& prior = {});

// ---------------------------------------------------------------------------
// Coalescent model: N ~ U(0, Nmax), inter-coalescence times T_k ~
// Exp(k(k-1)/(2N)), uniform pair merges, mutations as a Poisson process of
// rate u per lineage per generation under infinitely-many-sites. Statistics:
// segregating sites S and the mean root-to-leaf mutation count rho.
// ---------------------------------------------------------------------------

struct CoalescentConfig {
    int sample_size = 10;             // m sequences
    double mutation_rate = 1.8e-3;    // u, per sequence per generation
    double pop_size_max = 10000.0;    // prior upper bound for N
};

struct CoalescentDraw {
    double tmrca;
    double pop_size;
    double segregating_sites;  // S
    double rho;                // mean ancestor-to-leaf mutation count
};

CoalescentDraw simulate_coalescent(RngEngine& rng, const CoalescentConfig& config = {});
//! test hook: pin the population size
CoalescentDraw simulate_coalescent_given_popsize(RngEngine& rng, double pop_size,
                                                 const CoalescentConfig& config = {});

// ---------------------------------------------------------------------------
// Birth-death-mutation process: per-capita birth rate alpha, death rate delta,
// mutation rate theta under infinitely-many-alleles; trajectories start from a
// single case, restart on extinction, and stop at N = stop_population. The
// prior couples theta ~ N(0.20, 0.07^2) with a Dir(1,1,1) draw over the
// normalized rates conditioned on delta < alpha. Statistics: number of
// distinct genotypes G and homozygosity H in a sample of 473 without
// replacement.
// ---------------------------------------------------------------------------

struct BirthDeathConfig {
    std::int64_t stop_population = 10000;
    int sample_size = 473;
    double theta_mean = 0.20;
    double theta_sd = 0.07;
    std::int64_t max_prior_rejections = 1000000;
    std::int64_t max_restarts = 1000000;
};

struct BirthDeathRates {
    double alpha;
    double delta;
    double theta;
};

struct BirthDeathDraw {
    BirthDeathRates rates;
    double genotypes;     // G
    double homozygosity;  // H
    std::int64_t births = 0;
    std::int64_t deaths = 0;
    std::int64_t restarts = 0;
};

BirthDeathRates draw_birthdeath_rates(RngEngine& rng, const BirthDeathConfig& config = {});
BirthDeathDraw simulate_birthdeath(RngEngine& rng, const BirthDeathConfig& config = {});
//! test hook: pin the rate triple
BirthDeathDraw simulate_birthdeath_given_rates(RngEngine& rng, const BirthDeathRates& rates,
                                               const BirthDeathConfig& config = {});

// ---------------------------------------------------------------------------
// Model registry: names the parameter/statistic columns, the parameter
// transforms implied by the prior support, and a deterministic table builder
// (row i depends only on (seed, i), so tables are identical for any worker
// count).
// ---------------------------------------------------------------------------

struct ModelInfo {
    std::string name;
    std::vector<std::string> param_names;
    std::vector<std::string> stat_names;
    std::vector<ParamTransform> param_transforms;
    std::function<ReferenceTable(std::uint64_t seed, Eigen::Index n)> simulate_table;
};

const ModelInfo& model_by_name(const std::string& name);
std::vector<std::string> model_names();

}  // namespace abckit
