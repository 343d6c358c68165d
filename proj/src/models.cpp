#include "abckit/models.hpp"

#include <boost/math/distributions/inverse_gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "abckit/parallel.hpp"

namespace abckit {

// ---------------------------------------------------------------------------
// Gaussian
// ---------------------------------------------------------------------------

namespace {

GaussianDraw gaussian_sample_stats(RngEngine& rng, double sigma2, const GaussianConfig& config) {
    std::normal_distribution<double> stdnorm(0.0, 1.0);
    const double sigma = std::sqrt(sigma2);
    const double mu = sigma * stdnorm(rng);
    const int n = config.sample_size;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = mu + sigma * stdnorm(rng);
        sum += x;
        sumsq += x * x;
    }
    const double xbar = sum / n;
    const double s2 = std::max(0.0, (sumsq - n * xbar * xbar) / (n - 1));
    return {sigma2, xbar, s2};
}

}  // namespace

GaussianDraw simulate_gaussian(RngEngine& rng, const GaussianConfig& config) {
    std::normal_distribution<double> stdnorm(0.0, 1.0);
    // Inv-chi2(1): reciprocal of a chi-square(1) draw
    double z = stdnorm(rng);
    while (z == 0.0) z = stdnorm(rng);
    return gaussian_sample_stats(rng, 1.0 / (z * z), config);
}

GaussianDraw simulate_gaussian_given_sigma2(RngEngine& rng, double sigma2,
                                            const GaussianConfig& config) {
    if (!(sigma2 > 0.0)) throw ConfigError("sigma2 must be positive");
    return gaussian_sample_stats(rng, sigma2, config);
}

ExactGaussianPosterior exact_gaussian_posterior(double xbar, double s2, int n,
                                                const GaussianPrior& prior) {
    if (!(s2 > 0.0)) throw ConfigError("sample variance must be positive");
    if (n < 2) throw ConfigError("need at least two observations");
    ExactGaussianPosterior post;
    post.df = prior.nu0 + n;
    const double shift = xbar - prior.mu0;
    post.scale = (prior.nu0 * prior.s0sq + (n - 1) * s2 +
                  (prior.kappa0 * n / (prior.kappa0 + n)) * shift * shift) /
                 post.df;
    return post;
}

namespace {
boost::math::inverse_gamma_distribution<double> as_inverse_gamma(
    const ExactGaussianPosterior& post) {
    return boost::math::inverse_gamma_distribution<double>(post.df / 2.0,
                                                           post.df * post.scale / 2.0);
}
}  // namespace

double ExactGaussianPosterior::pdf(double sigma2) const {
    if (!(sigma2 > 0.0)) return 0.0;
    return boost::math::pdf(as_inverse_gamma(*this), sigma2);
}

double ExactGaussianPosterior::cdf(double sigma2) const {
    if (!(sigma2 > 0.0)) return 0.0;
    return boost::math::cdf(as_inverse_gamma(*this), sigma2);
}

double ExactGaussianPosterior::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("quantile probability must lie in (0,1)");
    return boost::math::quantile(as_inverse_gamma(*this), p);
}

// ---------------------------------------------------------------------------
// Coalescent
// ---------------------------------------------------------------------------

namespace {

CoalescentDraw run_coalescent(RngEngine& rng, double pop_size, const CoalescentConfig& config) {
    const int m = config.sample_size;
    if (m < 2) throw ConfigError("coalescent sample size must be at least 2");
    CoalescentDraw draw{};
    draw.pop_size = pop_size;

    std::vector<int> leaves(static_cast<std::size_t>(m), 1);  // sample leaves under each lineage
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double tmrca = 0.0;
    long total_mutations = 0;
    long path_mutation_sum = 0;  // each mutation counted once per leaf below it

    for (int k = m; k >= 2; --k) {
        const double rate = double(k) * double(k - 1) / (2.0 * pop_size);
        std::exponential_distribution<double> exp_k(rate);
        const double t_k = exp_k(rng);
        tmrca += t_k;

        if (config.mutation_rate > 0.0) {
            std::poisson_distribution<long> pois(config.mutation_rate * t_k);
            for (int l = 0; l < k; ++l) {
                const long hits = pois(rng);
                if (hits > 0) {
                    total_mutations += hits;
                    path_mutation_sum += hits * leaves[static_cast<std::size_t>(l)];
                }
            }
        }

        // merge a uniformly chosen pair of extant lineages
        int a = static_cast<int>(unif(rng) * k);
        a = std::min(a, k - 1);
        int b = static_cast<int>(unif(rng) * (k - 1));
        b = std::min(b, k - 2);
        if (b >= a) ++b;
        leaves[static_cast<std::size_t>(a)] += leaves[static_cast<std::size_t>(b)];
        leaves[static_cast<std::size_t>(b)] = leaves[static_cast<std::size_t>(k - 1)];
        leaves.pop_back();
    }

    draw.tmrca = tmrca;
    draw.segregating_sites = double(total_mutations);
    draw.rho = double(path_mutation_sum) / double(m);
    return draw;
}

}  // namespace

CoalescentDraw simulate_coalescent(RngEngine& rng, const CoalescentConfig& config) {
    std::uniform_real_distribution<double> unif(0.0, config.pop_size_max);
    double pop = unif(rng);
    while (pop <= 0.0) pop = unif(rng);
    return run_coalescent(rng, pop, config);
}

CoalescentDraw simulate_coalescent_given_popsize(RngEngine& rng, double pop_size,
                                                 const CoalescentConfig& config) {
    if (!(pop_size > 0.0)) throw ConfigError("population size must be positive");
    return run_coalescent(rng, pop_size, config);
}

// ---------------------------------------------------------------------------
// Birth-death-mutation
// ---------------------------------------------------------------------------

BirthDeathRates draw_birthdeath_rates(RngEngine& rng, const BirthDeathConfig& config) {
    std::normal_distribution<double> theta_prior(config.theta_mean, config.theta_sd);
    std::exponential_distribution<double> exp1(1.0);
    for (std::int64_t it = 0; it < config.max_prior_rejections; ++it) {
        const double theta = theta_prior(rng);
        const double ea = exp1(rng), ed = exp1(rng), et = exp1(rng);
        const double tot = ea + ed + et;
        const double pa = ea / tot, pd = ed / tot, pt = et / tot;
        if (theta <= 0.0 || pd >= pa || pt <= 0.0) continue;
        return {theta * pa / pt, theta * pd / pt, theta};
    }
    throw NumericalError("rate prior rejection loop exceeded its cap");
}

BirthDeathDraw simulate_birthdeath_given_rates(RngEngine& rng, const BirthDeathRates& rates,
                                               const BirthDeathConfig& config) {
    if (!(rates.alpha > 0.0) || rates.delta < 0.0 || rates.theta < 0.0)
        throw ConfigError("birth-death rates out of range");
    const double total = rates.alpha + rates.delta + rates.theta;
    const double birth_cut = rates.alpha / total;
    const double death_cut = (rates.alpha + rates.delta) / total;
    const auto stop = static_cast<std::size_t>(config.stop_population);

    BirthDeathDraw draw{};
    draw.rates = rates;
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<std::int64_t> population;
    population.reserve(stop + 1);
    for (;;) {
        population.assign(1, 0);
        std::int64_t next_genotype = 1;
        std::int64_t births = 0, deaths = 0;
        bool extinct = false;
        while (population.size() < stop) {
            const double u = unif(rng);
            const auto idx =
                std::min(static_cast<std::size_t>(unif(rng) * double(population.size())),
                         population.size() - 1);
            if (u < birth_cut) {
                population.push_back(population[idx]);
                ++births;
            } else if (u < death_cut) {
                population[idx] = population.back();
                population.pop_back();
                ++deaths;
                if (population.empty()) {
                    extinct = true;
                    break;
                }
            } else {
                population[idx] = next_genotype++;
            }
        }
        if (!extinct) {
            draw.births = births;
            draw.deaths = deaths;
            break;
        }
        if (++draw.restarts > config.max_restarts)
            throw NumericalError("birth-death restart cap exceeded");
    }

    // sample without replacement, then count genotype multiplicities
    const auto n = static_cast<std::size_t>(config.sample_size);
    if (n > population.size()) throw ConfigError("sample size exceeds final population");
    std::vector<std::uint32_t> index(population.size());
    std::iota(index.begin(), index.end(), 0u);
    std::vector<std::int64_t> sampled(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j =
            i + std::min(static_cast<std::size_t>(unif(rng) * double(index.size() - i)),
                         index.size() - i - 1);
        std::swap(index[i], index[j]);
        sampled[i] = population[index[i]];
    }
    std::sort(sampled.begin(), sampled.end());
    double h = 0.0;
    long g = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && sampled[j] == sampled[i]) ++j;
        const double frac = double(j - i) / double(n);
        h += frac * frac;
        ++g;
        i = j;
    }
    draw.genotypes = double(g);
    draw.homozygosity = h;
    return draw;
}

BirthDeathDraw simulate_birthdeath(RngEngine& rng, const BirthDeathConfig& config) {
    return simulate_birthdeath_given_rates(rng, draw_birthdeath_rates(rng, config), config);
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

namespace {

ReferenceTable make_table(
    const ModelInfo& info, Eigen::Index n,
    const std::function<void(RngEngine&, ReferenceTable&, Eigen::Index)>& fill_row,
    std::uint64_t seed) {
    ReferenceTable table;
    table.param_names = info.param_names;
    table.stat_names = info.stat_names;
    table.params.resize(n, static_cast<Eigen::Index>(info.param_names.size()));
    table.stats.resize(n, static_cast<Eigen::Index>(info.stat_names.size()));
    // rows write disjoint cells, so the fill can run on the worker pool
    parallel_for(n, [&](std::int64_t i) {
        RngEngine rng = make_engine(seed, static_cast<std::uint64_t>(i));
        fill_row(rng, table, i);
    });
    return table;
}

std::vector<ModelInfo> build_registry() {
    std::vector<ModelInfo> registry;

    {
        ModelInfo info;
        info.name = "gaussian";
        info.param_names = {"sigma2"};
        info.stat_names = {"xbar", "s2"};
        info.param_transforms = {ParamTransform::log()};
        info.simulate_table = [info](std::uint64_t seed, Eigen::Index n) {
            return make_table(
                info, n,
                [](RngEngine& rng, ReferenceTable& t, Eigen::Index i) {
                    const GaussianDraw d = simulate_gaussian(rng);
                    t.params(i, 0) = d.sigma2;
                    t.stats(i, 0) = d.xbar;
                    t.stats(i, 1) = d.s2;
                },
                seed);
        };
        registry.push_back(std::move(info));
    }
    {
        ModelInfo info;
        info.name = "coalescent";
        info.param_names = {"tmrca"};
        info.stat_names = {"S", "rho"};
        info.param_transforms = {ParamTransform::log()};
        info.simulate_table = [info](std::uint64_t seed, Eigen::Index n) {
            return make_table(
                info, n,
                [](RngEngine& rng, ReferenceTable& t, Eigen::Index i) {
                    const CoalescentDraw d = simulate_coalescent(rng);
                    t.params(i, 0) = d.tmrca;
                    t.stats(i, 0) = d.segregating_sites;
                    t.stats(i, 1) = d.rho;
                },
                seed);
        };
        registry.push_back(std::move(info));
    }
    {
        ModelInfo info;
        info.name = "birthdeath";
        info.param_names = {"transmission_rate", "doubling_time", "r0"};
        info.stat_names = {"G", "H"};
        info.param_transforms = {ParamTransform::log(), ParamTransform::log(),
                                 ParamTransform::log()};
        info.simulate_table = [info](std::uint64_t seed, Eigen::Index n) {
            return make_table(
                info, n,
                [](RngEngine& rng, ReferenceTable& t, Eigen::Index i) {
                    const BirthDeathDraw d = simulate_birthdeath(rng);
                    const double net = d.rates.alpha - d.rates.delta;
                    t.params(i, 0) = net;
                    t.params(i, 1) = std::log(2.0) / net;
                    t.params(i, 2) = d.rates.alpha / d.rates.delta;
                    t.stats(i, 0) = d.genotypes;
                    t.stats(i, 1) = d.homozygosity;
                },
                seed);
        };
        registry.push_back(std::move(info));
    }
    return registry;
}

}  // namespace

const ModelInfo& model_by_name(const std::string& name) {
    static const std::vector<ModelInfo> registry = build_registry();
    for (const auto& info : registry)
        if (info.name == name) return info;
    throw ConfigError("unknown model: " + name);
}

std::vector<std::string> model_names() { return {"gaussian", "coalescent", "birthdeath"}; }

}  // namespace abckit
