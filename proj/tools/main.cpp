// abckit command-line front end: simulate reference tables, estimate partial
// posteriors with transform/degree selection, replicate whole runs, and
// evaluate the bias/variance theory harness.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "abckit/models.hpp"
#include "abckit/parallel.hpp"
#include "abckit/pipeline.hpp"
#include "abckit/theory.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace abckit::cli {

struct RunConfig {
    std::string model;
    std::string table_path;
    std::string obs_json;
    std::string out_dir;
    std::int64_t n = 20000;
    std::int64_t replicates = 100;
    std::optional<std::uint64_t> seed;  // mandatory, no wall-clock default
    double accept_q = 0.025;
    std::string kernel = "epanechnikov";
    std::string density_kernel = "epanechnikov";
    std::string transform = "auto";  // auto | fixed:<spec>
    std::string degree = "auto";     // auto | 0 | 1 | 2
    int grid_size = 512;
    int cv_subsample = 1000;
    double max_undefined_fraction = 0.1;
    std::vector<std::string> params;              // subset to estimate (default: all)
    std::map<std::string, std::string> param_transforms;  // name -> identity|log|logit:lo,hi

    json to_json() const {
        json j;
        j["model"] = model;
        j["table"] = table_path;
        j["obs"] = obs_json.empty() ? json() : json::parse(obs_json);
        j["out"] = out_dir;
        j["n"] = n;
        j["replicates"] = replicates;
        j["seed"] = seed ? json(*seed) : json();
        j["accept_q"] = accept_q;
        j["kernel"] = kernel;
        j["density_kernel"] = density_kernel;
        j["transform"] = transform;
        j["degree"] = degree;
        j["grid_size"] = grid_size;
        j["cv_subsample"] = cv_subsample;
        j["max_undefined_fraction"] = max_undefined_fraction;
        j["params"] = params;
        j["param_transforms"] = param_transforms;
        return j;
    }

    std::uint64_t hash() const { return fnv1a(to_json().dump()); }
    std::string hash_hex() const {
        char buf[20];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(hash()));
        return buf;
    }

    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read config file " + path);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ConfigError("bad config JSON: " + std::string(e.what()));
        }
        if (j.contains("model")) model = j["model"].get<std::string>();
        if (j.contains("table")) table_path = j["table"].get<std::string>();
        if (j.contains("obs") && !j["obs"].is_null()) obs_json = j["obs"].dump();
        if (j.contains("out")) out_dir = j["out"].get<std::string>();
        if (j.contains("n")) n = j["n"].get<std::int64_t>();
        if (j.contains("replicates")) replicates = j["replicates"].get<std::int64_t>();
        if (j.contains("seed") && !j["seed"].is_null()) seed = j["seed"].get<std::uint64_t>();
        if (j.contains("accept_q")) accept_q = j["accept_q"].get<double>();
        if (j.contains("kernel")) kernel = j["kernel"].get<std::string>();
        if (j.contains("density_kernel"))
            density_kernel = j["density_kernel"].get<std::string>();
        if (j.contains("transform")) transform = j["transform"].get<std::string>();
        if (j.contains("degree")) degree = j["degree"].is_string()
                                               ? j["degree"].get<std::string>()
                                               : std::to_string(j["degree"].get<int>());
        if (j.contains("grid_size")) grid_size = j["grid_size"].get<int>();
        if (j.contains("cv_subsample")) cv_subsample = j["cv_subsample"].get<int>();
        if (j.contains("max_undefined_fraction"))
            max_undefined_fraction = j["max_undefined_fraction"].get<double>();
        if (j.contains("params")) params = j["params"].get<std::vector<std::string>>();
        if (j.contains("param_transforms"))
            param_transforms =
                j["param_transforms"].get<std::map<std::string, std::string>>();
    }
};

void require_seed(const RunConfig& config) {
    if (!config.seed) throw ConfigError("--seed is mandatory (runs must be reproducible)");
}

void require_out(const RunConfig& config) {
    if (config.out_dir.empty()) throw ConfigError("--out directory is required");
    fs::create_directories(config.out_dir);
}

void validate_common(const RunConfig& config) {
    if (!(config.accept_q > 0.0 && config.accept_q < 1.0))
        throw ConfigError("--accept-q must lie in (0,1)");
    if (config.n < 10) throw ConfigError("--n must be at least 10");
    kernel_family_from_name(config.kernel);
    kernel_family_from_name(config.density_kernel);
}

ParamTransform parse_param_transform(const std::string& spec) {
    if (spec == "identity" || spec == "id") return ParamTransform::identity();
    if (spec == "log") return ParamTransform::log();
    if (spec.rfind("logit:", 0) == 0) {
        const auto rest = spec.substr(6);
        const auto comma = rest.find(',');
        if (comma == std::string::npos)
            throw ConfigError("logit transform needs bounds, e.g. logit:0,1");
        return ParamTransform::logit(std::stod(rest.substr(0, comma)),
                                     std::stod(rest.substr(comma + 1)));
    }
    throw ConfigError("unknown parameter transform: " + spec);
}

// observed statistics from the obs JSON, as a vector ordered like stat_names
Eigen::VectorXd parse_obs(const std::string& obs_json,
                          const std::vector<std::string>& stat_names) {
    if (obs_json.empty()) throw ConfigError("--obs is required for estimation");
    json j;
    try {
        j = json::parse(obs_json);
    } catch (const json::exception& e) {
        throw ConfigError("bad --obs JSON: " + std::string(e.what()));
    }
    Eigen::VectorXd obs(static_cast<Eigen::Index>(stat_names.size()));
    if (j.is_array()) {
        if (j.size() != stat_names.size())
            throw ConfigError("observed statistics dimension mismatch");
        for (std::size_t i = 0; i < stat_names.size(); ++i) obs[static_cast<Eigen::Index>(i)] = j[i].get<double>();
        return obs;
    }
    if (j.is_object()) {
        for (std::size_t i = 0; i < stat_names.size(); ++i) {
            if (!j.contains(stat_names[i]))
                throw ConfigError("observed statistics missing '" + stat_names[i] + "'");
            obs[static_cast<Eigen::Index>(i)] = j[stat_names[i]].get<double>();
        }
        return obs;
    }
    throw ConfigError("--obs must be a JSON array or object");
}

struct LoadedTable {
    ReferenceTable table;
    std::string model_name;  // empty when external
};

LoadedTable load_or_simulate(const RunConfig& config, std::uint64_t seed) {
    LoadedTable lt;
    if (!config.table_path.empty()) {
        lt.table = read_reference_table_csv(config.table_path);
        lt.model_name = config.model;  // may still name the generating model
        return lt;
    }
    if (config.model.empty()) throw ConfigError("either --table or --model is required");
    const ModelInfo& info = model_by_name(config.model);
    lt.table = info.simulate_table(seed, config.n);
    lt.model_name = config.model;
    return lt;
}

//! Parameter transform policy: explicit override, else prior support via the
//! model registry, else identity for external tables.
ParamTransform transform_for_param(const RunConfig& config, const std::string& model_name,
                                   const ReferenceTable& table, int param_idx) {
    const std::string& name = table.param_names[static_cast<std::size_t>(param_idx)];
    auto it = config.param_transforms.find(name);
    if (it != config.param_transforms.end() && it->second != "auto")
        return parse_param_transform(it->second);
    if (!model_name.empty()) {
        const ModelInfo& info = model_by_name(model_name);
        for (std::size_t j = 0; j < info.param_names.size(); ++j)
            if (info.param_names[j] == name) return info.param_transforms[j];
    }
    return ParamTransform::identity();
}

EstimateOptions make_options(const RunConfig& config, std::uint64_t seed) {
    EstimateOptions opt;
    opt.q = config.accept_q;
    opt.accept_kernel = kernel_family_from_name(config.kernel);
    opt.density_kernel = kernel_family_from_name(config.density_kernel);
    opt.grid_size = config.grid_size;
    opt.cv_subsample = config.cv_subsample;
    opt.max_undefined_fraction = config.max_undefined_fraction;
    opt.seed = seed;
    if (config.transform != "auto") {
        if (config.transform.rfind("fixed:", 0) != 0)
            throw ConfigError("--transform must be auto or fixed:<spec>");
        opt.fixed_transform.emplace();  // parsed later when d is known
    }
    if (config.degree != "auto") {
        if (config.degree != "0" && config.degree != "1" && config.degree != "2")
            throw ConfigError("--degree must be auto, 0, 1 or 2");
        opt.fixed_degree = config.degree[0] - '0';
    }
    return opt;
}

void finalize_transform(const RunConfig& config, EstimateOptions& opt, int d) {
    if (opt.fixed_transform)
        opt.fixed_transform = StatTransform::parse(config.transform.substr(6), d);
}

json selection_to_json(const SelectionReport& report,
                       const std::vector<std::string>& stat_names) {
    json j;
    j["stat_names"] = stat_names;
    j["greedy"] = report.greedy;
    json cands = json::array();
    for (const auto& c : report.candidates) {
        json jc;
        jc["transform"] = c.transform.spec();
        jc["applicable"] = c.applicable;
        if (c.applicable)
            jc["wssr"] = c.wssr;
        else
            jc["skip_reason"] = c.skip_reason;
        cands.push_back(jc);
    }
    j["candidates"] = cands;
    if (report.chosen_candidate >= 0)
        j["chosen_transform"] = report.chosen_transform().spec();
    json cv = json::array();
    for (int deg = 0; deg <= 2; ++deg) {
        const auto& r = report.cv[static_cast<std::size_t>(deg)];
        if (!report.cv_evaluated[static_cast<std::size_t>(deg)]) continue;
        json jc;
        jc["degree"] = deg;
        jc["score"] = r.score;
        jc["folds_evaluated"] = r.folds_evaluated;
        jc["folds_skipped"] = r.folds_skipped;
        jc["unreliable"] = r.unreliable;
        cv.push_back(jc);
    }
    j["cv"] = cv;
    if (report.chosen_degree >= 0) j["chosen_degree"] = report.chosen_degree;
    return j;
}

json summary_to_json(const RunConfig& config, std::uint64_t seed, const std::string& model,
                     const ParameterEstimate& est) {
    json j;
    j["model"] = model;
    j["param"] = est.param_name;
    j["seed"] = seed;
    j["config_hash"] = config.hash_hex();
    j["transform"] = est.transform.spec();
    j["degree"] = est.degree;
    j["param_transform"] = est.param_transform.name();
    j["mode"] = est.mode;
    json q;
    for (const auto& [p, v] : est.quantiles) q[format_double(p)] = v;
    j["quantiles"] = q;
    j["ci95"] = {est.ci95[0], est.ci95[1]};
    j["n_accepted"] = est.n_accepted;
    j["bandwidth"] = est.bandwidth;
    j["b_prime"] = est.posterior.b_prime;
    j["rank_deficient"] = est.rank_deficient;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
    if (!out) throw ConfigError("failed writing " + path);
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_density_csv(const std::string& path, const RunConfig& config, std::uint64_t seed,
                       const PosteriorEstimate& est) {
    std::string text = "# config_hash=" + config.hash_hex() + " seed=" + std::to_string(seed) +
                       "\n"
                       "theta,density\n";
    for (Eigen::Index i = 0; i < est.grid.size(); ++i)
        text += format_double(est.grid[i]) + "," + format_double(est.density[i]) + "\n";
    write_text(path, text);
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_simulate(const RunConfig& config) {
    require_seed(config);
    require_out(config);
    validate_common(config);
    if (config.model.empty()) throw ConfigError("--model is required for simulate");
    const ModelInfo& info = model_by_name(config.model);
    ReferenceTable table = info.simulate_table(*config.seed, config.n);

    const fs::path dir(config.out_dir);
    write_reference_table_csv(table, (dir / "table.csv").string());
    json sidecar;
    sidecar["model"] = config.model;
    sidecar["seed"] = *config.seed;
    sidecar["n"] = config.n;
    sidecar["param_names"] = table.param_names;
    sidecar["stat_names"] = table.stat_names;
    sidecar["config_hash"] = config.hash_hex();
    sidecar["conventions"] = {
        {"variance", "unbiased (n-1) divisor"},
        {"distance", "Euclidean norm of D^{-1}(s_i - s_obs), D = per-statistic sd"},
        {"quantile", "lower empirical quantile, order statistic at ceil(q n)"}};
    write_json((dir / "table.json").string(), sidecar);
    std::cout << "wrote " << (dir / "table.csv").string() << " (" << table.n() << " rows)\n";
    return 0;
}

std::vector<int> select_param_indices(const RunConfig& config, const ReferenceTable& table) {
    std::vector<int> idx;
    if (config.params.empty()) {
        for (int j = 0; j < table.n_params(); ++j) idx.push_back(j);
    } else {
        for (const auto& name : config.params) idx.push_back(table.param_index(name));
    }
    return idx;
}

int cmd_estimate(const RunConfig& config) {
    require_seed(config);
    require_out(config);
    validate_common(config);
    LoadedTable lt = load_or_simulate(config, *config.seed);
    Eigen::VectorXd obs = parse_obs(config.obs_json, lt.table.stat_names);
    EstimateOptions opt = make_options(config, *config.seed);
    finalize_transform(config, opt, lt.table.n_stats());

    const fs::path dir(config.out_dir);
    for (int param_idx : select_param_indices(config, lt.table)) {
        ParamTransform pt = transform_for_param(config, lt.model_name, lt.table, param_idx);
        ParameterEstimate est = estimate_parameter(lt.table, param_idx, obs, pt, opt);
        const std::string& name = est.param_name;
        write_density_csv((dir / (name + "_density.csv")).string(), config, *config.seed,
                          est.posterior);
        write_json((dir / (name + "_summary.json")).string(),
                   summary_to_json(config, *config.seed, lt.model_name, est));
        json sel = selection_to_json(est.selection, lt.table.stat_names);
        sel["config_hash"] = config.hash_hex();
        sel["seed"] = *config.seed;
        write_json((dir / (name + "_selection.json")).string(), sel);
        std::cout << name << ": transform=" << est.transform.spec()
                  << " degree=" << est.degree << " mode=" << format_double(est.mode)
                  << " ci95=[" << format_double(est.ci95[0]) << ", "
                  << format_double(est.ci95[1]) << "]"
                  << (est.rank_deficient ? " (rank-deficient fit)" : "") << "\n";
    }
    return 0;
}

int cmd_select(const RunConfig& config) {
    require_seed(config);
    require_out(config);
    validate_common(config);
    LoadedTable lt = load_or_simulate(config, *config.seed);
    Eigen::VectorXd obs = parse_obs(config.obs_json, lt.table.stat_names);

    SelectionOptions sel;
    sel.q = config.accept_q;
    sel.fit_kernel = kernel_family_from_name(config.kernel);
    sel.cv_subsample = config.cv_subsample;
    sel.seed = *config.seed;
    sel.max_undefined_fraction = config.max_undefined_fraction;

    const fs::path dir(config.out_dir);
    for (int param_idx : select_param_indices(config, lt.table)) {
        ParamTransform pt = transform_for_param(config, lt.model_name, lt.table, param_idx);
        Eigen::VectorXd theta_t = pt.forward(lt.table.params.col(param_idx));
        SelectionReport report = search_transforms(lt.table.stats, theta_t, obs, sel);
        select_degree(lt.table.stats, theta_t, obs, report.chosen_transform(), sel, report);

        const std::string& name = lt.table.param_names[static_cast<std::size_t>(param_idx)];
        json j = selection_to_json(report, lt.table.stat_names);
        j["param"] = name;
        j["config_hash"] = config.hash_hex();
        j["seed"] = *config.seed;
        write_json((dir / (name + "_selection.json")).string(), j);

        // Table-1-style matrix on stdout
        std::cout << name << " WSSR per candidate transform:\n";
        for (const auto& c : report.candidates) {
            std::cout << "  " << c.transform.spec() << ": ";
            if (c.applicable)
                std::cout << format_double(c.wssr);
            else
                std::cout << "skipped (" << c.skip_reason << ")";
            std::cout << "\n";
        }
        std::cout << "  chosen: " << report.chosen_transform().spec() << "\n";
        std::cout << name << " leave-one-out CV (degrees 0,1,2): ";
        for (int deg = 0; deg <= 2; ++deg)
            std::cout << format_double(report.cv[static_cast<std::size_t>(deg)].score)
                      << (deg < 2 ? ", " : "");
        std::cout << " -> degree " << report.chosen_degree << "\n";
    }
    return 0;
}

int cmd_replicate(const RunConfig& config) {
    require_seed(config);
    require_out(config);
    validate_common(config);
    if (config.model.empty()) throw ConfigError("--model is required for replicate");
    if (config.replicates < 1) throw ConfigError("--replicates must be at least 1");
    const ModelInfo& info = model_by_name(config.model);
    Eigen::VectorXd obs = parse_obs(config.obs_json, info.stat_names);

    const auto R = static_cast<std::size_t>(config.replicates);
    std::vector<int> param_idx;
    {
        ReferenceTable probe;
        probe.param_names = info.param_names;
        probe.stat_names = info.stat_names;
        probe.params.resize(0, static_cast<Eigen::Index>(info.param_names.size()));
        probe.stats.resize(0, static_cast<Eigen::Index>(info.stat_names.size()));
        param_idx = select_param_indices(config, probe);
    }

    struct Row {
        std::uint64_t seed;
        std::vector<ParameterEstimate> estimates;
    };
    std::vector<Row> rows(R);

    for (std::size_t r = 0; r < R; ++r) {
        const std::uint64_t rep_seed = derive_seed(*config.seed, r);
        rows[r].seed = rep_seed;
        ReferenceTable table = info.simulate_table(rep_seed, config.n);
        EstimateOptions opt = make_options(config, rep_seed);
        finalize_transform(config, opt, table.n_stats());
        for (int pj : param_idx) {
            ParamTransform pt = transform_for_param(config, config.model, table, pj);
            rows[r].estimates.push_back(estimate_parameter(table, pj, obs, pt, opt));
        }
    }

    const fs::path dir(config.out_dir);
    const std::vector<double> probs{0.025, 0.25, 0.5, 0.75, 0.975};
    std::string csv = "# config_hash=" + config.hash_hex() + " seed=" +
                      std::to_string(*config.seed) +
                      "\n"
                      "replicate,seed,param,transform,degree,mode,q0.025,q0.25,q0.5,q0.75,q0."
                      "975\n";
    std::map<std::string, std::map<std::string, int>> transform_tally;
    std::map<std::string, std::map<std::string, int>> degree_tally;
    for (std::size_t r = 0; r < R; ++r) {
        for (const auto& est : rows[r].estimates) {
            csv += std::to_string(r) + "," + std::to_string(rows[r].seed) + "," +
                   est.param_name + "," + est.transform.spec() + "," +
                   std::to_string(est.degree) + "," + format_double(est.mode);
            for (double p : probs) csv += "," + format_double(est.quantiles.at(p));
            csv += "\n";
            ++transform_tally[est.param_name][est.transform.spec()];
            ++degree_tally[est.param_name][std::to_string(est.degree)];
        }
    }
    write_text((dir / "replicate_quantiles.csv").string(), csv);

    json tally;
    tally["config_hash"] = config.hash_hex();
    tally["seed"] = *config.seed;
    tally["replicates"] = config.replicates;
    tally["transform_counts"] = transform_tally;
    tally["degree_counts"] = degree_tally;
    write_json((dir / "replicate_tally.json").string(), tally);
    std::cout << "wrote " << (dir / "replicate_quantiles.csv").string() << " (" << R
              << " replicates)\n";
    for (const auto& [param, counts] : degree_tally) {
        std::cout << param << " degree tally:";
        for (const auto& [deg, cnt] : counts) std::cout << " " << deg << "=" << cnt;
        std::cout << "\n";
    }
    return 0;
}

struct TheoryArgs {
    std::string analytic = "gauss-linear";
    double theta = 0.3;
    std::vector<double> s_obs{0.5};
    std::vector<double> scale{1.0};
    bool sweep = false;
    std::vector<std::int64_t> sweep_n{10000, 100000};
    std::vector<double> sweep_b{0.2, 0.3};
    std::vector<int> sweep_degrees{0, 1, 2};
    int sweep_replicates = 100;
    double b_prime_ratio = 1.0;  // b' = ratio * b
};

int cmd_theory(const RunConfig& config, const TheoryArgs& args) {
    require_seed(config);
    require_out(config);
    const AnalyticModel& model = analytic_model_by_name(args.analytic);
    Eigen::VectorXd s_obs =
        Eigen::Map<const Eigen::VectorXd>(args.s_obs.data(),
                                          static_cast<Eigen::Index>(args.s_obs.size()));
    Eigen::VectorXd scale = Eigen::Map<const Eigen::VectorXd>(
        args.scale.data(), static_cast<Eigen::Index>(args.scale.size()));
    if (s_obs.size() != model.dim || scale.size() != model.dim)
        throw ConfigError("analytic model dimension mismatch");

    TheoryConstants tc = constants(model, s_obs, args.theta, scale);
    json j;
    j["analytic_model"] = args.analytic;
    j["theta"] = args.theta;
    j["config_hash"] = config.hash_hex();
    j["seed"] = *config.seed;
    j["C1"] = tc.c1;
    j["C2_0"] = tc.c2_0;
    j["C2_1"] = tc.c2_1;
    j["C2_2"] = tc.c2_2;
    j["C3"] = tc.c3;
    j["mu2_K"] = tc.mu2_k;
    j["mu2_Ktilde"] = tc.mu2_ktilde;
    j["R_K"] = tc.r_k;
    j["R_Ktilde"] = tc.r_ktilde;
    std::cout << j.dump(2) << "\n";
    const fs::path dir(config.out_dir);
    write_json((dir / "theory_constants.json").string(), j);

    if (args.sweep) {
        std::string csv = "# config_hash=" + config.hash_hex() + " seed=" +
                          std::to_string(*config.seed) +
                          "\n"
                          "n,b,b_prime,estimator,bias,variance,mc_se,mean_accepted,replicates\n";
        for (std::int64_t n : args.sweep_n) {
            for (double b : args.sweep_b) {
                for (int degree : args.sweep_degrees) {
                    HarnessCell cell = empirical_bias_variance(
                        model, degree, n, b, args.b_prime_ratio * b, args.sweep_replicates,
                        *config.seed, args.theta, s_obs);
                    csv += std::to_string(n) + "," + format_double(b) + "," +
                           format_double(cell.b_prime) + "," + std::to_string(degree) + "," +
                           format_double(cell.bias) + "," + format_double(cell.variance) +
                           "," + format_double(cell.mc_se_bias) + "," +
                           format_double(cell.mean_accepted) + "," +
                           std::to_string(cell.replicates_used) + "\n";
                }
            }
        }
        write_text((dir / "theory_sweep.csv").string(), csv);
        std::cout << "wrote " << (dir / "theory_sweep.csv").string() << "\n";
    }
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"abckit: likelihood-free posterior estimation with smooth rejection and "
                 "local-polynomial adjustment"};
    app.require_subcommand(1);

    RunConfig config;
    TheoryArgs theory_args;
    std::string config_path;

    auto add_common = [&](CLI::App* sub, bool with_pipeline) {
        sub->add_option("--config", config_path, "JSON config file (flags override it)");
        sub->add_option("--seed", [&config](const std::vector<std::string>& v) {
            config.seed = std::stoull(v.back());
            return true;
        }, "master RNG seed (mandatory)");
        sub->add_option("--out", config.out_dir, "output directory");
        if (with_pipeline) {
            sub->add_option("--model", config.model, "registered model name");
            sub->add_option("--n", config.n, "number of simulations");
            sub->add_option("--accept-q", config.accept_q, "acceptance fraction (default 0.025)");
            sub->add_option("--table", config.table_path, "external reference table CSV");
            sub->add_option("--obs", config.obs_json, "observed statistics as JSON");
            sub->add_option("--transform", config.transform, "auto or fixed:<spec>");
            sub->add_option("--degree", config.degree, "auto, 0, 1 or 2");
            sub->add_option("--kernel", config.kernel, "acceptance kernel family");
            sub->add_option("--density-kernel", config.density_kernel, "density kernel family");
            sub->add_option("--grid-size", config.grid_size, "density grid points");
            sub->add_option("--cv-subsample", config.cv_subsample, "max leave-one-out folds");
            sub->add_option("--param", config.params, "parameter(s) to estimate");
            sub->add_option(
                "--param-transform",
                [&config](const std::vector<std::string>& vals) {
                    for (const auto& v : vals) {
                        const auto eq = v.find('=');
                        if (eq == std::string::npos)
                            throw CLI::ValidationError("--param-transform needs name=spec");
                        config.param_transforms[v.substr(0, eq)] = v.substr(eq + 1);
                    }
                    return true;
                },
                "per-parameter transform override, name=identity|log|logit:lo,hi");
        }
    };

    CLI::App* sim = app.add_subcommand("simulate", "write a reference table");
    add_common(sim, true);
    CLI::App* est = app.add_subcommand("estimate", "posterior estimation for one table");
    add_common(est, true);
    CLI::App* sel = app.add_subcommand("select", "transform search and CV degree choice only");
    add_common(sel, true);
    CLI::App* rep = app.add_subcommand("replicate", "repeated simulate+estimate with derived seeds");
    add_common(rep, true);
    rep->add_option("-R,--replicates", config.replicates, "number of replicates");

    CLI::App* theo = app.add_subcommand("theory", "bias/variance constants and MC harness");
    add_common(theo, false);
    theo->add_option("--analytic", theory_args.analytic, "registered analytic model");
    theo->add_option("--theta", theory_args.theta, "evaluation point in parameter space");
    theo->add_option("--s-obs", theory_args.s_obs, "observed statistic vector");
    theo->add_option("--scale", theory_args.scale, "diagonal of D");
    theo->add_flag("--sweep", theory_args.sweep, "run the Monte Carlo harness sweep");
    theo->add_option("--sweep-n", theory_args.sweep_n, "table sizes for the sweep");
    theo->add_option("--sweep-b", theory_args.sweep_b, "bandwidths for the sweep");
    theo->add_option("--sweep-degrees", theory_args.sweep_degrees, "estimators for the sweep");
    theo->add_option("--sweep-replicates", theory_args.sweep_replicates, "replicates per cell");
    theo->add_option("--b-prime-ratio", theory_args.b_prime_ratio, "b' as a multiple of b");

    // --config must be applied before flag overrides: parse twice
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (!config_path.empty()) {
        RunConfig from_file;
        from_file.load_file(config_path);
        // flags win: re-apply the command line on top of the file values
        config = from_file;
        try {
            app.clear();
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e);
            return code == 0 ? 0 : 2;
        }
    }

    try {
        if (sim->parsed()) return cmd_simulate(config);
        if (est->parsed()) return cmd_estimate(config);
        if (sel->parsed()) return cmd_select(config);
        if (rep->parsed()) return cmd_replicate(config);
        if (theo->parsed()) return cmd_theory(config, theory_args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace abckit::cli

int main(int argc, char** argv) { return abckit::cli::run(argc, argv); }
