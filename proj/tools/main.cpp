#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include <preduq/bench.hpp>
#include <preduq/config.hpp>
#include <preduq/designs.hpp>
#include <preduq/estimators.hpp>
#include <preduq/oracle.hpp>
#include <preduq/parallel.hpp>

namespace fs = std::filesystem;
using namespace preduq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CliOptions {
    std::string config_path;
    std::string model;
    std::string design;
    double sigma = std::numeric_limits<double>::quiet_NaN();
    long long n_mc = -1;
    long long seed = -1;
    double kappa = std::numeric_limits<double>::quiet_NaN();
    int threads = -1;
    std::string out_dir;
    bool dump_config = false;
};

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--config", opt.config_path, "Config file (JSON)");
    cmd->add_option("--model", opt.model, "Model: quad1d, quad2d, exp, nrtl");
    cmd->add_option("--design", opt.design,
                    "Design name (factorial, equidistant, validation, or a full name)");
    cmd->add_option("--sigma", opt.sigma, "Observation noise standard deviation");
    cmd->add_option("--n-mc", opt.n_mc, "Monte Carlo sample count");
    cmd->add_option("--seed", opt.seed, "RNG seed");
    cmd->add_option("--kappa", opt.kappa, "Sigma-point hyperparameter (default 3 - n)");
    cmd->add_option("--threads", opt.threads, "Worker threads (0 = hardware)");
    cmd->add_option("--out", opt.out_dir, "Output directory root");
    cmd->add_flag("--dump-config", opt.dump_config, "Print the resolved config and exit");
}

// default_design_kind: "factorial", "equidistant", or "validation_preferred"
// (the quadratic validation design when the model has one, factorial otherwise).
RunConfig resolve_config(const CliOptions& opt, const std::string& default_design_kind) {
    std::string model = opt.model;
    nlohmann::json file_json;
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in) throw ContractError("cannot open config file '" + opt.config_path + "'");
        in >> file_json;
        if (model.empty() && file_json.contains("model") && file_json["model"].contains("type"))
            model = file_json["model"]["type"].get<std::string>();
    }
    if (model.empty()) model = "quad2d";

    RunConfig cfg = default_config_for_model(model);
    if (!file_json.empty()) apply_config_json(cfg, file_json);

    if (!opt.model.empty() && opt.model != cfg.model_type)
        throw ContractError("--model contradicts the config file model type");
    if (!opt.design.empty()) {
        cfg.design_name = resolve_design_name(cfg.model_type, opt.design);
        cfg.explicit_points.reset();
    }
    if (!std::isnan(opt.sigma)) cfg.sigma = opt.sigma;
    if (opt.n_mc >= 0) cfg.n_mc = opt.n_mc;
    if (opt.seed >= 0) cfg.seed = std::uint64_t(opt.seed);
    if (!std::isnan(opt.kappa)) cfg.kappa = opt.kappa;
    if (opt.threads >= 0) cfg.threads = opt.threads;
    if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;

    if (cfg.design_name.empty() && !cfg.explicit_points) {
        std::string kind = default_design_kind;
        if (kind == "validation_preferred")
            kind = (cfg.model_type == "quad2d") ? "validation" : "factorial";
        cfg.design_name = resolve_design_name(cfg.model_type, kind);
    }
    return cfg;
}

fs::path make_run_dir(const RunConfig& cfg) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y%m%dT%H%M%SZ", std::gmtime(&t));
    fs::path base = fs::path(cfg.out_dir) / ("run-" + std::string(stamp) + "-seed" +
                                             std::to_string(cfg.seed));
    fs::path dir = base;
    for (int suffix = 2; fs::exists(dir); ++suffix)
        dir = base.string() + "-" + std::to_string(suffix);
    fs::create_directories(dir);
    return dir;
}

void write_provenance(const fs::path& dir, const RunConfig& cfg, const Design& design) {
    std::ofstream cfg_out(dir / "resolved-config.json");
    cfg_out << config_to_json(cfg).dump(2) << "\n";
    std::ofstream design_out(dir / "design.csv");
    write_design_csv(design_out, design);
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int cmd_validate_quadratic(const CliOptions& opt) {
    RunConfig cfg = resolve_config(opt, "validation_preferred");
    if (opt.dump_config) {
        std::cout << config_to_json(cfg).dump(2) << "\n";
        return kExitOk;
    }
    if (cfg.model_type != "quad1d" && cfg.model_type != "quad2d")
        throw ContractError("validate-quadratic requires a quadratic model");
    if (cfg.theta_true.size() == 0) throw ContractError("validate-quadratic: theta_true missing");

    const Model model = build_model(cfg);
    const Design design = build_design(cfg);
    if (!check_orthogonal(design).all_ok())
        throw ContractError("validate-quadratic: design fails the orthogonality conditions");

    const QuadraticModelSpec spec(cfg.dim_x, cfg.alpha, cfg.beta);
    const QuadraticOracle oracle(spec, design, cfg.sigma, cfg.theta_true);
    const NoiseModel noise(cfg.sigma);
    const Matrix grid = build_grid(cfg);
    const Vector y_star = stack_predictions(model, design, cfg.theta_true);
    const ObservationSet obs(y_star, design);  // noise-free observations
    const int threads = resolve_threads(cfg.threads);
    const double kappa = std::isnan(cfg.kappa) ? 3.0 - double(design.n()) : cfg.kappa;

    // LIN and LD always run; MS / SP when configured.
    std::vector<Method> methods = {Method::LIN, Method::LD};
    for (Method m : cfg.methods)
        if (m == Method::MS || m == Method::SP) methods.push_back(m);

    std::vector<UncertaintyReport> reports;
    for (Method m : methods) {
        switch (m) {
            case Method::LIN:
                reports.push_back(linearization_uncertainty(model, design, obs, noise, grid,
                                                            cfg.solver, cfg.theta_true, threads));
                break;
            case Method::SP:
                reports.push_back(cubature_uncertainty(
                    sigma_point_rule(int(design.n()), cfg.sigma, kappa), model, design, obs, grid,
                    cfg.solver, cfg.theta_true, threads));
                break;
            case Method::MS:
                reports.push_back(cubature_uncertainty(mcnamee_stenger_rule(int(design.n()), cfg.sigma),
                                                       model, design, obs, grid, cfg.solver,
                                                       cfg.theta_true, threads));
                break;
            case Method::LD:
                reports.push_back(cubature_uncertainty(lu_darmofal_rule(int(design.n()), cfg.sigma),
                                                       model, design, obs, grid, cfg.solver,
                                                       cfg.theta_true, threads));
                break;
            default:
                throw ContractError("validate-quadratic: unsupported method");
        }
    }

    Vector v_exact(grid.rows());
    for (Eigen::Index j = 0; j < grid.rows(); ++j)
        v_exact[j] = oracle.exact_prediction_uncertainty(grid.row(j).transpose());

    const fs::path dir = make_run_dir(cfg);
    write_provenance(dir, cfg, design);

    std::ofstream deltas(dir / "deltas.csv");
    for (Eigen::Index k = 0; k < grid.cols(); ++k) deltas << (k ? "," : "") << "x" << (k + 1);
    for (const auto& rep : reports) {
        std::string name = method_name(rep.method);
        for (auto& ch : name) ch = char(std::tolower(ch));
        deltas << ",delta_" << name;
    }
    deltas << "\n";
    for (Eigen::Index j = 0; j < grid.rows(); ++j) {
        for (Eigen::Index k = 0; k < grid.cols(); ++k)
            deltas << (k ? "," : "") << format_g17(grid(j, k));
        for (const auto& rep : reports)
            deltas << "," << format_g17(pointwise_error(rep.variance[j], v_exact[j]));
        deltas << "\n";
    }

    nlohmann::json stats;
    double ld_mean = std::numeric_limits<double>::infinity();
    for (const auto& rep : reports) {
        std::vector<double> d(size_t(grid.rows()));
        for (Eigen::Index j = 0; j < grid.rows(); ++j)
            d[size_t(j)] = pointwise_error(rep.variance[j], v_exact[j]);
        const PercentileStats st = percentile_stats(d);
        stats[method_name(rep.method)] = stats_to_json(st);
        if (rep.method == Method::LD) ld_mean = st.mean;
    }
    std::ofstream stats_out(dir / "stats.json");
    stats_out << stats.dump(2) << "\n";

    std::ofstream reports_out(dir / "reports.csv");
    for (size_t i = 0; i < reports.size(); ++i) {
        if (i == 0) {
            write_report_csv(reports_out, reports[i]);
        } else {
            std::ostringstream tmp;
            write_report_csv(tmp, reports[i]);
            const std::string body = tmp.str();
            reports_out << body.substr(body.find('\n') + 1);  // skip repeated header
        }
    }

    std::cout << "run_dir: " << dir.string() << "\n";
    std::cout << "ld_mean_error: " << format_g17(ld_mean) << " (bound "
              << format_g17(cfg.ld_exactness_bound) << ")\n";
    if (!(ld_mean <= cfg.ld_exactness_bound)) {
        std::cerr << "validate-quadratic: LD mean error exceeds the exactness bound\n";
        return kExitNumeric;
    }
    return kExitOk;
}

int cmd_benchmark(const CliOptions& opt) {
    RunConfig cfg = resolve_config(opt, "factorial");
    if (opt.dump_config) {
        std::cout << config_to_json(cfg).dump(2) << "\n";
        return kExitOk;
    }
    if (cfg.theta_true.size() == 0) throw ContractError("benchmark: theta_true missing");

    const Model model = build_model(cfg);
    const Design design = build_design(cfg);
    const NoiseModel noise(cfg.sigma);
    const Matrix grid = build_grid(cfg);

    BenchmarkConfig bench_cfg;
    bench_cfg.n_mc = cfg.n_mc;
    bench_cfg.method_samples = cfg.method_samples;
    bench_cfg.methods = cfg.methods;
    bench_cfg.seed = cfg.seed;
    bench_cfg.sequence = cfg.sequence;
    bench_cfg.kappa = cfg.kappa;
    bench_cfg.threads = resolve_threads(cfg.threads);

    BenchmarkRun run = run_benchmark(model, design, cfg.theta_true, noise, grid, bench_cfg, cfg.solver);
    run.design_id = cfg.design_name;

    const fs::path dir = make_run_dir(cfg);
    write_provenance(dir, cfg, design);
    std::ofstream results(dir / "results.csv");
    write_results_csv(results, run);
    std::ofstream stats(dir / "stats.json");
    stats << benchmark_stats_json(run).dump(2) << "\n";
    std::ofstream reference(dir / "reference.csv");
    for (Eigen::Index k = 0; k < grid.cols(); ++k) reference << "x" << (k + 1) << ",";
    reference << "v_mc\n";
    for (Eigen::Index j = 0; j < grid.rows(); ++j) {
        for (Eigen::Index k = 0; k < grid.cols(); ++k)
            reference << format_g17(grid(j, k)) << ",";
        reference << format_g17(run.v_mc_grid[j]) << "\n";
    }

    std::cout << "run_dir: " << dir.string() << "\n";
    std::cout << "samples: " << run.records.size() << " (excluded " << run.n_excluded << " of "
              << run.n_mc << " reference fits)\n";
    return kExitOk;
}

int cmd_mc_convergence(const CliOptions& opt) {
    RunConfig cfg = resolve_config(opt, "factorial");
    if (opt.dump_config) {
        std::cout << config_to_json(cfg).dump(2) << "\n";
        return kExitOk;
    }
    if (cfg.theta_true.size() == 0) throw ContractError("mc-convergence: theta_true missing");

    const Model model = build_model(cfg);
    const Design design = build_design(cfg);
    const NoiseModel noise(cfg.sigma);
    const Vector probe = default_probe(cfg);
    if (probe.size() != model.dim_x)
        throw ContractError("mc-convergence: probe dimension does not match model");
    // An explicit --n-mc caps the trace; the configured counts rule otherwise.
    std::vector<Eigen::Index> counts = cfg.sample_counts;
    if (opt.n_mc >= 2) {
        counts.clear();
        for (Eigen::Index c : cfg.sample_counts)
            if (c <= opt.n_mc) counts.push_back(c);
        if (counts.empty() || counts.back() != opt.n_mc) counts.push_back(opt.n_mc);
    }

    const auto trace = mc_convergence_trace(model, design, noise, cfg.theta_true, probe, counts,
                                            cfg.seed, cfg.sequence, cfg.solver,
                                            resolve_threads(cfg.threads));

    const fs::path dir = make_run_dir(cfg);
    write_provenance(dir, cfg, design);
    std::ofstream out(dir / "convergence.csv");
    write_convergence_csv(out, trace);

    std::cout << "run_dir: " << dir.string() << "\n";
    std::cout << "final: N=" << trace.back().n_samples << " v_mc=" << format_g17(trace.back().v_mc)
              << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prediction-uncertainty estimation for nonlinear regression models"};
    app.require_subcommand(1);

    CliOptions opt_validate, opt_bench, opt_conv;
    CLI::App* validate = app.add_subcommand(
        "validate-quadratic", "Compare estimators against the quadratic closed form");
    add_common_flags(validate, opt_validate);
    CLI::App* bench = app.add_subcommand("benchmark", "Run the benchmark protocol");
    add_common_flags(bench, opt_bench);
    CLI::App* conv = app.add_subcommand("mc-convergence", "Monte Carlo convergence trace");
    add_common_flags(conv, opt_conv);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (validate->parsed()) return cmd_validate_quadratic(opt_validate);
        if (bench->parsed()) return cmd_benchmark(opt_bench);
        if (conv->parsed()) return cmd_mc_convergence(opt_conv);
        return kExitConfig;
    } catch (const ContractError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    }
}
