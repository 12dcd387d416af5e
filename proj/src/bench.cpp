#include <preduq/bench.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <preduq/parallel.hpp>

namespace preduq {

namespace {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

SolverConfig inner_config(const SolverConfig& outer) {
    SolverConfig c = outer;
    c.multistart_count = 1;
    c.init_strategy = InitStrategy::given;
    return c;
}

struct SampleFits {
    Matrix theta_hat;       // n_mc x dim_theta
    std::vector<char> ok;   // per sample
    Eigen::Index excluded = 0;
};

SampleFits fit_all_samples(const Model& model, const Design& design, const Vector& y_center,
                           const Vector& warm_theta, const Matrix& scaled_deviates,
                           const SolverConfig& inner, int threads) {
    const Eigen::Index N = scaled_deviates.rows();
    SampleFits out;
    out.theta_hat = Matrix(N, model.dim_theta);
    out.ok.assign(size_t(N), 0);
    parallel_for_chunks(N, threads, [&](Eigen::Index begin, Eigen::Index end) {
        for (Eigen::Index i = begin; i < end; ++i) {
            try {
                ObservationSet obs(y_center + scaled_deviates.row(i).transpose(), design);
                ParameterEstimate est = fit(model, design, obs, warm_theta, inner);
                if (est.converged) {
                    out.theta_hat.row(i) = est.theta.transpose();
                    out.ok[size_t(i)] = 1;
                }
            } catch (const NumericError&) {
            }
        }
    });
    for (char o : out.ok)
        if (!o) ++out.excluded;
    return out;
}

}  // namespace

Matrix GridSpec::make_points() const {
    if (dim_x < 1) throw ContractError("GridSpec: dim_x must be >= 1");
    if (points_per_dim < 2) throw ContractError("GridSpec: points_per_dim must be >= 2");
    if (Eigen::Index(bounds.size()) != dim_x)
        throw ContractError("GridSpec: bounds must have one (lo, hi) pair per dimension");
    for (const auto& [lo, hi] : bounds)
        if (!(lo < hi)) throw ContractError("GridSpec: bounds must satisfy lo < hi");

    Eigen::Index total = 1;
    for (int k = 0; k < dim_x; ++k) total *= points_per_dim;
    Matrix pts(total, dim_x);
    for (Eigen::Index idx = 0; idx < total; ++idx) {
        Eigen::Index rem = idx;
        for (int k = dim_x - 1; k >= 0; --k) {
            const Eigen::Index step = rem % points_per_dim;
            rem /= points_per_dim;
            const auto& [lo, hi] = bounds[size_t(k)];
            pts(idx, k) = lo + (hi - lo) * double(step) / double(points_per_dim - 1);
        }
    }
    return pts;
}

double pointwise_error(double v_method, double v_exact) {
    return std::abs(v_method - v_exact);
}

double rms_error(const Vector& v_method, const Vector& v_reference) {
    if (v_method.size() != v_reference.size())
        throw ContractError("rms_error: grids have different lengths");
    if (v_method.size() == 0) throw ContractError("rms_error: empty grids");
    return std::sqrt((v_method - v_reference).squaredNorm() / double(v_method.size()));
}

double parameter_error(const Vector& theta_hat, const Vector& theta_true) {
    if (theta_hat.size() != theta_true.size())
        throw ContractError("parameter_error: dimension mismatch");
    return (theta_hat - theta_true).norm();
}

PercentileStats percentile_stats(const std::vector<double>& values) {
    if (values.empty()) throw ContractError("percentile_stats: empty input");
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const auto quantile = [&](double p) {
        const double pos = p * double(sorted.size() - 1);
        const size_t lo = size_t(pos);
        const size_t hi = std::min(lo + 1, sorted.size() - 1);
        const double frac = pos - double(lo);
        return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
    };
    PercentileStats s;
    double mean = 0.0;
    for (double v : sorted) mean += v;
    mean /= double(sorted.size());
    double var = 0.0;
    for (double v : sorted) var += (v - mean) * (v - mean);
    var /= double(sorted.size());
    s.mean = mean;
    s.std = std::sqrt(var);
    s.min = sorted.front();
    s.max = sorted.back();
    s.p25 = quantile(0.25);
    s.p50 = quantile(0.50);
    s.p75 = quantile(0.75);
    return s;
}

nlohmann::json stats_to_json(const PercentileStats& stats) {
    return {{"mean", stats.mean}, {"std", stats.std}, {"min", stats.min}, {"p25", stats.p25},
            {"p50", stats.p50},   {"p75", stats.p75}, {"max", stats.max}};
}

std::vector<ConvergencePoint> mc_convergence_trace(
    const Model& model, const Design& design, const NoiseModel& noise, const Vector& theta_true,
    const Vector& x_probe, const std::vector<Eigen::Index>& sample_counts, std::uint64_t seed,
    Sequence sequence, const SolverConfig& solver, int threads) {
    if (sample_counts.empty()) throw ContractError("mc_convergence_trace: no sample counts");
    for (size_t i = 0; i < sample_counts.size(); ++i) {
        if (sample_counts[i] < 2)
            throw ContractError("mc_convergence_trace: sample counts must be >= 2");
        if (i > 0 && sample_counts[i] <= sample_counts[i - 1])
            throw ContractError("mc_convergence_trace: sample counts must be strictly ascending");
    }
    const Vector y_star = stack_predictions(model, design, theta_true);
    const ObservationSet center(y_star, design);
    const SolverConfig inner = inner_config(solver);
    const ParameterEstimate center_fit = fit(model, design, center, theta_true, inner);

    const Eigen::Index n_max = sample_counts.back();
    const Matrix deviates =
        noise.sigma * normal_deviates(n_max, int(design.n()), seed, sequence);
    SampleFits fits =
        fit_all_samples(model, design, y_star, center_fit.theta, deviates, inner, threads);
    if (double(fits.excluded) >= 1e-3 * double(n_max))
        throw NumericError("mc_convergence_trace: " + std::to_string(fits.excluded) +
                           " of " + std::to_string(n_max) + " fits failed (budget is 0.1%)");

    std::vector<ConvergencePoint> trace;
    trace.reserve(sample_counts.size());
    double mean = 0.0, m2 = 0.0;
    Eigen::Index count = 0;
    size_t next = 0;
    Vector theta(model.dim_theta);
    for (Eigen::Index i = 0; i < n_max && next < sample_counts.size(); ++i) {
        if (fits.ok[size_t(i)]) {
            theta = fits.theta_hat.row(i).transpose();
            const double g = model.eval(x_probe, theta);
            ++count;
            const double d = g - mean;
            mean += d / double(count);
            m2 += d * (g - mean);
        }
        while (next < sample_counts.size() && i + 1 == sample_counts[next]) {
            trace.push_back({sample_counts[next], m2 / double(count)});
            ++next;
        }
    }
    return trace;
}

BenchmarkRun run_benchmark(const Model& model, const Design& design, const Vector& theta_true,
                           const NoiseModel& noise, const Matrix& grid_points,
                           const BenchmarkConfig& cfg, const SolverConfig& solver) {
    for (Method m : cfg.methods)
        if (m != Method::LIN && m != Method::SP && m != Method::MS && m != Method::LD)
            throw ContractError("run_benchmark: methods must be a subset of {LIN, SP, MS, LD}");
    if (cfg.n_mc < 2) throw ContractError("run_benchmark: n_mc must be >= 2");
    if (cfg.method_samples < 1 || cfg.method_samples > cfg.n_mc)
        throw ContractError("run_benchmark: method_samples must lie in [1, n_mc]");
    if (grid_points.cols() != model.dim_x)
        throw ContractError("run_benchmark: grid dimension does not match model");

    BenchmarkRun run;
    run.model_id = model.identifier;
    run.n_mc = cfg.n_mc;
    run.seed = cfg.seed;
    run.methods = cfg.methods;
    run.grid_points = grid_points;

    const Eigen::Index n = design.n();
    const Vector y_star = stack_predictions(model, design, theta_true);
    const ObservationSet center(y_star, design);
    const SolverConfig inner = inner_config(solver);
    const ParameterEstimate center_fit = fit(model, design, center, theta_true, inner);

    const Matrix deviates = noise.sigma * normal_deviates(cfg.n_mc, int(n), cfg.seed, cfg.sequence);
    SampleFits fits =
        fit_all_samples(model, design, y_star, center_fit.theta, deviates, inner, cfg.threads);
    run.n_excluded = fits.excluded;
    if (double(fits.excluded) >= 1e-3 * double(cfg.n_mc))
        throw NumericError("run_benchmark: reference MC failed, " + std::to_string(fits.excluded) +
                           " of " + std::to_string(cfg.n_mc) + " fits excluded (budget is 0.1%)");

    // Reference prediction uncertainty on the grid from the shared estimate set.
    const Eigen::Index n_grid = grid_points.rows();
    run.v_mc_grid = Vector(n_grid);
    parallel_for_chunks(n_grid, cfg.threads, [&](Eigen::Index begin, Eigen::Index end) {
        Vector theta(model.dim_theta);
        for (Eigen::Index j = begin; j < end; ++j) {
            const Vector x = grid_points.row(j).transpose();
            double mean = 0.0, m2 = 0.0;
            Eigen::Index count = 0;
            for (Eigen::Index i = 0; i < cfg.n_mc; ++i) {
                if (!fits.ok[size_t(i)]) continue;
                theta = fits.theta_hat.row(i).transpose();
                const double g = model.eval(x, theta);
                ++count;
                const double d = g - mean;
                mean += d / double(count);
                m2 += d * (g - mean);
            }
            run.v_mc_grid[j] = m2 / double(count);
        }
    });

    // Cubature rules are shared across samples (same n and sigma).
    const double kappa = std::isnan(cfg.kappa) ? 3.0 - double(n) : cfg.kappa;
    std::map<Method, CubatureRule> rules;
    for (Method m : cfg.methods) {
        if (m == Method::SP) rules[m] = sigma_point_rule(int(n), noise.sigma, kappa);
        if (m == Method::MS) rules[m] = mcnamee_stenger_rule(int(n), noise.sigma);
        if (m == Method::LD) rules[m] = lu_darmofal_rule(int(n), noise.sigma);
    }

    std::vector<BenchmarkSampleRecord> records(size_t(cfg.method_samples));
    std::vector<char> recorded(size_t(cfg.method_samples), 0);
    parallel_for_chunks(cfg.method_samples, cfg.threads, [&](Eigen::Index begin, Eigen::Index end) {
        for (Eigen::Index s = begin; s < end; ++s) {
            if (!fits.ok[size_t(s)]) continue;  // excluded sample, no record
            BenchmarkSampleRecord rec;
            rec.sample_index = s;
            rec.theta_hat = fits.theta_hat.row(s).transpose();
            rec.param_error = parameter_error(rec.theta_hat, theta_true);
            ObservationSet obs(y_star + deviates.row(s).transpose(), design);
            for (Method m : cfg.methods) {
                // A method can fail on a degenerate sample (e.g. the
                // linearization's information matrix loses rank when the
                // estimate runs off along a flat valley); the benchmark
                // records that as an unbounded error instead of aborting.
                try {
                    UncertaintyReport rep =
                        (m == Method::LIN)
                            ? linearization_uncertainty(model, design, obs, noise, grid_points,
                                                        inner, rec.theta_hat, 1)
                            : cubature_uncertainty(rules.at(m), model, design, obs, grid_points,
                                                   inner, rec.theta_hat, 1);
                    rec.rms[m] = rms_error(rep.variance, run.v_mc_grid);
                } catch (const NumericError&) {
                    rec.rms[m] = std::numeric_limits<double>::infinity();
                }
            }
            records[size_t(s)] = std::move(rec);
            recorded[size_t(s)] = 1;
        }
    });
    for (Eigen::Index s = 0; s < cfg.method_samples; ++s)
        if (recorded[size_t(s)]) run.records.push_back(std::move(records[size_t(s)]));

    return run;
}

void write_results_csv(std::ostream& os, const BenchmarkRun& run) {
    os << "sample_index,param_error,rms_lin,rms_sp,rms_ms,rms_ld\n";
    const Method order[] = {Method::LIN, Method::SP, Method::MS, Method::LD};
    for (const auto& rec : run.records) {
        os << rec.sample_index << "," << format_g17(rec.param_error);
        for (Method m : order) {
            const auto it = rec.rms.find(m);
            os << "," << (it == rec.rms.end() ? "nan" : format_g17(it->second));
        }
        os << "\n";
    }
}

nlohmann::json benchmark_stats_json(const BenchmarkRun& run) {
    nlohmann::json out;
    for (Method m : run.methods) {
        std::vector<double> values;
        values.reserve(run.records.size());
        for (const auto& rec : run.records) {
            const auto it = rec.rms.find(m);
            if (it != rec.rms.end()) values.push_back(it->second);
        }
        if (!values.empty()) out[method_name(m)] = stats_to_json(percentile_stats(values));
    }
    return out;
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergencePoint>& trace) {
    os << "n_samples,v_mc\n";
    for (const auto& pt : trace)
        os << pt.n_samples << "," << format_g17(pt.v_mc) << "\n";
}

}  // namespace preduq
