#pragma once

#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <preduq/core.hpp>
#include <preduq/estimators.hpp>

namespace preduq {

/// Uniform evaluation grid: points_per_dim^dim_x points, bounds per dimension,
/// first coordinate varying slowest.
struct GridSpec {
    int dim_x = 1;
    int points_per_dim = 100;
    std::vector<std::pair<double, double>> bounds;

    Matrix make_points() const;
};

/// |V_method - V_exact| at one input point.
double pointwise_error(double v_method, double v_exact);

/// Root mean-squared deviation between two grids of variance values.
double rms_error(const Vector& v_method, const Vector& v_reference);

/// Euclidean parameter estimation error.
double parameter_error(const Vector& theta_hat, const Vector& theta_true);

/// Distribution summary; std uses the population divisor, percentiles use
/// linear interpolation between order statistics.
struct PercentileStats {
    double mean = 0, std = 0, min = 0, p25 = 0, p50 = 0, p75 = 0, max = 0;
};

PercentileStats percentile_stats(const std::vector<double>& values);

nlohmann::json stats_to_json(const PercentileStats& stats);

struct ConvergencePoint {
    Eigen::Index n_samples;
    double v_mc;
};

/**
 * Monte Carlo variance at a single probe point evaluated at each requested
 * sample count, all counts sharing one sample stream (the value at N uses
 * exactly the first N samples).
 */
std::vector<ConvergencePoint> mc_convergence_trace(
    const Model& model, const Design& design, const NoiseModel& noise, const Vector& theta_true,
    const Vector& x_probe, const std::vector<Eigen::Index>& sample_counts, std::uint64_t seed,
    Sequence sequence, const SolverConfig& solver, int threads = 1);

struct BenchmarkSampleRecord {
    Eigen::Index sample_index = 0;
    Vector theta_hat;
    double param_error = 0.0;
    std::map<Method, double> rms;
};

struct BenchmarkRun {
    std::string model_id;
    std::string design_id;
    Eigen::Index n_mc = 0;
    Eigen::Index n_excluded = 0;
    std::uint64_t seed = 0;
    std::vector<Method> methods;
    Matrix grid_points;
    Vector v_mc_grid;
    std::vector<BenchmarkSampleRecord> records;
};

struct BenchmarkConfig {
    Eigen::Index n_mc = 100000;        // reference MC sample count
    Eigen::Index method_samples = 1000;  // observation sets evaluated per method
    std::vector<Method> methods = {Method::LIN, Method::LD};
    std::uint64_t seed = 0;
    Sequence sequence = Sequence::sobol;
    double kappa = std::numeric_limits<double>::quiet_NaN();  // NaN -> 3 - n
    int threads = 1;
};

/**
 * Full benchmark protocol: reference Monte Carlo uncertainty on the grid from
 * one shared estimate set, then per observation sample the parameter error
 * and each method's rms deviation from the reference.
 */
BenchmarkRun run_benchmark(const Model& model, const Design& design, const Vector& theta_true,
                           const NoiseModel& noise, const Matrix& grid_points,
                           const BenchmarkConfig& cfg, const SolverConfig& solver);

/// Header: sample_index,param_error,rms_lin,rms_sp,rms_ms,rms_ld. Methods not
/// run are written as nan. 17 significant digits.
void write_results_csv(std::ostream& os, const BenchmarkRun& run);

/// Per-method objects keyed LIN/SP/MS/LD with keys mean,std,min,p25,p50,p75,max.
nlohmann::json benchmark_stats_json(const BenchmarkRun& run);

/// Header: n_samples,v_mc.
void write_convergence_csv(std::ostream& os, const std::vector<ConvergencePoint>& trace);

}  // namespace preduq
