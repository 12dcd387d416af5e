#pragma once

#include <optional>
#include <string>
#include <vector>

#include <preduq/bench.hpp>
#include <preduq/core.hpp>
#include <preduq/designs.hpp>
#include <preduq/models.hpp>

namespace preduq {

/**
 * Declarative run configuration shared by all CLI subcommands. Values are
 * resolved in three layers: model defaults, then the config file, then flag
 * overrides. The resolved form round-trips through JSON unchanged.
 */
struct RunConfig {
    // model section
    std::string model_type;  // quad1d | quad2d | exp | nrtl
    int dim_x = 1;
    Vector alpha, beta;      // quadratic coefficients
    NrtlSpec nrtl;
    Vector theta_true;       // empty = not provided

    // design section
    std::string design_name;                 // empty = subcommand default
    std::optional<Matrix> explicit_points;   // overrides design_name

    // noise
    double sigma = 0.1;

    // estimators
    std::vector<Method> methods = {Method::LIN, Method::LD};
    double kappa = std::numeric_limits<double>::quiet_NaN();  // NaN -> 3 - n
    Eigen::Index n_mc = 100000;
    Eigen::Index method_samples = 200;
    std::uint64_t seed = 42;
    Sequence sequence = Sequence::sobol;

    // evaluation grid
    int points_per_dim = 100;
    std::vector<std::pair<double, double>> grid_bounds;

    // mc-convergence
    Vector probe;                          // empty = model default
    std::vector<Eigen::Index> sample_counts;  // empty = log-spaced 1e2..1e6

    // validate-quadratic
    double ld_exactness_bound = 1e-9;

    SolverConfig solver;

    std::string out_dir = "runs";
    int threads = 0;  // 0 = hardware concurrency
};

/// Model-specific paper defaults (true parameters, designs, grids, probes).
RunConfig default_config_for_model(const std::string& model_type);

/// Merge a (possibly partial) JSON document over the current values.
void apply_config_json(RunConfig& cfg, const nlohmann::json& j);

/// Fully resolved JSON form; parsing it back yields an identical config.
nlohmann::json config_to_json(const RunConfig& cfg);

Model build_model(const RunConfig& cfg);
Design build_design(const RunConfig& cfg);
Matrix build_grid(const RunConfig& cfg);
Vector default_probe(const RunConfig& cfg);

/// Resolves shorthand design names (factorial, equidistant, validation)
/// against the configured model type.
std::string resolve_design_name(const std::string& model_type, const std::string& name);

std::string init_strategy_name(InitStrategy s);
InitStrategy init_strategy_from_name(const std::string& name);

}  // namespace preduq
