#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include <preduq/core.hpp>

namespace preduq {

enum class InitStrategy { given, perturbed_given, random_box };

/**
 * Damped Gauss-Newton (Levenberg-Marquardt) configuration.
 *
 * The solver always iterates until it can no longer make progress, then runs
 * a few undamped Gauss-Newton polish steps; gradient_tolerance only decides
 * the `converged` flag of the result. Multistart runs start 0 from the given
 * init and the remaining starts from draws around it; the best (lowest-sse)
 * result wins, ties broken by lowest start index.
 */
struct SolverConfig {
    int max_iterations = 1000;
    double gradient_tolerance = 1e-6;
    double step_tolerance = 1e-14;
    int multistart_count = 1;
    InitStrategy init_strategy = InitStrategy::random_box;
    double damping_init = 1e-3;
    std::optional<std::pair<Vector, Vector>> bounds;  // per-parameter box, lo/hi
    std::uint64_t seed = 0;

    void validate() const;

    /// Defaults for the one fit against the actually observed data.
    static SolverConfig outer_defaults() {
        SolverConfig c;
        c.multistart_count = 16;
        return c;
    }

    /// Defaults for warm-started fits at perturbed observations.
    static SolverConfig inner_defaults() { return SolverConfig{}; }
};

/// Least-squares fit of theta to obs; see SolverConfig for the algorithm.
/// Throws NumericError if every start fails outright (non-finite model at init).
ParameterEstimate fit(const Model& model, const Design& design, const ObservationSet& obs,
                      const Vector& init, const SolverConfig& config);

/// n x dim_theta stacked parameter Jacobian at theta; analytic rows when the
/// model provides them, central finite differences otherwise.
Matrix model_jacobian_matrix(const Model& model, const Design& design, const Vector& theta);

/// Central-difference row for one input point (test oracle and fallback path).
RowVector finite_difference_jacobian_row(const Model& model, const Vector& x, const Vector& theta);

}  // namespace preduq
