#pragma once

#include <iosfwd>

#include <preduq/core.hpp>
#include <preduq/cubature.hpp>
#include <preduq/lsq.hpp>
#include <preduq/sampling.hpp>

namespace preduq {

struct McConfig {
    Eigen::Index n_samples = 100000;
    std::uint64_t seed = 0;
    Sequence sequence = Sequence::sobol;

    void validate() const {
        if (n_samples < 2) throw ContractError("McConfig: n_samples must be >= 2");
    }
};

/**
 * Monte Carlo prediction uncertainty: draws n_samples perturbations of
 * center_obs from N(0, sigma^2 I), refits once per sample (warm-started at
 * the center fit), and reuses the estimates across all eval points. Mean and
 * variance use the population divisor. Non-convergent samples are excluded;
 * more than 0.1% exclusions fail the run.
 */
UncertaintyReport mc_uncertainty(const Model& model, const Design& design,
                                 const ObservationSet& center_obs, const NoiseModel& noise,
                                 const Matrix& eval_points, const McConfig& cfg,
                                 const SolverConfig& solver, const Vector& init,
                                 int threads = 1);

/// Linearization estimate: fits theta_bar once, then V(x) = J M^-1 J^T with
/// M the information matrix. Ill-conditioned M (cond > 1e12) raises
/// NumericError.
UncertaintyReport linearization_uncertainty(const Model& model, const Design& design,
                                            const ObservationSet& obs, const NoiseModel& noise,
                                            const Matrix& eval_points, const SolverConfig& solver,
                                            const Vector& init, int threads = 1);

/**
 * Shared cubature engine: fits theta_bar to obs, sets the perturbation center
 * to the estimated-model predictions, runs one inner fit per cubature point,
 * and reuses all estimates across eval points. Any inner-fit failure is a
 * hard error naming the point. Variances may be negative when the rule has
 * negative weights (reported raw, flagged).
 */
UncertaintyReport cubature_uncertainty(const CubatureRule& rule, const Model& model,
                                       const Design& design, const ObservationSet& obs,
                                       const Matrix& eval_points, const SolverConfig& solver,
                                       const Vector& init, int threads = 1);

/// CSV rows: method,x1..xd,mean,variance,negative_variance (17 significant digits).
void write_report_csv(std::ostream& os, const UncertaintyReport& report);

/// Full-fidelity JSON form of a report, metadata included.
nlohmann::json report_to_json(const UncertaintyReport& report);

}  // namespace preduq
