#pragma once

#include <optional>

#include <preduq/core.hpp>
#include <preduq/models.hpp>

namespace preduq {

/**
 * Closed-form ground truth for the separable quadratic model on designs that
 * satisfy the orthogonal-factorial conditions (corner points, zero column
 * sums, cross products n * delta_kl). Construction verifies those conditions.
 */
class QuadraticOracle {
public:
    QuadraticOracle(QuadraticModelSpec spec, Design design, double sigma,
                    std::optional<Vector> theta_true = std::nullopt);

    const QuadraticModelSpec& spec() const { return spec_; }
    const Design& design() const { return design_; }
    double sigma() const { return sigma_; }
    Eigen::Index n() const { return design_.n(); }

    /// Unique least-squares estimator for arbitrary observations.
    Vector exact_ls_estimator(const Vector& obs) const;

    /// Expected prediction of the trained model (bias included); needs theta_true.
    double exact_expected_prediction(const Vector& x) const;

    /// Exact prediction uncertainty; needs theta_true.
    double exact_prediction_uncertainty(const Vector& x) const;

    /// Linearization approximation around theta_bar.
    double exact_linearized_uncertainty(const Vector& theta_bar, const Vector& x) const;

    /// Sigma-point approximation around theta_bar with hyperparameter kappa.
    double exact_sigma_point_uncertainty(const Vector& theta_bar, double kappa,
                                         const Vector& x) const;

    /// Least-squares estimator of the model linearized at theta_bar.
    Vector exact_linearized_ls_estimator(const Vector& theta_bar, const Vector& obs) const;

private:
    void require_theta_true(const char* op) const;

    QuadraticModelSpec spec_;
    Design design_;
    double sigma_;
    std::optional<Vector> theta_true_;
};

}  // namespace preduq
