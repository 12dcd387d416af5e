#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace preduq {

using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Matrix = Eigen::MatrixXd;

/// Violated precondition or malformed configuration (caller bug).
class ContractError : public std::invalid_argument {
public:
    explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure at runtime (singular system, non-convergence, overflow).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/**
 * A regression model f(x, theta) -> R with known input/parameter dimensions
 * and an optional analytic parameter-Jacobian (row of df/dtheta_j).
 *
 * Instances are immutable after construction; eval/jacobian must be pure so
 * they can be called concurrently without synchronization.
 */
struct Model {
    std::string identifier;
    int dim_x = 0;
    int dim_theta = 0;
    std::function<double(const Vector& x, const Vector& theta)> eval;
    std::function<RowVector(const Vector& x, const Vector& theta)> jacobian;  // optional

    bool has_jacobian() const { return static_cast<bool>(jacobian); }
};

/// Ordered list of n input points, one per row.
struct Design {
    Matrix points;  // n x dim_x

    Design() = default;
    explicit Design(Matrix pts) : points(std::move(pts)) {
        if (points.rows() < 1) throw ContractError("Design: needs at least one point");
        if (!points.allFinite()) throw ContractError("Design: non-finite coordinate");
    }

    Eigen::Index n() const { return points.rows(); }
    Eigen::Index dim_x() const { return points.cols(); }
    Vector point(Eigen::Index i) const { return points.row(i).transpose(); }
};

/// n target values measured at a Design.
struct ObservationSet {
    Vector values;
    Design design;

    ObservationSet() = default;
    ObservationSet(Vector vals, Design d) : values(std::move(vals)), design(std::move(d)) {
        if (values.size() != design.n())
            throw ContractError("ObservationSet: value count does not match design size");
        if (!values.allFinite()) throw ContractError("ObservationSet: non-finite value");
    }

    Eigen::Index n() const { return values.size(); }
};

/// i.i.d. zero-mean Gaussian observation noise with standard deviation sigma.
struct NoiseModel {
    double sigma = 1.0;

    explicit NoiseModel(double s) : sigma(s) {
        if (!(sigma > 0.0)) throw ContractError("NoiseModel: sigma must be > 0");
    }
};

/// Result of one least-squares fit.
struct ParameterEstimate {
    Vector theta;
    double sse = 0.0;
    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;
};

enum class Method { MC, LIN, SP, MS, LD, EXACT };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

/**
 * Per-input-point expected prediction and prediction-variance estimate.
 *
 * Cubature rules with negative weights can produce negative variances; those
 * are reported raw with negative_variance set. Monte Carlo variances are
 * always >= 0.
 */
struct UncertaintyReport {
    Method method = Method::MC;
    Matrix eval_points;   // m x dim_x
    Vector mean;          // m
    Vector variance;      // m
    bool negative_variance = false;
    nlohmann::json metadata;
};

/// f(x, theta) with dimension checks.
double evaluate(const Model& model, const Vector& x, const Vector& theta);

/// Stacked predictions f(x_i, theta) over all design points.
Vector stack_predictions(const Model& model, const Design& design, const Vector& theta);

/// Adds a perturbation vector to the observations; design is unchanged.
ObservationSet perturb_observations(const ObservationSet& obs, const Vector& z);

}  // namespace preduq
