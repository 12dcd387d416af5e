#include <preduq/oracle.hpp>

#include <cmath>

#include <preduq/designs.hpp>

namespace preduq {

QuadraticOracle::QuadraticOracle(QuadraticModelSpec spec, Design design, double sigma,
                                 std::optional<Vector> theta_true)
    : spec_(std::move(spec)), design_(std::move(design)), sigma_(sigma),
      theta_true_(std::move(theta_true)) {
    if (design_.dim_x() != spec_.dim_x)
        throw ContractError("QuadraticOracle: design/spec dimension mismatch");
    if (!(sigma_ > 0.0)) throw ContractError("QuadraticOracle: sigma must be > 0");
    if (!check_orthogonal(design_).all_ok())
        throw ContractError("QuadraticOracle: design violates the orthogonal-factorial conditions");
    if (theta_true_ && theta_true_->size() != spec_.dim_x + 1)
        throw ContractError("QuadraticOracle: theta_true has wrong dimension");
}

void QuadraticOracle::require_theta_true(const char* op) const {
    if (!theta_true_) throw ContractError(std::string(op) + ": theta_true not provided");
}

Vector QuadraticOracle::exact_ls_estimator(const Vector& obs) const {
    if (obs.size() != n()) throw ContractError("exact_ls_estimator: observation length mismatch");
    const int d = spec_.dim_x;
    const double nn = double(n());
    const Vector sxy = design_.points.transpose() * obs;  // sum_i x_ik y_i per k
    Vector theta(d + 1);
    double theta0 = obs.sum() / nn;
    for (int k = 0; k < d; ++k) {
        theta[k + 1] = sxy[k] / (spec_.alpha[k] * nn);
        theta0 -= spec_.beta[k] / (2.0 * spec_.alpha[k] * spec_.alpha[k] * nn * nn) * sxy[k] * sxy[k];
    }
    theta[0] = theta0;
    return theta;
}

double QuadraticOracle::exact_expected_prediction(const Vector& x) const {
    require_theta_true("exact_expected_prediction");
    if (x.size() != spec_.dim_x) throw ContractError("exact_expected_prediction: bad input point");
    double bias = 0.0;
    for (int k = 0; k < spec_.dim_x; ++k)
        bias += spec_.beta[k] / (spec_.alpha[k] * spec_.alpha[k]) * (x[k] * x[k] - 1.0);
    return quadratic_eval(spec_, x, *theta_true_) + sigma_ * sigma_ / (2.0 * double(n())) * bias;
}

double QuadraticOracle::exact_prediction_uncertainty(const Vector& x) const {
    require_theta_true("exact_prediction_uncertainty");
    if (x.size() != spec_.dim_x) throw ContractError("exact_prediction_uncertainty: bad input point");
    const double s2 = sigma_ * sigma_;
    const double nn = double(n());
    double quad_sum = 1.0;
    double quartic_sum = 0.0;
    for (int k = 0; k < spec_.dim_x; ++k) {
        const double ratio = spec_.beta[k] / spec_.alpha[k];
        const double w = x[k] * x[k] - 1.0;
        const double bk = x[k] + ratio * w * (*theta_true_)[k + 1];
        quad_sum += bk * bk;
        const double ck = spec_.beta[k] / (spec_.alpha[k] * spec_.alpha[k]) * w;
        quartic_sum += ck * ck;
    }
    return s2 / nn * quad_sum + s2 * s2 / (2.0 * nn * nn) * quartic_sum;
}

double QuadraticOracle::exact_linearized_uncertainty(const Vector& theta_bar, const Vector& x) const {
    if (theta_bar.size() != spec_.dim_x + 1)
        throw ContractError("exact_linearized_uncertainty: theta_bar dimension mismatch");
    if (x.size() != spec_.dim_x) throw ContractError("exact_linearized_uncertainty: bad input point");
    double quad_sum = 1.0;
    for (int k = 0; k < spec_.dim_x; ++k) {
        const double bk = x[k] + spec_.beta[k] / spec_.alpha[k] * (x[k] * x[k] - 1.0) * theta_bar[k + 1];
        quad_sum += bk * bk;
    }
    return sigma_ * sigma_ / double(n()) * quad_sum;
}

double QuadraticOracle::exact_sigma_point_uncertainty(const Vector& theta_bar, double kappa,
                                                      const Vector& x) const {
    const double nn = double(n());
    if (!(kappa > -nn)) throw ContractError("exact_sigma_point_uncertainty: kappa must exceed -n");
    double c_sum = 0.0;
    for (int k = 0; k < spec_.dim_x; ++k)
        c_sum += spec_.beta[k] / (spec_.alpha[k] * spec_.alpha[k]) * (x[k] * x[k] - 1.0);
    const double s4 = std::pow(sigma_, 4);
    return exact_linearized_uncertainty(theta_bar, x) +
           kappa / nn * s4 / (4.0 * nn * nn) * c_sum * c_sum;
}

Vector QuadraticOracle::exact_linearized_ls_estimator(const Vector& theta_bar,
                                                      const Vector& obs) const {
    if (obs.size() != n())
        throw ContractError("exact_linearized_ls_estimator: observation length mismatch");
    if (theta_bar.size() != spec_.dim_x + 1)
        throw ContractError("exact_linearized_ls_estimator: theta_bar dimension mismatch");
    const int d = spec_.dim_x;
    const double nn = double(n());

    // z_i = y_i - c(x_i) with c(x) = f(x, theta_bar) - grad_theta f(x, theta_bar)^T theta_bar.
    Vector z(n());
    for (Eigen::Index i = 0; i < n(); ++i) {
        const Vector xi = design_.point(i);
        double grad_dot_theta = theta_bar[0];
        for (int k = 0; k < d; ++k) {
            const double jk = spec_.alpha[k] * xi[k] + spec_.beta[k] * theta_bar[k + 1] * xi[k] * xi[k];
            grad_dot_theta += jk * theta_bar[k + 1];
        }
        z[i] = obs[i] - (quadratic_eval(spec_, xi, theta_bar) - grad_dot_theta);
    }

    const Vector sxz = design_.points.transpose() * z;
    Vector theta(d + 1);
    double theta0 = z.sum() / nn;
    for (int k = 0; k < d; ++k) {
        theta[k + 1] = sxz[k] / (spec_.alpha[k] * nn);
        theta0 -= spec_.beta[k] * theta_bar[k + 1] / (spec_.alpha[k] * nn) * sxz[k];
    }
    theta[0] = theta0;
    return theta;
}

}  // namespace preduq
