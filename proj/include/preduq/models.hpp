#pragma once

#include <preduq/core.hpp>

namespace preduq {

/**
 * Separable quadratic model
 *   f(x, theta) = theta_0 + sum_k alpha_k theta_k x_k + sum_k beta_k theta_k^2/2 x_k^2
 * with dim_theta = dim_x + 1. Every alpha_k must be nonzero.
 */
struct QuadraticModelSpec {
    int dim_x = 1;
    Vector alpha;
    Vector beta;

    QuadraticModelSpec(int d, Vector a, Vector b);
};

double quadratic_eval(const QuadraticModelSpec& spec, const Vector& x, const Vector& theta);

Model make_quadratic_model(const QuadraticModelSpec& spec);

/// theta_1 * exp(theta_2 * x), scalar input. Exponents beyond +-700 are rejected.
double exponential_eval(double x, const Vector& theta);

Model make_exponential_model();

/**
 * Binary NRTL activity-coefficient model, gamma_1 as a function of
 * x = (l, T) with l the liquid mole fraction of component 1 and T in Kelvin.
 * Free parameters theta = (b12, b21) in Kelvin; a12/a21 and the symmetric,
 * temperature-independent non-randomness constant c12 = c21 are fixed per spec.
 */
struct NrtlSpec {
    double a12 = 0.0;
    double a21 = 0.0;
    double c12 = 0.3;  // = c21; d_ij fixed to 0

    NrtlSpec() = default;
    NrtlSpec(double a12_, double a21_, double c12_) : a12(a12_), a21(a21_), c12(c12_) {}
};

/// tau_ij(T) = a_ij + b_ij / T for i != j, tau_ii = 0. Indices in {1,2}.
double nrtl_tau(int i, int j, double T, const NrtlSpec& spec, const Vector& theta);

/// G_ij(T) = exp(-c_ij * tau_ij(T)), G_ii = 1.
double nrtl_G(int i, int j, double T, const NrtlSpec& spec, const Vector& theta);

/// Activity coefficient of component 1 at liquid fraction l in [0,1], T > 0.
double nrtl_gamma1(double l, double T, const NrtlSpec& spec, const Vector& theta);

Model make_nrtl_model(const NrtlSpec& spec);

}  // namespace preduq
