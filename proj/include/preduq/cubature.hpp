#pragma once

#include <limits>
#include <string>
#include <vector>

#include <preduq/core.hpp>

namespace preduq {

/**
 * Weighted point set in observation-perturbation space R^n for integrating
 * against N(0, sigma^2 I). Weights sum to 1 and the nonzero points come in
 * +-z pairs with equal weights, so odd monomials integrate to exactly zero.
 */
struct CubatureRule {
    Matrix points;   // N x n
    Vector weights;  // N
    int degree = 0;  // polynomial exactness degree
    std::string label;
    double kappa = std::numeric_limits<double>::quiet_NaN();  // set for SP rules

    Eigen::Index size() const { return points.rows(); }
    Eigen::Index dim() const { return points.cols(); }
};

/// Sigma points {0, +-delta e_i}, delta = sqrt(n+kappa)*sigma,
/// w0 = kappa/(n+kappa), w1 = 1/(2(n+kappa)). N = 2n+1, degree 3.
CubatureRule sigma_point_rule(int n, double sigma, double kappa);

/// McNamee-Stenger fifth-degree rule {0, +-delta e_i, +-delta(e_i +- e_j)},
/// delta = sqrt(3)*sigma. N = 2n^2+1.
CubatureRule mcnamee_stenger_rule(int n, double sigma);

/// Lu-Darmofal fifth-degree rule built on regular-simplex directions,
/// delta = sqrt(n+2)*sigma. N = n^2+3n+3. Requires n >= 2.
CubatureRule lu_darmofal_rule(int n, double sigma);

/// Rows are the n+1 unit vertices a^(i) of a regular simplex in R^n,
/// pairwise inner products -1/n.
Matrix simplex_directions(int n);

/// Sparse multivariate polynomial: sum of coeff * prod_k z_k^exponents[k].
struct PolynomialTerm {
    std::vector<int> exponents;  // one entry per dimension
    double coeff = 0.0;
};

using Polynomial = std::vector<PolynomialTerm>;

/// E[prod z_k^e_k] under N(0, sigma^2 I) via univariate Gaussian moments
/// (exponents up to 5 supported).
double gaussian_moment(const std::vector<int>& exponents, double sigma);

/// Integrates each term with the rule and with closed-form Gaussian moments;
/// returns the largest absolute per-term deviation (scaled by |coeff|).
double degree5_exactness_check(const CubatureRule& rule, const Polynomial& poly, double sigma);

}  // namespace preduq
