#include <preduq/cubature.hpp>

#include <cmath>

namespace preduq {

CubatureRule sigma_point_rule(int n, double sigma, double kappa) {
    if (n < 1) throw ContractError("sigma_point_rule: n must be >= 1");
    if (!(sigma > 0.0)) throw ContractError("sigma_point_rule: sigma must be > 0");
    if (!(kappa > -double(n)))
        throw ContractError("sigma_point_rule: kappa must lie in (-n, inf)");
    const double delta = std::sqrt(double(n) + kappa) * sigma;
    const double w0 = kappa / (double(n) + kappa);
    const double w1 = 1.0 / (2.0 * (double(n) + kappa));

    CubatureRule rule;
    rule.label = "SP";
    rule.degree = 3;
    rule.kappa = kappa;
    rule.points = Matrix::Zero(2 * n + 1, n);
    rule.weights = Vector::Constant(2 * n + 1, w1);
    rule.weights[0] = w0;
    for (int i = 0; i < n; ++i) {
        rule.points(1 + 2 * i, i) = delta;
        rule.points(2 + 2 * i, i) = -delta;
    }
    return rule;
}

CubatureRule mcnamee_stenger_rule(int n, double sigma) {
    if (n < 1) throw ContractError("mcnamee_stenger_rule: n must be >= 1");
    if (!(sigma > 0.0)) throw ContractError("mcnamee_stenger_rule: sigma must be > 0");
    const double delta = std::sqrt(3.0) * sigma;
    // Gaussian moments I0=1, I2=sigma^2, I4=3 sigma^4, I22=sigma^4 reduce the
    // generic weight expressions to constants independent of sigma.
    const double w0 = 1.0 - double(n) * (7.0 - double(n)) / 18.0;
    const double w1 = (4.0 - double(n)) / 18.0;
    const double w2 = 1.0 / 36.0;

    const Eigen::Index N = 2 * Eigen::Index(n) * n + 1;
    CubatureRule rule;
    rule.label = "MS";
    rule.degree = 5;
    rule.points = Matrix::Zero(N, n);
    rule.weights = Vector(N);
    rule.weights[0] = w0;
    Eigen::Index row = 1;
    for (int i = 0; i < n; ++i) {
        rule.points(row, i) = delta;
        rule.weights[row++] = w1;
        rule.points(row, i) = -delta;
        rule.weights[row++] = w1;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            for (const auto& [si, sj] : {std::pair{1, 1}, {-1, -1}, {1, -1}, {-1, 1}}) {
                rule.points(row, i) = si * delta;
                rule.points(row, j) = sj * delta;
                rule.weights[row++] = w2;
            }
        }
    }
    return rule;
}

Matrix simplex_directions(int n) {
    if (n < 1) throw ContractError("simplex_directions: n must be >= 1");
    Matrix A = Matrix::Zero(n + 1, n);
    for (int i = 1; i <= n + 1; ++i) {
        for (int k = 1; k <= n; ++k) {
            if (k < i) {
                A(i - 1, k - 1) = -std::sqrt(double(n + 1) /
                                             (double(n) * double(n - k + 2) * double(n - k + 1)));
            } else if (k == i) {
                A(i - 1, k - 1) =
                    std::sqrt(double(n + 1) * double(n - i + 1) / (double(n) * double(n - i + 2)));
            }
        }
    }
    return A;
}

CubatureRule lu_darmofal_rule(int n, double sigma) {
    if (n < 2) throw ContractError("lu_darmofal_rule: n must be >= 2");
    if (!(sigma > 0.0)) throw ContractError("lu_darmofal_rule: sigma must be > 0");
    const double nd = n;
    const double delta = std::sqrt(nd + 2.0) * sigma;
    const double w0 = 2.0 / (nd + 2.0);
    const double w1 = nd * nd * (7.0 - nd) / (2.0 * (nd + 1.0) * (nd + 1.0) * (nd + 2.0) * (nd + 2.0));
    const double w2 = 2.0 * (nd - 1.0) * (nd - 1.0) / ((nd + 1.0) * (nd + 1.0) * (nd + 2.0) * (nd + 2.0));

    const Matrix A = simplex_directions(n);
    const double pair_scale = std::sqrt(nd / (2.0 * (nd - 1.0)));

    const Eigen::Index N = Eigen::Index(n) * n + 3 * n + 3;
    CubatureRule rule;
    rule.label = "LD";
    rule.degree = 5;
    rule.points = Matrix::Zero(N, n);
    rule.weights = Vector(N);
    rule.weights[0] = w0;
    Eigen::Index row = 1;
    for (int i = 0; i < n + 1; ++i) {
        rule.points.row(row) = delta * A.row(i);
        rule.weights[row++] = w1;
        rule.points.row(row) = -delta * A.row(i);
        rule.weights[row++] = w1;
    }
    for (int i = 0; i < n + 1; ++i) {
        for (int j = 0; j < i; ++j) {
            const RowVector b = pair_scale * (A.row(i) + A.row(j));
            rule.points.row(row) = delta * b;
            rule.weights[row++] = w2;
            rule.points.row(row) = -delta * b;
            rule.weights[row++] = w2;
        }
    }
    return rule;
}

double gaussian_moment(const std::vector<int>& exponents, double sigma) {
    double m = 1.0;
    for (int e : exponents) {
        switch (e) {
            case 0: break;
            case 1: case 3: case 5: return 0.0;
            case 2: m *= sigma * sigma; break;
            case 4: m *= 3.0 * std::pow(sigma, 4); break;
            default:
                throw ContractError("gaussian_moment: exponent beyond degree 5");
        }
    }
    return m;
}

double degree5_exactness_check(const CubatureRule& rule, const Polynomial& poly, double sigma) {
    double worst = 0.0;
    for (const auto& term : poly) {
        if (Eigen::Index(term.exponents.size()) != rule.dim())
            throw ContractError("degree5_exactness_check: term dimension mismatch");
        double integral = 0.0;
        for (Eigen::Index p = 0; p < rule.size(); ++p) {
            double mono = 1.0;
            for (Eigen::Index k = 0; k < rule.dim(); ++k) {
                const int e = term.exponents[size_t(k)];
                for (int rep = 0; rep < e; ++rep) mono *= rule.points(p, k);
            }
            integral += rule.weights[p] * mono;
        }
        const double exact = gaussian_moment(term.exponents, sigma);
        worst = std::max(worst, std::abs(term.coeff) * std::abs(integral - exact));
    }
    return worst;
}

}  // namespace preduq
