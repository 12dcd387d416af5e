#include <preduq/models.hpp>

#include <cmath>

namespace preduq {

QuadraticModelSpec::QuadraticModelSpec(int d, Vector a, Vector b)
    : dim_x(d), alpha(std::move(a)), beta(std::move(b)) {
    if (dim_x < 1) throw ContractError("QuadraticModelSpec: dim_x must be >= 1");
    if (alpha.size() != dim_x || beta.size() != dim_x)
        throw ContractError("QuadraticModelSpec: alpha/beta must have dim_x entries");
    for (int k = 0; k < dim_x; ++k)
        if (alpha[k] == 0.0) throw ContractError("QuadraticModelSpec: alpha entries must be nonzero");
}

double quadratic_eval(const QuadraticModelSpec& spec, const Vector& x, const Vector& theta) {
    if (x.size() != spec.dim_x || theta.size() != spec.dim_x + 1)
        throw ContractError("quadratic_eval: dimension mismatch");
    double f = theta[0];
    for (int k = 0; k < spec.dim_x; ++k) {
        const double xk = x[k];
        const double tk = theta[k + 1];
        f += spec.alpha[k] * tk * xk + spec.beta[k] * (tk * tk / 2.0) * xk * xk;
    }
    return f;
}

Model make_quadratic_model(const QuadraticModelSpec& spec) {
    Model m;
    m.identifier = "quadratic" + std::to_string(spec.dim_x) + "d";
    m.dim_x = spec.dim_x;
    m.dim_theta = spec.dim_x + 1;
    m.eval = [spec](const Vector& x, const Vector& theta) {
        return quadratic_eval(spec, x, theta);
    };
    m.jacobian = [spec](const Vector& x, const Vector& theta) {
        RowVector j(spec.dim_x + 1);
        j[0] = 1.0;
        for (int k = 0; k < spec.dim_x; ++k)
            j[k + 1] = spec.alpha[k] * x[k] + spec.beta[k] * theta[k + 1] * x[k] * x[k];
        return j;
    };
    return m;
}

double exponential_eval(double x, const Vector& theta) {
    if (theta.size() != 2) throw ContractError("exponential_eval: theta must have 2 entries");
    if (!std::isfinite(x)) throw ContractError("exponential_eval: non-finite input");
    const double arg = theta[1] * x;
    if (arg > 700.0)
        throw NumericError("exponential_eval: exponent " + std::to_string(arg) + " overflows");
    return theta[0] * std::exp(arg);
}

Model make_exponential_model() {
    Model m;
    m.identifier = "exponential";
    m.dim_x = 1;
    m.dim_theta = 2;
    m.eval = [](const Vector& x, const Vector& theta) { return exponential_eval(x[0], theta); };
    m.jacobian = [](const Vector& x, const Vector& theta) {
        const double arg = theta[1] * x[0];
        if (arg > 700.0)
            throw NumericError("exponential jacobian: exponent overflows");
        const double e = std::exp(arg);
        RowVector j(2);
        j[0] = e;
        j[1] = theta[0] * x[0] * e;
        return j;
    };
    return m;
}

namespace {

void check_nrtl_inputs(double l, double T) {
    if (!(T > 0.0)) throw ContractError("nrtl: temperature must be > 0 K");
    if (!(l >= 0.0 && l <= 1.0)) throw ContractError("nrtl: mole fraction must lie in [0, 1]");
}

double guarded_exp(double arg, const char* where) {
    if (!(arg < 700.0) || !std::isfinite(arg))
        throw NumericError(std::string(where) + ": exponent overflows");
    return std::exp(arg);
}

// Everything gamma_1 needs, for one (T, theta).
struct NrtlTerms {
    double tau12, tau21, G12, G21;
};

NrtlTerms nrtl_terms(double T, const NrtlSpec& spec, const Vector& theta) {
    NrtlTerms t;
    t.tau12 = spec.a12 + theta[0] / T;
    t.tau21 = spec.a21 + theta[1] / T;
    t.G12 = guarded_exp(-spec.c12 * t.tau12, "nrtl G12");
    t.G21 = guarded_exp(-spec.c12 * t.tau21, "nrtl G21");
    return t;
}

}  // namespace

double nrtl_tau(int i, int j, double T, const NrtlSpec& spec, const Vector& theta) {
    if (i < 1 || i > 2 || j < 1 || j > 2) throw ContractError("nrtl_tau: indices must be 1 or 2");
    if (!(T > 0.0)) throw ContractError("nrtl_tau: temperature must be > 0 K");
    if (theta.size() != 2) throw ContractError("nrtl_tau: theta must have 2 entries");
    if (i == j) return 0.0;
    return (i == 1) ? spec.a12 + theta[0] / T : spec.a21 + theta[1] / T;
}

double nrtl_G(int i, int j, double T, const NrtlSpec& spec, const Vector& theta) {
    if (i == j) return 1.0;
    return guarded_exp(-spec.c12 * nrtl_tau(i, j, T, spec, theta), "nrtl_G");
}

double nrtl_gamma1(double l, double T, const NrtlSpec& spec, const Vector& theta) {
    check_nrtl_inputs(l, T);
    if (theta.size() != 2) throw ContractError("nrtl_gamma1: theta must have 2 entries");
    const NrtlTerms t = nrtl_terms(T, spec, theta);
    const double l1 = l, l2 = 1.0 - l;

    const double den1 = l1 + l2 * t.G21;        // sum_k l_k G_k1
    const double num1 = l2 * t.tau21 * t.G21;   // sum_k l_k tau_k1 G_k1
    const double den2 = l1 * t.G12 + l2;        // sum_k l_k G_k2
    const double num2 = l1 * t.tau12 * t.G12;   // sum_k l_k tau_k2 G_k2

    const double lnGamma = num1 / den1 - l1 * num1 / (den1 * den1) +
                           (l2 * t.G12 / den2) * (t.tau12 - num2 / den2);
    return guarded_exp(lnGamma, "nrtl_gamma1");
}

Model make_nrtl_model(const NrtlSpec& spec) {
    Model m;
    m.identifier = "nrtl";
    m.dim_x = 2;  // x = (l, T)
    m.dim_theta = 2;
    m.eval = [spec](const Vector& x, const Vector& theta) {
        return nrtl_gamma1(x[0], x[1], spec, theta);
    };
    m.jacobian = [spec](const Vector& x, const Vector& theta) {
        const double l = x[0], T = x[1];
        check_nrtl_inputs(l, T);
        const NrtlTerms t = nrtl_terms(T, spec, theta);
        const double l1 = l, l2 = 1.0 - l;
        const double c = spec.c12;

        const double den1 = l1 + l2 * t.G21;
        const double num1 = l2 * t.tau21 * t.G21;
        const double den2 = l1 * t.G12 + l2;
        const double num2 = l1 * t.tau12 * t.G12;
        const double gamma = guarded_exp(num1 / den1 - l1 * num1 / (den1 * den1) +
                                             (l2 * t.G12 / den2) * (t.tau12 - num2 / den2),
                                         "nrtl jacobian");

        // d/db21: only tau21 and G21 move.
        const double dG21 = -c * t.G21 / T;
        const double dnum1 = (l2 * t.G21 / T) * (1.0 - c * t.tau21);
        const double dden1 = l2 * dG21;
        const double dE_b21 = (dnum1 * den1 - num1 * dden1) / (den1 * den1) -
                              l1 * (dnum1 * den1 - 2.0 * num1 * dden1) / (den1 * den1 * den1);

        // d/db12: only tau12 and G12 move.
        const double dG12 = -c * t.G12 / T;
        const double dnum2 = (l1 * t.G12 / T) * (1.0 - c * t.tau12);
        const double dden2 = l1 * dG12;
        const double A2 = l2 * t.G12 / den2;
        const double B2 = t.tau12 - num2 / den2;
        const double dA2 = l2 * (dG12 * den2 - t.G12 * dden2) / (den2 * den2);
        const double dB2 = 1.0 / T - (dnum2 * den2 - num2 * dden2) / (den2 * den2);
        const double dE_b12 = dA2 * B2 + A2 * dB2;

        RowVector j(2);
        j[0] = gamma * dE_b12;
        j[1] = gamma * dE_b21;
        return j;
    };
    return m;
}

}  // namespace preduq
