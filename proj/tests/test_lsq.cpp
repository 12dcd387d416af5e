#include <gtest/gtest.h>

#include <cmath>

#include <preduq/designs.hpp>
#include <preduq/lsq.hpp>
#include <preduq/models.hpp>
#include <preduq/oracle.hpp>
#include <preduq/sampling.hpp>

using namespace preduq;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(Eigen::Index(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

struct QuadFixture {
    QuadraticModelSpec spec{2, Vector::Ones(2), Vector::Ones(2)};
    Model model = make_quadratic_model(spec);
    Design design = named_benchmark_design("quad2d_validation");
    Vector theta_true = vec({27.39, -46.04, -91.81});
    Vector y_star = stack_predictions(model, design, theta_true);
};

}  // namespace

TEST(JacobianMatrix, ExponentialRowAtZero) {
    Model m = make_exponential_model();
    Design d(Matrix::Zero(1, 1));
    Matrix J = model_jacobian_matrix(m, d, vec({0.2, 1.2}));
    EXPECT_DOUBLE_EQ(J(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(J(0, 1), 0.0);
}

TEST(JacobianMatrix, QuadraticRowBySubstitution) {
    Model m = make_quadratic_model(QuadraticModelSpec(1, Vector::Ones(1), Vector::Ones(1)));
    Matrix pts(1, 1);
    pts << 1.0;
    Matrix J = model_jacobian_matrix(m, Design(pts), vec({0, 2}));
    EXPECT_DOUBLE_EQ(J(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(J(0, 1), 3.0);  // alpha*x + beta*theta1*x^2 = 1 + 2
}

TEST(JacobianMatrix, FallsBackToFiniteDifferences) {
    Model m = make_exponential_model();
    Model no_jac = m;
    no_jac.jacobian = nullptr;
    Design d = named_benchmark_design("exp_factorial");
    const Vector theta = vec({0.7, -0.9});
    Matrix J_analytic = model_jacobian_matrix(m, d, theta);
    Matrix J_fd = model_jacobian_matrix(no_jac, d, theta);
    for (Eigen::Index i = 0; i < J_fd.rows(); ++i)
        for (Eigen::Index j = 0; j < J_fd.cols(); ++j)
            EXPECT_NEAR(J_fd(i, j), J_analytic(i, j), 1e-5 * std::max(1.0, std::abs(J_analytic(i, j))));
}

TEST(Fit, NoiseFreeQuadraticRecoversTruth) {
    QuadFixture f;
    SolverConfig cfg;
    ObservationSet obs(f.y_star, f.design);
    ParameterEstimate est = fit(f.model, f.design, obs, vec({1.0, 1.0, 1.0}), cfg);
    EXPECT_TRUE(est.converged);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(est.theta[k], f.theta_true[k], 1e-8);
    EXPECT_LT(est.sse, 1e-18);
}

TEST(Fit, ExactInitIsReturnedUnchanged) {
    QuadFixture f;
    SolverConfig cfg;
    ObservationSet obs(f.y_star, f.design);
    ParameterEstimate est = fit(f.model, f.design, obs, f.theta_true, cfg);
    EXPECT_TRUE(est.converged);
    EXPECT_EQ(est.sse, 0.0);
    for (int k = 0; k < 3; ++k) EXPECT_EQ(est.theta[k], f.theta_true[k]);
}

TEST(Fit, MatchesClosedFormOnNoisyObservations) {
    QuadFixture f;
    QuadraticOracle oracle(f.spec, f.design, 0.1, f.theta_true);
    Matrix dev = normal_deviates(200, 8, 99, Sequence::pseudorandom);
    SolverConfig cfg;
    for (int i = 0; i < 200; ++i) {
        const Vector y = f.y_star + 0.1 * dev.row(i).transpose();
        ParameterEstimate est = fit(f.model, f.design, ObservationSet(y, f.design), f.theta_true, cfg);
        const Vector exact = oracle.exact_ls_estimator(y);
        ASSERT_TRUE(est.converged);
        for (int k = 0; k < 3; ++k)
            EXPECT_NEAR(est.theta[k], exact[k], 1e-8) << "sample " << i << " component " << k;
    }
}

TEST(Fit, SseNeverExceedsInitSse) {
    QuadFixture f;
    Matrix dev = normal_deviates(20, 8, 3, Sequence::pseudorandom);
    SolverConfig cfg;
    for (int i = 0; i < 20; ++i) {
        const Vector y = f.y_star + 2.0 * dev.row(i).transpose();
        ObservationSet obs(y, f.design);
        const Vector init = vec({10.0, -10.0, 5.0});
        const double sse_init = (y - stack_predictions(f.model, f.design, init)).squaredNorm();
        ParameterEstimate est = fit(f.model, f.design, obs, init, cfg);
        EXPECT_LE(est.sse, sse_init);
    }
}

TEST(Fit, MonotoneMultistart) {
    Model m = make_exponential_model();
    Design d = named_benchmark_design("exp_factorial");
    const Vector theta_true = vec({0.2, 1.2});
    Vector y = stack_predictions(m, d, theta_true);
    y[0] = -0.15;  // degenerate-ish sample
    ObservationSet obs(y, d);
    double prev_best = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 6; ++k) {
        SolverConfig cfg;
        cfg.multistart_count = k;
        cfg.init_strategy = InitStrategy::random_box;
        cfg.seed = 1234;
        ParameterEstimate est = fit(m, d, obs, vec({0.5, 0.5}), cfg);
        EXPECT_LE(est.sse, prev_best + 1e-300) << "k=" << k;
        prev_best = std::min(prev_best, est.sse);
    }
}

TEST(Fit, DeterministicAcrossRepeatedCalls) {
    Model m = make_exponential_model();
    Design d = named_benchmark_design("exp_equidistant");
    const Vector y = vec({0.11, 0.2, 0.31, 0.74});
    ObservationSet obs(y, d);
    SolverConfig cfg;
    cfg.multistart_count = 8;
    cfg.seed = 77;
    ParameterEstimate a = fit(m, d, obs, vec({0.3, 1.0}), cfg);
    ParameterEstimate b = fit(m, d, obs, vec({0.3, 1.0}), cfg);
    EXPECT_EQ(a.theta[0], b.theta[0]);
    EXPECT_EQ(a.theta[1], b.theta[1]);
    EXPECT_EQ(a.sse, b.sse);
    EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Fit, NonConvergenceIsReportedNotSilent) {
    QuadFixture f;
    SolverConfig cfg;
    cfg.max_iterations = 1;
    cfg.gradient_tolerance = 1e-15;
    ObservationSet obs(f.y_star, f.design);
    ParameterEstimate est = fit(f.model, f.design, obs, vec({1000.0, 500.0, -800.0}), cfg);
    EXPECT_FALSE(est.converged);
    EXPECT_GT(est.gradient_norm, cfg.gradient_tolerance);
}

TEST(Fit, AllStartsFailingRaises) {
    Model m = make_exponential_model();
    Design d = named_benchmark_design("exp_factorial");
    ObservationSet obs(vec({0.1, 0.1, 0.6, 0.7}), d);
    SolverConfig cfg;
    cfg.init_strategy = InitStrategy::given;
    EXPECT_THROW(fit(m, d, obs, vec({1.0, 800.0}), cfg), NumericError);
}

TEST(Fit, BoundsAreRespected) {
    QuadFixture f;
    SolverConfig cfg;
    cfg.bounds = std::make_pair(vec({0.0, -50.0, -100.0}), vec({30.0, 0.0, 0.0}));
    ObservationSet obs(f.y_star, f.design);
    ParameterEstimate est = fit(f.model, f.design, obs, vec({1.0, -1.0, -1.0}), cfg);
    for (int k = 0; k < 3; ++k) {
        EXPECT_GE(est.theta[k], cfg.bounds->first[k]);
        EXPECT_LE(est.theta[k], cfg.bounds->second[k]);
    }
    EXPECT_NEAR(est.theta[1], f.theta_true[1], 1e-6);  // interior optimum still found
}

TEST(Fit, PerturbedGivenStrategyIsDeterministic) {
    Model m = make_exponential_model();
    Design d = named_benchmark_design("exp_equidistant");
    ObservationSet obs(vec({0.12, 0.21, 0.3, 0.71}), d);
    SolverConfig cfg;
    cfg.multistart_count = 4;
    cfg.init_strategy = InitStrategy::perturbed_given;
    cfg.seed = 3;
    ParameterEstimate a = fit(m, d, obs, vec({0.3, 1.0}), cfg);
    ParameterEstimate b = fit(m, d, obs, vec({0.3, 1.0}), cfg);
    EXPECT_TRUE(a.converged);
    EXPECT_EQ(a.theta[0], b.theta[0]);
    EXPECT_EQ(a.sse, b.sse);
}

TEST(Fit, ConfigValidation) {
    QuadFixture f;
    ObservationSet obs(f.y_star, f.design);
    SolverConfig cfg;
    cfg.multistart_count = 0;
    EXPECT_THROW(fit(f.model, f.design, obs, f.theta_true, cfg), ContractError);
    SolverConfig cfg2;
    EXPECT_THROW(fit(f.model, f.design, obs, vec({1.0}), cfg2), ContractError);
}
