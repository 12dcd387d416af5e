#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include <preduq/core.hpp>
#include <preduq/designs.hpp>
#include <preduq/models.hpp>

using namespace preduq;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(Eigen::Index(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

}  // namespace

TEST(Core, EvaluateQuadratic1dAllTermsVanish) {
    Model m = make_quadratic_model(QuadraticModelSpec(1, vec({1}), vec({1})));
    EXPECT_EQ(evaluate(m, vec({1}), vec({0, 0})), 0.0);
}

TEST(Core, EvaluateExponentialAtZero) {
    Model m = make_exponential_model();
    EXPECT_DOUBLE_EQ(evaluate(m, vec({0}), vec({0.2, 1.2})), 0.2);
}

TEST(Core, EvaluateQuadratic2dBySubstitution) {
    Model m = make_quadratic_model(QuadraticModelSpec(2, vec({1, 1}), vec({1, 1})));
    // 1 + 2*1 + 3*(-1) + 4/2 + 9/2 = 6.5
    EXPECT_DOUBLE_EQ(evaluate(m, vec({1, -1}), vec({1, 2, 3})), 6.5);
}

TEST(Core, EvaluateRejectsDimensionMismatch) {
    Model m = make_quadratic_model(QuadraticModelSpec(2, vec({1, 1}), vec({1, 1})));
    EXPECT_THROW(evaluate(m, vec({1}), vec({1, 2, 3})), ContractError);
    EXPECT_THROW(evaluate(m, vec({1, -1}), vec({1, 2})), ContractError);
}

TEST(Core, StackPredictionsSinglePoint) {
    Model m = make_exponential_model();
    Design d(Matrix::Zero(1, 1));
    Vector out = stack_predictions(m, d, vec({0.2, 1.2}));
    ASSERT_EQ(out.size(), 1);
    EXPECT_DOUBLE_EQ(out[0], 0.2);
}

TEST(Core, StackPredictionsQuad1dFactorial) {
    Model m = make_quadratic_model(QuadraticModelSpec(1, vec({1}), vec({1})));
    Design d = named_benchmark_design("quad1d_factorial");
    Vector out = stack_predictions(m, d, vec({0, 1}));
    // f(x) = x + x^2/2
    EXPECT_DOUBLE_EQ(out[0], -0.5);
    EXPECT_DOUBLE_EQ(out[1], -0.5);
    EXPECT_DOUBLE_EQ(out[2], 1.5);
    EXPECT_DOUBLE_EQ(out[3], 1.5);
}

TEST(Core, StackPredictionsMatchesEvaluatePointwise) {
    Model m = make_quadratic_model(QuadraticModelSpec(2, vec({1, 2}), vec({-1, 3})));
    Design d = named_benchmark_design("quad2d_equidistant");
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int rep = 0; rep < 100; ++rep) {
        Vector theta = vec({u(rng), u(rng), u(rng)});
        Vector stacked = stack_predictions(m, d, theta);
        for (Eigen::Index i = 0; i < d.n(); ++i)
            EXPECT_EQ(stacked[i], evaluate(m, d.point(i), theta));
    }
}

TEST(Core, PerturbZeroIsIdentity) {
    Design d(Matrix::Zero(2, 1));
    ObservationSet obs(vec({1, 2}), d);
    ObservationSet out = perturb_observations(obs, Vector::Zero(2));
    EXPECT_EQ(out.values[0], 1.0);
    EXPECT_EQ(out.values[1], 2.0);
}

TEST(Core, PerturbAddsComponentwise) {
    Design d(Matrix::Zero(2, 1));
    ObservationSet obs(vec({1, 2}), d);
    ObservationSet out = perturb_observations(obs, vec({0.5, -0.5}));
    EXPECT_DOUBLE_EQ(out.values[0], 1.5);
    EXPECT_DOUBLE_EQ(out.values[1], 1.5);
}

TEST(Core, PerturbRoundTripsWithAdditiveInverse) {
    Design d(Matrix::Zero(3, 1));
    ObservationSet obs(vec({0.1, -2.7, 31.4}), d);
    Vector z = vec({5.5, -1.25, 0.375});
    ObservationSet back = perturb_observations(perturb_observations(obs, z), -z);
    for (Eigen::Index i = 0; i < 3; ++i)
        EXPECT_NEAR(back.values[i], obs.values[i],
                    4.0 * std::numeric_limits<double>::epsilon() *
                        (std::abs(obs.values[i]) + std::abs(z[i])));
}

TEST(Core, PerturbRejectsLengthMismatch) {
    Design d(Matrix::Zero(2, 1));
    ObservationSet obs(vec({1, 2}), d);
    EXPECT_THROW(perturb_observations(obs, Vector::Zero(3)), ContractError);
}

TEST(Core, EvaluateIsDeterministic) {
    Model m = make_nrtl_model(NrtlSpec{});
    Vector x = vec({0.37, 310.0});
    Vector theta = vec({-173.4982, -61.8175});
    const double first = evaluate(m, x, theta);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(evaluate(m, x, theta), first);
}

TEST(Core, DomainTypeInvariants) {
    EXPECT_THROW(Design(Matrix(0, 2)), ContractError);
    Matrix bad(1, 1);
    bad(0, 0) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(Design{bad}, ContractError);
    EXPECT_THROW(NoiseModel(0.0), ContractError);
    EXPECT_THROW(NoiseModel(-1.0), ContractError);
    Design d(Matrix::Zero(2, 1));
    EXPECT_THROW(ObservationSet(Vector::Zero(3), d), ContractError);
}

TEST(Core, MethodNamesRoundTrip) {
    for (Method m : {Method::MC, Method::LIN, Method::SP, Method::MS, Method::LD, Method::EXACT})
        EXPECT_EQ(method_from_name(method_name(m)), m);
    EXPECT_THROW(method_from_name("BOGUS"), ContractError);
}
