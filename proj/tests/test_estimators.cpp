#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <preduq/designs.hpp>
#include <preduq/estimators.hpp>
#include <preduq/oracle.hpp>

using namespace preduq;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(Eigen::Index(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

struct QuadSetup {
    QuadraticModelSpec spec{2, Vector::Ones(2), Vector::Ones(2)};
    Model model = make_quadratic_model(spec);
    Design design = named_benchmark_design("quad2d_validation");
    double sigma = 0.1;
    Vector theta_true = vec({27.39, -46.04, -91.81});
    QuadraticOracle oracle{spec, design, sigma, theta_true};
    Vector y_star = stack_predictions(model, design, theta_true);
    ObservationSet obs{y_star, design};
    SolverConfig solver;

    Matrix small_grid() const {
        Matrix g(5, 2);
        g << 0.0, 0.0, 0.3, -0.7, -0.95, 0.5, 1.0, 1.0, 0.62, 0.11;
        return g;
    }
};

// Single-parameter linear model f(x, theta) = theta * x.
Model linear_through_origin() {
    Model m;
    m.identifier = "linear1";
    m.dim_x = 1;
    m.dim_theta = 1;
    m.eval = [](const Vector& x, const Vector& theta) { return theta[0] * x[0]; };
    m.jacobian = [](const Vector& x, const Vector&) {
        RowVector j(1);
        j[0] = x[0];
        return j;
    };
    return m;
}

}  // namespace

TEST(McUncertainty, VanishingNoiseGivesVanishingVariance) {
    QuadSetup s;
    McConfig cfg;
    cfg.n_samples = 500;
    cfg.seed = 3;
    UncertaintyReport rep = mc_uncertainty(s.model, s.design, s.obs, NoiseModel(1e-12),
                                           s.small_grid(), cfg, s.solver, s.theta_true);
    for (Eigen::Index j = 0; j < rep.variance.size(); ++j) {
        EXPECT_GE(rep.variance[j], 0.0);
        EXPECT_LE(rep.variance[j], 1e-20);
    }
}

TEST(McUncertainty, MatchesExactVarianceOnQuadratic) {
    QuadSetup s;
    McConfig cfg;
    cfg.n_samples = 20000;
    cfg.seed = 42;
    cfg.sequence = Sequence::sobol;
    UncertaintyReport rep = mc_uncertainty(s.model, s.design, s.obs, NoiseModel(s.sigma),
                                           s.small_grid(), cfg, s.solver, s.theta_true);
    for (Eigen::Index j = 0; j < rep.eval_points.rows(); ++j) {
        const double exact = s.oracle.exact_prediction_uncertainty(rep.eval_points.row(j).transpose());
        EXPECT_NEAR(rep.variance[j], exact, 0.03 * exact) << "point " << j;
    }
    EXPECT_EQ(rep.metadata.at("n_excluded").get<int>(), 0);
    EXPECT_EQ(rep.metadata.at("sequence").get<std::string>(), "sobol");
}

TEST(McUncertainty, ThreadCountDoesNotChangeBits) {
    QuadSetup s;
    McConfig cfg;
    cfg.n_samples = 2000;
    cfg.seed = 11;
    UncertaintyReport a = mc_uncertainty(s.model, s.design, s.obs, NoiseModel(s.sigma),
                                         s.small_grid(), cfg, s.solver, s.theta_true, 1);
    UncertaintyReport b = mc_uncertainty(s.model, s.design, s.obs, NoiseModel(s.sigma),
                                         s.small_grid(), cfg, s.solver, s.theta_true, 3);
    UncertaintyReport c = mc_uncertainty(s.model, s.design, s.obs, NoiseModel(s.sigma),
                                         s.small_grid(), cfg, s.solver, s.theta_true, 7);
    EXPECT_TRUE(a.mean == b.mean && b.mean == c.mean);
    EXPECT_TRUE(a.variance == b.variance && b.variance == c.variance);
}

TEST(McUncertainty, VarianceIsNeverNegative) {
    QuadSetup s;
    McConfig cfg;
    cfg.n_samples = 300;
    cfg.seed = 5;
    UncertaintyReport rep = mc_uncertainty(s.model, s.design, s.obs, NoiseModel(s.sigma),
                                           s.small_grid(), cfg, s.solver, s.theta_true);
    EXPECT_FALSE(rep.negative_variance);
    for (Eigen::Index j = 0; j < rep.variance.size(); ++j) EXPECT_GE(rep.variance[j], 0.0);
}

TEST(Linearization, NoiseFreeCornerValue) {
    QuadSetup s;
    Matrix corner(1, 2);
    corner << 1.0, 1.0;
    UncertaintyReport rep = linearization_uncertainty(s.model, s.design, s.obs, NoiseModel(s.sigma),
                                                      corner, s.solver, s.theta_true);
    EXPECT_NEAR(rep.variance[0], 0.00375, 1e-12);
    EXPECT_NEAR(rep.mean[0], s.model.eval(corner.row(0).transpose(), s.theta_true), 1e-12);
}

TEST(Linearization, MatchesOracleFormulaOnNoisyObservations) {
    QuadSetup s;
    Matrix dev = normal_deviates(10, 8, 17, Sequence::pseudorandom);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep_i = 0; rep_i < 10; ++rep_i) {
        const Vector y = s.y_star + s.sigma * dev.row(rep_i).transpose();
        ObservationSet obs(y, s.design);
        Matrix pts(10, 2);
        for (int j = 0; j < 10; ++j) {
            pts(j, 0) = u(rng);
            pts(j, 1) = u(rng);
        }
        UncertaintyReport rep = linearization_uncertainty(s.model, s.design, obs, NoiseModel(s.sigma),
                                                          pts, s.solver, s.theta_true);
        const Vector theta_bar = s.oracle.exact_ls_estimator(y);
        for (int j = 0; j < 10; ++j) {
            const double want = s.oracle.exact_linearized_uncertainty(theta_bar, pts.row(j).transpose());
            EXPECT_NEAR(rep.variance[j], want, 1e-10 * std::max(1.0, want));
        }
    }
}

TEST(Linearization, SingleParameterLinearModel) {
    Model m = linear_through_origin();
    Matrix pts(2, 1);
    pts << 1.0, 1.0;
    Design d(pts);
    ObservationSet obs(vec({1.0, 1.0}), d);
    Matrix eval_pts(3, 1);
    eval_pts << 0.5, 1.0, 2.0;
    UncertaintyReport rep = linearization_uncertainty(m, d, obs, NoiseModel(1.0), eval_pts,
                                                      SolverConfig{}, vec({1.0}));
    for (int j = 0; j < 3; ++j)
        EXPECT_NEAR(rep.variance[j], eval_pts(j, 0) * eval_pts(j, 0) / 2.0, 1e-12);
}

TEST(Linearization, RankDeficiencyIsReported) {
    // Two parameters, all observations at one input point: M is singular.
    Model m;
    m.identifier = "affine";
    m.dim_x = 1;
    m.dim_theta = 2;
    m.eval = [](const Vector& x, const Vector& t) { return t[0] + t[1] * x[0]; };
    m.jacobian = [](const Vector& x, const Vector&) {
        RowVector j(2);
        j << 1.0, x[0];
        return j;
    };
    Matrix pts(2, 1);
    pts << 1.0, 1.0;
    Design d(pts);
    ObservationSet obs(vec({2.0, 2.0}), d);
    Matrix eval_pts(1, 1);
    eval_pts << 0.0;
    EXPECT_THROW(linearization_uncertainty(m, d, obs, NoiseModel(1.0), eval_pts, SolverConfig{},
                                           vec({1.0, 1.0})),
                 NumericError);
}

TEST(Cubature, DegenerateZeroRuleCollapsesToPointPrediction) {
    QuadSetup s;
    CubatureRule rule;
    rule.label = "LD";
    rule.degree = 5;
    rule.points = Matrix::Zero(3, 8);
    rule.weights = vec({0.5, 0.25, 0.25});
    UncertaintyReport rep =
        cubature_uncertainty(rule, s.model, s.design, s.obs, s.small_grid(), s.solver, s.theta_true);
    for (Eigen::Index j = 0; j < rep.variance.size(); ++j) {
        EXPECT_EQ(rep.variance[j], 0.0);
        EXPECT_NEAR(rep.mean[j], s.model.eval(s.small_grid().row(j).transpose(), s.theta_true),
                    1e-12);
    }
}

TEST(Cubature, LuDarmofalIsExactOnNoiseFreeQuadratic) {
    QuadSetup s;
    CubatureRule rule = lu_darmofal_rule(8, s.sigma);
    UncertaintyReport rep = cubature_uncertainty(rule, s.model, s.design, s.obs, s.small_grid(),
                                                 s.solver, s.theta_true);
    for (Eigen::Index j = 0; j < rep.variance.size(); ++j) {
        const double exact =
            s.oracle.exact_prediction_uncertainty(s.small_grid().row(j).transpose());
        EXPECT_NEAR(rep.variance[j], exact, 1e-9);
    }
    EXPECT_EQ(rep.method, Method::LD);
    EXPECT_EQ(rep.metadata.at("N").get<int>(), 91);
}

TEST(Cubature, SigmaPointMatchesClosedFormOnNoiseFreeQuadratic) {
    QuadSetup s;
    const double kappa = 24.0;
    CubatureRule rule = sigma_point_rule(8, s.sigma, kappa);
    UncertaintyReport rep =
        cubature_uncertainty(rule, s.model, s.design, s.obs, s.small_grid(), s.solver, s.theta_true);
    for (Eigen::Index j = 0; j < rep.variance.size(); ++j) {
        const double want = s.oracle.exact_sigma_point_uncertainty(
            s.theta_true, kappa, s.small_grid().row(j).transpose());
        EXPECT_NEAR(rep.variance[j], want, 1e-10 * std::max(1.0, want));
    }
}

TEST(Cubature, LinearModelReproducesLinearization) {
    // For a model linear in theta the inner fits are linear, so LD equals the
    // linearization value exactly.
    Model m = linear_through_origin();
    Matrix pts(2, 1);
    pts << 1.0, 1.0;
    Design d(pts);
    ObservationSet obs(vec({0.9, 1.2}), d);
    Matrix eval_pts(4, 1);
    eval_pts << -1.0, 0.25, 0.5, 2.0;
    const double sigma = 0.7;
    UncertaintyReport ld = cubature_uncertainty(lu_darmofal_rule(2, sigma), m, d, obs, eval_pts,
                                                SolverConfig{}, vec({1.0}));
    UncertaintyReport lin = linearization_uncertainty(m, d, obs, NoiseModel(sigma), eval_pts,
                                                      SolverConfig{}, vec({1.0}));
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(ld.variance[j], lin.variance[j], 1e-12);
}

TEST(Cubature, NegativeVarianceIsFlaggedNotClamped) {
    // Hand-built rule with a dominant negative pair weight yields a negative
    // weighted spread for a pure-location model.
    Model m;
    m.identifier = "location";
    m.dim_x = 1;
    m.dim_theta = 1;
    m.eval = [](const Vector&, const Vector& t) { return t[0]; };
    m.jacobian = [](const Vector&, const Vector&) {
        RowVector j(1);
        j << 1.0;
        return j;
    };
    Matrix pts(2, 1);
    pts << 0.0, 1.0;
    Design d(pts);
    ObservationSet obs(vec({1.0, 1.0}), d);
    CubatureRule rule;
    rule.label = "MS";
    rule.degree = 5;
    rule.points = Matrix::Zero(3, 2);
    rule.points(1, 0) = rule.points(1, 1) = 0.5;
    rule.points(2, 0) = rule.points(2, 1) = -0.5;
    rule.weights = vec({1.5, -0.25, -0.25});
    Matrix eval_pts = Matrix::Zero(1, 1);
    UncertaintyReport rep =
        cubature_uncertainty(rule, m, d, obs, eval_pts, SolverConfig{}, vec({1.0}));
    EXPECT_LT(rep.variance[0], 0.0);
    EXPECT_TRUE(rep.negative_variance);
    EXPECT_NEAR(rep.variance[0], -0.125, 1e-12);  // -2 * 0.25 * 0.5^2
}

TEST(Cubature, InnerFitFailureNamesThePoint) {
    Model m = make_exponential_model();
    Design d = named_benchmark_design("exp_factorial");
    Vector y = stack_predictions(m, d, vec({0.2, 1.2}));
    ObservationSet obs(y, d);
    CubatureRule rule;
    rule.label = "LD";
    rule.degree = 5;
    rule.points = Matrix::Zero(2, 4);
    rule.points(1, 2) = 1e308;  // unfittable perturbation
    rule.weights = vec({0.5, 0.5});
    Matrix eval_pts = Matrix::Zero(1, 1);
    try {
        cubature_uncertainty(rule, m, d, obs, eval_pts, SolverConfig{}, vec({0.2, 1.2}));
        FAIL() << "expected NumericError";
    } catch (const NumericError& e) {
        EXPECT_NE(std::string(e.what()).find("point 1"), std::string::npos);
    }
}

TEST(Cubature, RuleDimensionMustMatchDesign) {
    QuadSetup s;
    EXPECT_THROW(cubature_uncertainty(lu_darmofal_rule(5, s.sigma), s.model, s.design, s.obs,
                                      s.small_grid(), s.solver, s.theta_true),
                 ContractError);
}

TEST(Reports, CsvSchema) {
    QuadSetup s;
    UncertaintyReport rep = linearization_uncertainty(s.model, s.design, s.obs, NoiseModel(s.sigma),
                                                      s.small_grid(), s.solver, s.theta_true);
    std::ostringstream os;
    write_report_csv(os, rep);
    const std::string text = os.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "method,x1,x2,mean,variance,negative_variance");
    EXPECT_EQ(size_t(6), std::count(text.begin(), text.end(), '\n'));
    EXPECT_EQ(text.substr(text.find('\n') + 1, 4), "LIN,");
}

TEST(Reports, JsonRoundTripKeys) {
    QuadSetup s;
    McConfig cfg;
    cfg.n_samples = 100;
    UncertaintyReport rep = mc_uncertainty(s.model, s.design, s.obs, NoiseModel(s.sigma),
                                           s.small_grid(), cfg, s.solver, s.theta_true);
    const nlohmann::json j = report_to_json(rep);
    for (const char* key : {"method", "eval_points", "mean", "variance", "negative_variance",
                            "metadata"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j.at("method").get<std::string>(), "MC");
    EXPECT_EQ(j.at("mean").size(), 5u);
}
