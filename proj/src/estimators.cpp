#include <preduq/estimators.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>

#include <preduq/parallel.hpp>

namespace preduq {

namespace {

void check_eval_points(const Model& model, const Matrix& eval_points) {
    if (eval_points.cols() != model.dim_x)
        throw ContractError("eval_points dimension does not match model '" + model.identifier + "'");
    if (eval_points.rows() < 1) throw ContractError("eval_points must contain at least one point");
}

SolverConfig inner_config(const SolverConfig& outer) {
    SolverConfig c = outer;
    c.multistart_count = 1;
    c.init_strategy = InitStrategy::given;
    return c;
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

UncertaintyReport mc_uncertainty(const Model& model, const Design& design,
                                 const ObservationSet& center_obs, const NoiseModel& noise,
                                 const Matrix& eval_points, const McConfig& cfg,
                                 const SolverConfig& solver, const Vector& init, int threads) {
    cfg.validate();
    check_eval_points(model, eval_points);
    if (center_obs.n() != design.n())
        throw ContractError("mc_uncertainty: center observations do not match design size");

    const Eigen::Index n = design.n();
    const Eigen::Index N = cfg.n_samples;
    const ParameterEstimate center_fit = fit(model, design, center_obs, init, solver);

    const Matrix deviates = normal_deviates(N, int(n), cfg.seed, cfg.sequence);
    const SolverConfig inner = inner_config(solver);

    Matrix theta_hat(N, model.dim_theta);
    std::vector<char> ok(size_t(N), 0);
    parallel_for_chunks(N, threads, [&](Eigen::Index begin, Eigen::Index end) {
        for (Eigen::Index i = begin; i < end; ++i) {
            try {
                const Vector z = noise.sigma * deviates.row(i).transpose();
                ObservationSet perturbed = perturb_observations(center_obs, z);
                ParameterEstimate est = fit(model, design, perturbed, center_fit.theta, inner);
                if (est.converged) {
                    theta_hat.row(i) = est.theta.transpose();
                    ok[size_t(i)] = 1;
                }
            } catch (const NumericError&) {
                // recorded as an exclusion below
            }
        }
    });

    Eigen::Index excluded = 0;
    for (char o : ok)
        if (!o) ++excluded;
    if (double(excluded) >= 1e-3 * double(N))
        throw NumericError("mc_uncertainty: " + std::to_string(excluded) + " of " +
                           std::to_string(N) + " inner fits failed (budget is 0.1%)");

    const Eigen::Index m = eval_points.rows();
    UncertaintyReport report;
    report.method = Method::MC;
    report.eval_points = eval_points;
    report.mean = Vector(m);
    report.variance = Vector(m);
    parallel_for_chunks(m, threads, [&](Eigen::Index begin, Eigen::Index end) {
        Vector theta(model.dim_theta);
        for (Eigen::Index j = begin; j < end; ++j) {
            const Vector x = eval_points.row(j).transpose();
            double mean = 0.0, m2 = 0.0;
            Eigen::Index count = 0;
            for (Eigen::Index i = 0; i < N; ++i) {
                if (!ok[size_t(i)]) continue;
                theta = theta_hat.row(i).transpose();
                const double g = model.eval(x, theta);
                ++count;
                const double d = g - mean;
                mean += d / double(count);
                m2 += d * (g - mean);
            }
            report.mean[j] = mean;
            report.variance[j] = m2 / double(count);
        }
    });

    report.metadata = {{"n_mc", N},
                       {"n_excluded", excluded},
                       {"seed", cfg.seed},
                       {"sequence", sequence_name(cfg.sequence)},
                       {"sigma", noise.sigma}};
    return report;
}

UncertaintyReport linearization_uncertainty(const Model& model, const Design& design,
                                            const ObservationSet& obs, const NoiseModel& noise,
                                            const Matrix& eval_points, const SolverConfig& solver,
                                            const Vector& init, int threads) {
    check_eval_points(model, eval_points);
    const ParameterEstimate theta_bar = fit(model, design, obs, init, solver);

    const Matrix J = model_jacobian_matrix(model, design, theta_bar.theta);
    const Matrix M = J.transpose() * J / (noise.sigma * noise.sigma);

    Eigen::SelfAdjointEigenSolver<Matrix> eig(M);
    const double lmin = eig.eigenvalues().minCoeff();
    const double lmax = eig.eigenvalues().maxCoeff();
    if (!(lmin > 0.0) || lmax / lmin > 1e12)
        throw NumericError("linearization_uncertainty: information matrix rank-deficient for design (n=" +
                           std::to_string(design.n()) + ", dim_x=" + std::to_string(design.dim_x()) +
                           "); condition number exceeds 1e12");
    const Eigen::LDLT<Matrix> M_fact(M);

    const Eigen::Index m = eval_points.rows();
    UncertaintyReport report;
    report.method = Method::LIN;
    report.eval_points = eval_points;
    report.mean = Vector(m);
    report.variance = Vector(m);
    parallel_for_chunks(m, threads, [&](Eigen::Index begin, Eigen::Index end) {
        for (Eigen::Index j = begin; j < end; ++j) {
            const Vector x = eval_points.row(j).transpose();
            const RowVector jx = model.has_jacobian()
                                     ? model.jacobian(x, theta_bar.theta)
                                     : finite_difference_jacobian_row(model, x, theta_bar.theta);
            report.variance[j] = (jx * M_fact.solve(jx.transpose())).value();
            report.mean[j] = model.eval(x, theta_bar.theta);
        }
    });

    report.metadata = {{"sigma", noise.sigma},
                       {"theta_bar_sse", theta_bar.sse},
                       {"theta_bar_converged", theta_bar.converged}};
    return report;
}

UncertaintyReport cubature_uncertainty(const CubatureRule& rule, const Model& model,
                                       const Design& design, const ObservationSet& obs,
                                       const Matrix& eval_points, const SolverConfig& solver,
                                       const Vector& init, int threads) {
    check_eval_points(model, eval_points);
    if (rule.dim() != design.n())
        throw ContractError("cubature_uncertainty: rule dimension " + std::to_string(rule.dim()) +
                            " does not match design size " + std::to_string(design.n()));

    const ParameterEstimate theta_bar = fit(model, design, obs, init, solver);
    const Vector y_bar = stack_predictions(model, design, theta_bar.theta);
    const ObservationSet center(y_bar, design);
    const SolverConfig inner = inner_config(solver);

    const Eigen::Index N = rule.size();
    Matrix theta_hat(N, model.dim_theta);
    std::vector<std::string> failure(static_cast<size_t>(N));
    parallel_for_chunks(N, threads, [&](Eigen::Index begin, Eigen::Index end) {
        for (Eigen::Index i = begin; i < end; ++i) {
            try {
                ObservationSet perturbed = perturb_observations(center, rule.points.row(i).transpose());
                ParameterEstimate est = fit(model, design, perturbed, theta_bar.theta, inner);
                if (!est.converged) {
                    failure[size_t(i)] = "inner fit did not converge (gradient norm " +
                                         format_g17(est.gradient_norm) + ")";
                    continue;
                }
                theta_hat.row(i) = est.theta.transpose();
            } catch (const NumericError& e) {
                failure[size_t(i)] = e.what();
            }
        }
    });
    for (Eigen::Index i = 0; i < N; ++i)
        if (!failure[size_t(i)].empty())
            throw NumericError("cubature_uncertainty[" + rule.label + "]: inner fit failed at point " +
                               std::to_string(i) + ": " + failure[size_t(i)]);

    const Eigen::Index m = eval_points.rows();
    UncertaintyReport report;
    report.method = method_from_name(rule.label);
    report.eval_points = eval_points;
    report.mean = Vector(m);
    report.variance = Vector(m);
    std::vector<char> negative(size_t(m), 0);
    parallel_for_chunks(m, threads, [&](Eigen::Index begin, Eigen::Index end) {
        Vector g(N), theta(model.dim_theta);
        for (Eigen::Index j = begin; j < end; ++j) {
            const Vector x = eval_points.row(j).transpose();
            for (Eigen::Index i = 0; i < N; ++i) {
                theta = theta_hat.row(i).transpose();
                g[i] = model.eval(x, theta);
            }
            double mu = 0.0;
            for (Eigen::Index i = 0; i < N; ++i) mu += rule.weights[i] * g[i];
            double var = 0.0;
            for (Eigen::Index i = 0; i < N; ++i) {
                const double d = g[i] - mu;
                var += rule.weights[i] * d * d;
            }
            report.mean[j] = mu;
            report.variance[j] = var;
            if (var < 0.0) negative[size_t(j)] = 1;
        }
    });
    for (char f : negative)
        if (f) report.negative_variance = true;

    report.metadata = {{"rule", rule.label},
                       {"N", N},
                       {"degree", rule.degree},
                       {"theta_bar_sse", theta_bar.sse}};
    if (!std::isnan(rule.kappa)) report.metadata["kappa"] = rule.kappa;
    return report;
}

void write_report_csv(std::ostream& os, const UncertaintyReport& report) {
    const Eigen::Index d = report.eval_points.cols();
    os << "method";
    for (Eigen::Index k = 0; k < d; ++k) os << ",x" << (k + 1);
    os << ",mean,variance,negative_variance\n";
    for (Eigen::Index j = 0; j < report.eval_points.rows(); ++j) {
        os << method_name(report.method);
        for (Eigen::Index k = 0; k < d; ++k) os << "," << format_g17(report.eval_points(j, k));
        os << "," << format_g17(report.mean[j]) << "," << format_g17(report.variance[j]) << ","
           << (report.variance[j] < 0.0 ? 1 : 0) << "\n";
    }
}

nlohmann::json report_to_json(const UncertaintyReport& report) {
    nlohmann::json points = nlohmann::json::array();
    for (Eigen::Index j = 0; j < report.eval_points.rows(); ++j) {
        nlohmann::json p = nlohmann::json::array();
        for (Eigen::Index k = 0; k < report.eval_points.cols(); ++k)
            p.push_back(report.eval_points(j, k));
        points.push_back(std::move(p));
    }
    return {{"method", method_name(report.method)},
            {"eval_points", std::move(points)},
            {"mean", std::vector<double>(report.mean.begin(), report.mean.end())},
            {"variance", std::vector<double>(report.variance.begin(), report.variance.end())},
            {"negative_variance", report.negative_variance},
            {"metadata", report.metadata}};
}

}  // namespace preduq
