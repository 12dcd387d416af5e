#include <preduq/config.hpp>

#include <cmath>

namespace preduq {

namespace {

Vector to_vector(const nlohmann::json& j) {
    Vector v(j.size());
    Eigen::Index i = 0;
    for (const auto& x : j) v[i++] = x.get<double>();
    return v;
}

nlohmann::json from_vector(const Vector& v) {
    nlohmann::json j = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
    return j;
}

}  // namespace

std::string init_strategy_name(InitStrategy s) {
    switch (s) {
        case InitStrategy::given: return "given";
        case InitStrategy::perturbed_given: return "perturbed_given";
        case InitStrategy::random_box: return "random_box";
    }
    throw ContractError("init_strategy_name: unknown strategy");
}

InitStrategy init_strategy_from_name(const std::string& name) {
    if (name == "given") return InitStrategy::given;
    if (name == "perturbed_given") return InitStrategy::perturbed_given;
    if (name == "random_box") return InitStrategy::random_box;
    throw ContractError("init_strategy_from_name: unknown strategy '" + name + "'");
}

RunConfig default_config_for_model(const std::string& model_type) {
    RunConfig cfg;
    cfg.model_type = model_type;
    cfg.solver = SolverConfig::outer_defaults();
    if (model_type == "quad1d") {
        cfg.dim_x = 1;
        cfg.alpha = Vector::Ones(1);
        cfg.beta = Vector::Ones(1);
        cfg.theta_true = Vector(2);
        cfg.theta_true << 2.74, -4.6;
        cfg.grid_bounds = {{-1.0, 1.0}};
        cfg.probe = Vector::Zero(1);
    } else if (model_type == "quad2d") {
        cfg.dim_x = 2;
        cfg.alpha = Vector::Ones(2);
        cfg.beta = Vector::Ones(2);
        cfg.theta_true = Vector(3);
        cfg.theta_true << 27.39, -46.04, -91.81;
        cfg.grid_bounds = {{-1.0, 1.0}, {-1.0, 1.0}};
        cfg.probe = Vector(2);
        cfg.probe << -1.0, 0.03;
    } else if (model_type == "exp") {
        cfg.dim_x = 1;
        cfg.theta_true = Vector(2);
        cfg.theta_true << 0.2, 1.2;
        cfg.grid_bounds = {{-1.0, 1.0}};
        cfg.probe = Vector::Zero(1);
    } else if (model_type == "nrtl") {
        cfg.dim_x = 2;
        cfg.theta_true = Vector(2);
        cfg.theta_true << -173.4982, -61.8175;
        cfg.grid_bounds = {{0.01, 0.99}, {298.15, 373.15}};
        cfg.probe = Vector(2);
        cfg.probe << 0.0, 336.86;
    } else {
        throw ContractError("default_config_for_model: unknown model '" + model_type +
                            "' (expected quad1d, quad2d, exp, or nrtl)");
    }
    cfg.sigma = 0.1;
    cfg.sample_counts = {100, 316, 1000, 3162, 10000, 31623, 100000, 316228, 1000000};
    return cfg;
}

std::string resolve_design_name(const std::string& model_type, const std::string& name) {
    if (name == "factorial" || name == "equidistant") {
        const std::string prefix = (model_type == "quad1d" || model_type == "quad2d" ||
                                    model_type == "exp" || model_type == "nrtl")
                                       ? model_type
                                       : throw ContractError("resolve_design_name: unknown model");
        return prefix + "_" + name;
    }
    if (name == "validation") {
        if (model_type != "quad2d")
            throw ContractError("resolve_design_name: 'validation' design exists only for quad2d");
        return "quad2d_validation";
    }
    return name;
}

void apply_config_json(RunConfig& cfg, const nlohmann::json& j) {
    if (j.contains("model")) {
        const auto& m = j.at("model");
        if (m.contains("type")) {
            const std::string type = m.at("type").get<std::string>();
            if (type != cfg.model_type) {
                const RunConfig fresh = default_config_for_model(type);
                cfg.model_type = fresh.model_type;
                cfg.dim_x = fresh.dim_x;
                cfg.alpha = fresh.alpha;
                cfg.beta = fresh.beta;
                cfg.theta_true = fresh.theta_true;
                cfg.grid_bounds = fresh.grid_bounds;
                cfg.probe = fresh.probe;
            }
        }
        if (m.contains("dim_x")) cfg.dim_x = m.at("dim_x").get<int>();
        if (m.contains("alpha")) cfg.alpha = to_vector(m.at("alpha"));
        if (m.contains("beta")) cfg.beta = to_vector(m.at("beta"));
        if (m.contains("theta_true")) cfg.theta_true = to_vector(m.at("theta_true"));
        if (m.contains("nrtl")) {
            const auto& n = m.at("nrtl");
            if (n.contains("a12")) cfg.nrtl.a12 = n.at("a12").get<double>();
            if (n.contains("a21")) cfg.nrtl.a21 = n.at("a21").get<double>();
            if (n.contains("c12")) cfg.nrtl.c12 = n.at("c12").get<double>();
        }
    }
    if (j.contains("design")) {
        const auto& d = j.at("design");
        if (d.contains("name")) {
            cfg.design_name = resolve_design_name(cfg.model_type, d.at("name").get<std::string>());
            cfg.explicit_points.reset();
        }
        if (d.contains("points")) {
            const auto& rows = d.at("points");
            if (rows.empty()) throw ContractError("config: design.points must not be empty");
            Matrix pts(rows.size(), rows.front().size());
            Eigen::Index r = 0;
            for (const auto& row : rows) {
                if (Eigen::Index(row.size()) != pts.cols())
                    throw ContractError("config: ragged design.points");
                Eigen::Index c = 0;
                for (const auto& v : row) pts(r, c++) = v.get<double>();
                ++r;
            }
            cfg.explicit_points = std::move(pts);
            cfg.design_name = "explicit";
        }
    }
    if (j.contains("noise") && j.at("noise").contains("sigma"))
        cfg.sigma = j.at("noise").at("sigma").get<double>();
    if (j.contains("estimators")) {
        const auto& e = j.at("estimators");
        if (e.contains("methods")) {
            cfg.methods.clear();
            for (const auto& name : e.at("methods"))
                cfg.methods.push_back(method_from_name(name.get<std::string>()));
        }
        if (e.contains("kappa"))
            cfg.kappa = e.at("kappa").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                : e.at("kappa").get<double>();
        if (e.contains("n_mc")) cfg.n_mc = e.at("n_mc").get<Eigen::Index>();
        if (e.contains("method_samples"))
            cfg.method_samples = e.at("method_samples").get<Eigen::Index>();
        if (e.contains("seed")) cfg.seed = e.at("seed").get<std::uint64_t>();
        if (e.contains("sequence"))
            cfg.sequence = sequence_from_name(e.at("sequence").get<std::string>());
    }
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (g.contains("points_per_dim")) cfg.points_per_dim = g.at("points_per_dim").get<int>();
        if (g.contains("bounds")) {
            cfg.grid_bounds.clear();
            for (const auto& b : g.at("bounds"))
                cfg.grid_bounds.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
        }
    }
    if (j.contains("mc_convergence")) {
        const auto& c = j.at("mc_convergence");
        if (c.contains("probe")) cfg.probe = to_vector(c.at("probe"));
        if (c.contains("sample_counts")) {
            cfg.sample_counts.clear();
            for (const auto& v : c.at("sample_counts"))
                cfg.sample_counts.push_back(v.get<Eigen::Index>());
        }
    }
    if (j.contains("validation") && j.at("validation").contains("ld_exactness_bound"))
        cfg.ld_exactness_bound = j.at("validation").at("ld_exactness_bound").get<double>();
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        if (s.contains("max_iterations")) cfg.solver.max_iterations = s.at("max_iterations").get<int>();
        if (s.contains("gradient_tolerance"))
            cfg.solver.gradient_tolerance = s.at("gradient_tolerance").get<double>();
        if (s.contains("step_tolerance"))
            cfg.solver.step_tolerance = s.at("step_tolerance").get<double>();
        if (s.contains("multistart_count"))
            cfg.solver.multistart_count = s.at("multistart_count").get<int>();
        if (s.contains("init_strategy"))
            cfg.solver.init_strategy = init_strategy_from_name(s.at("init_strategy").get<std::string>());
        if (s.contains("damping_init")) cfg.solver.damping_init = s.at("damping_init").get<double>();
    }
    if (j.contains("output") && j.at("output").contains("dir"))
        cfg.out_dir = j.at("output").at("dir").get<std::string>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
}

nlohmann::json config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["model"]["type"] = cfg.model_type;
    j["model"]["dim_x"] = cfg.dim_x;
    if (cfg.alpha.size()) j["model"]["alpha"] = from_vector(cfg.alpha);
    if (cfg.beta.size()) j["model"]["beta"] = from_vector(cfg.beta);
    if (cfg.theta_true.size()) j["model"]["theta_true"] = from_vector(cfg.theta_true);
    if (cfg.model_type == "nrtl")
        j["model"]["nrtl"] = {{"a12", cfg.nrtl.a12}, {"a21", cfg.nrtl.a21}, {"c12", cfg.nrtl.c12}};
    if (cfg.explicit_points) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index r = 0; r < cfg.explicit_points->rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index c = 0; c < cfg.explicit_points->cols(); ++c)
                row.push_back((*cfg.explicit_points)(r, c));
            rows.push_back(std::move(row));
        }
        j["design"]["points"] = std::move(rows);
    } else {
        j["design"]["name"] = cfg.design_name;
    }
    j["noise"]["sigma"] = cfg.sigma;
    nlohmann::json methods = nlohmann::json::array();
    for (Method m : cfg.methods) methods.push_back(method_name(m));
    j["estimators"] = {{"methods", std::move(methods)},
                       {"n_mc", cfg.n_mc},
                       {"method_samples", cfg.method_samples},
                       {"seed", cfg.seed},
                       {"sequence", sequence_name(cfg.sequence)}};
    if (std::isnan(cfg.kappa))
        j["estimators"]["kappa"] = nullptr;
    else
        j["estimators"]["kappa"] = cfg.kappa;
    nlohmann::json bounds = nlohmann::json::array();
    for (const auto& [lo, hi] : cfg.grid_bounds) bounds.push_back({lo, hi});
    j["grid"] = {{"points_per_dim", cfg.points_per_dim}, {"bounds", std::move(bounds)}};
    j["mc_convergence"] = {{"probe", from_vector(cfg.probe)},
                           {"sample_counts", cfg.sample_counts}};
    j["validation"]["ld_exactness_bound"] = cfg.ld_exactness_bound;
    j["solver"] = {{"max_iterations", cfg.solver.max_iterations},
                   {"gradient_tolerance", cfg.solver.gradient_tolerance},
                   {"step_tolerance", cfg.solver.step_tolerance},
                   {"multistart_count", cfg.solver.multistart_count},
                   {"init_strategy", init_strategy_name(cfg.solver.init_strategy)},
                   {"damping_init", cfg.solver.damping_init}};
    j["output"]["dir"] = cfg.out_dir;
    j["threads"] = cfg.threads;
    return j;
}

Model build_model(const RunConfig& cfg) {
    if (cfg.model_type == "quad1d" || cfg.model_type == "quad2d")
        return make_quadratic_model(QuadraticModelSpec(cfg.dim_x, cfg.alpha, cfg.beta));
    if (cfg.model_type == "exp") return make_exponential_model();
    if (cfg.model_type == "nrtl") return make_nrtl_model(cfg.nrtl);
    throw ContractError("build_model: unknown model type '" + cfg.model_type + "'");
}

Design build_design(const RunConfig& cfg) {
    if (cfg.explicit_points) return Design(*cfg.explicit_points);
    if (cfg.design_name.empty())
        throw ContractError("build_design: no design configured");
    return named_benchmark_design(cfg.design_name);
}

Matrix build_grid(const RunConfig& cfg) {
    GridSpec spec;
    spec.dim_x = cfg.dim_x;
    spec.points_per_dim = cfg.points_per_dim;
    spec.bounds = cfg.grid_bounds;
    return spec.make_points();
}

Vector default_probe(const RunConfig& cfg) {
    return cfg.probe;
}

}  // namespace preduq
