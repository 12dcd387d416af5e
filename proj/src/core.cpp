#include <preduq/core.hpp>

namespace preduq {

std::string method_name(Method m) {
    switch (m) {
        case Method::MC: return "MC";
        case Method::LIN: return "LIN";
        case Method::SP: return "SP";
        case Method::MS: return "MS";
        case Method::LD: return "LD";
        case Method::EXACT: return "EXACT";
    }
    throw ContractError("method_name: unknown method");
}

Method method_from_name(const std::string& name) {
    if (name == "MC") return Method::MC;
    if (name == "LIN") return Method::LIN;
    if (name == "SP") return Method::SP;
    if (name == "MS") return Method::MS;
    if (name == "LD") return Method::LD;
    if (name == "EXACT") return Method::EXACT;
    throw ContractError("method_from_name: unknown method '" + name + "'");
}

double evaluate(const Model& model, const Vector& x, const Vector& theta) {
    if (x.size() != model.dim_x)
        throw ContractError("evaluate: input has " + std::to_string(x.size()) +
                            " coordinates, model '" + model.identifier + "' expects " +
                            std::to_string(model.dim_x));
    if (theta.size() != model.dim_theta)
        throw ContractError("evaluate: parameter vector has " + std::to_string(theta.size()) +
                            " entries, model '" + model.identifier + "' expects " +
                            std::to_string(model.dim_theta));
    return model.eval(x, theta);
}

Vector stack_predictions(const Model& model, const Design& design, const Vector& theta) {
    if (design.dim_x() != model.dim_x)
        throw ContractError("stack_predictions: design dimension mismatch for model '" +
                            model.identifier + "'");
    Vector out(design.n());
    for (Eigen::Index i = 0; i < design.n(); ++i)
        out[i] = evaluate(model, design.point(i), theta);
    return out;
}

ObservationSet perturb_observations(const ObservationSet& obs, const Vector& z) {
    if (z.size() != obs.n())
        throw ContractError("perturb_observations: perturbation length mismatch");
    return ObservationSet(obs.values + z, obs.design);
}

}  // namespace preduq
