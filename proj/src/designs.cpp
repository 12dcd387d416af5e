#include <preduq/designs.hpp>

#include <cstdio>
#include <ostream>

namespace preduq {

Design DesignSpec::build() const {
    switch (kind) {
        case DesignKind::full_factorial:
            return full_factorial(dim_x, 1);
        case DesignKind::replicated_factorial:
            return full_factorial(dim_x, replicates);
        case DesignKind::fractional_factorial_d3:
            return fractional_factorial_d3();
        case DesignKind::equidistant_grid: {
            if (replicates < 2)
                throw ContractError("DesignSpec: equidistant_grid needs >= 2 points per dimension");
            if (dim_x < 1 || dim_x > 6)
                throw ContractError("DesignSpec: equidistant_grid supports 1..6 dimensions");
            Eigen::Index total = 1;
            for (int k = 0; k < dim_x; ++k) total *= replicates;
            Matrix pts(total, dim_x);
            for (Eigen::Index idx = 0; idx < total; ++idx) {
                Eigen::Index rem = idx;
                for (int k = dim_x - 1; k >= 0; --k) {
                    const Eigen::Index step = rem % replicates;
                    rem /= replicates;
                    pts(idx, k) = -1.0 + 2.0 * double(step) / double(replicates - 1);
                }
            }
            return Design(std::move(pts));
        }
        case DesignKind::explicit_points:
            if (!explicit_points)
                throw ContractError("DesignSpec: explicit kind requires explicit_points");
            return Design(*explicit_points);
    }
    throw ContractError("DesignSpec: unknown kind");
}

Design full_factorial(int dim_x, int replicates) {
    if (dim_x < 1) throw ContractError("full_factorial: dim_x must be >= 1");
    if (dim_x > 20) throw ContractError("full_factorial: dim_x > 20 rejected (2^dim_x points)");
    if (replicates < 1) throw ContractError("full_factorial: replicates must be >= 1");
    const Eigen::Index corners = Eigen::Index(1) << dim_x;
    Matrix pts(replicates * corners, dim_x);
    for (int r = 0; r < replicates; ++r)
        for (Eigen::Index c = 0; c < corners; ++c)
            for (int k = 0; k < dim_x; ++k)
                pts(r * corners + c, k) = ((c >> (dim_x - 1 - k)) & 1) ? 1.0 : -1.0;
    return Design(std::move(pts));
}

Design fractional_factorial_d3() {
    Matrix pts(4, 3);
    pts << -1, -1, -1,
            1, -1,  1,
           -1,  1,  1,
            1,  1, -1;
    return Design(std::move(pts));
}

OrthogonalityReport check_orthogonal(const Design& design) {
    OrthogonalityReport rep;
    const Matrix& X = design.points;
    rep.corners_ok = ((X.array() == 1.0) || (X.array() == -1.0)).all();
    // +-1 entries make these sums exact in double arithmetic.
    rep.zero_sum_ok = (X.colwise().sum().array() == 0.0).all();
    Matrix cross = X.transpose() * X;
    Matrix expected = double(design.n()) * Matrix::Identity(design.dim_x(), design.dim_x());
    rep.orthogonality_ok = (cross.array() == expected.array()).all();
    return rep;
}

namespace {

constexpr double kT1 = 298.15;
constexpr double kT2 = 335.15;
constexpr double kT3 = 373.15;

Design from_columns(std::initializer_list<std::initializer_list<double>> rows) {
    const Eigen::Index n_coords = Eigen::Index(rows.size());
    const Eigen::Index n_points = Eigen::Index(rows.begin()->size());
    Matrix pts = Matrix::Zero(n_points, n_coords);
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        Eigen::Index c = 0;
        for (double v : row) pts(c++, r) = v;
        ++r;
    }
    return Design(std::move(pts));
}

}  // namespace

Design named_benchmark_design(const std::string& name) {
    if (name == "quad1d_factorial" || name == "exp_factorial")
        return from_columns({{-1, -1, 1, 1}});
    if (name == "quad1d_equidistant" || name == "exp_equidistant")
        return from_columns({{-1, -0.33, 0.33, 1}});
    if (name == "quad2d_factorial")
        return from_columns({{-1, -1,  1, 1, -1, -1,  1, 1, -1},
                             {-1,  1, -1, 1, -1,  1, -1, 1, -1}});
    if (name == "quad2d_equidistant")
        return from_columns({{-1,  0,  1, -1, 0, 1, -1, 0, 1},
                             {-1, -1, -1,  0, 0, 0,  1, 1, 1}});
    if (name == "quad2d_validation")
        return from_columns({{-1, -1,  1, 1, -1, -1,  1, 1},
                             {-1,  1, -1, 1, -1,  1, -1, 1}});
    if (name == "nrtl_factorial")
        return from_columns({{0.01, 0.01, 0.99, 0.99, 0.01, 0.01, 0.99, 0.99, 0.01},
                             {kT1,  kT3,  kT1,  kT3,  kT1,  kT3,  kT1,  kT3,  kT1}});
    if (name == "nrtl_equidistant")
        return from_columns({{0.01, 0.5, 0.99, 0.01, 0.5, 0.99, 0.01, 0.5, 0.99},
                             {kT1,  kT1, kT1,  kT2,  kT2, kT2,  kT3,  kT3, kT3}});
    throw ContractError("named_benchmark_design: unknown design '" + name + "'");
}

std::vector<std::string> benchmark_design_names() {
    return {"quad1d_factorial", "quad1d_equidistant", "quad2d_factorial", "quad2d_equidistant",
            "exp_factorial",    "exp_equidistant",    "nrtl_factorial",   "nrtl_equidistant",
            "quad2d_validation"};
}

void write_design_csv(std::ostream& os, const Design& design) {
    char buf[64];
    for (Eigen::Index i = 0; i < design.n(); ++i) {
        for (Eigen::Index k = 0; k < design.dim_x(); ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g", design.points(i, k));
            os << (k ? "," : "") << buf;
        }
        os << "\n";
    }
}

}  // namespace preduq
