#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <preduq/core.hpp>

namespace preduq {

/// Orthogonality report for the factorial-design conditions: all coordinates
/// in {-1, 1}, zero column sums, and cross-product matrix n * I.
struct OrthogonalityReport {
    bool corners_ok = false;
    bool zero_sum_ok = false;
    bool orthogonality_ok = false;

    bool all_ok() const { return corners_ok && zero_sum_ok && orthogonality_ok; }
};

enum class DesignKind {
    full_factorial,
    fractional_factorial_d3,
    replicated_factorial,
    equidistant_grid,
    explicit_points,
};

/// Declarative design constructor. For equidistant_grid, `replicates` is the
/// number of points per dimension (>= 2) on a uniform grid over [-1,1]^dim_x.
struct DesignSpec {
    DesignKind kind = DesignKind::full_factorial;
    int dim_x = 1;
    int replicates = 1;
    std::optional<Matrix> explicit_points;

    Design build() const;
};

/// Replicated full factorial over the corners of [-1,1]^dim_x,
/// n = replicates * 2^dim_x. Corner order: first coordinate slowest, -1 before 1.
Design full_factorial(int dim_x, int replicates);

/// The 4-point fractional factorial in 3 input dimensions used for validation.
Design fractional_factorial_d3();

OrthogonalityReport check_orthogonal(const Design& design);

/// Benchmark design matrices, reproduced bit-exactly. Known names:
/// quad1d_factorial, quad1d_equidistant, quad2d_factorial, quad2d_equidistant,
/// exp_factorial, exp_equidistant, nrtl_factorial, nrtl_equidistant,
/// quad2d_validation.
Design named_benchmark_design(const std::string& name);

std::vector<std::string> benchmark_design_names();

/// One row per design point, comma-separated coordinates (provenance logging).
void write_design_csv(std::ostream& os, const Design& design);

}  // namespace preduq
