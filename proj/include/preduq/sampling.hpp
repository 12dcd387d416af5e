#pragma once

#include <cstdint>

#include <preduq/core.hpp>

namespace preduq {

enum class Sequence { sobol, pseudorandom };

std::string sequence_name(Sequence s);
Sequence sequence_from_name(const std::string& name);

/// Inverse standard-normal CDF (Wichura AS241, double precision).
/// Requires p strictly inside (0, 1).
double inverse_normal_cdf(double p);

/**
 * Gray-code Sobol sequence in `dim` dimensions (dim <= 129), digitally
 * shifted by a seed-derived mask per dimension. The all-zeros index-0 point
 * is skipped; next() returns points in (0,1)^dim.
 */
class SobolSequence {
public:
    SobolSequence(int dim, std::uint64_t seed);

    void next(double* out);  // writes dim values

    int dim() const { return dim_; }

private:
    int dim_;
    std::uint32_t index_ = 0;
    std::vector<std::uint32_t> state_;      // current Gray-code integers, per dim
    std::vector<std::uint32_t> shift_;      // digital scramble masks, per dim
    std::vector<std::uint32_t> direction_;  // dim x 32, row-major
};

/// count x dim matrix of standard-normal deviates from the chosen sequence.
/// Deterministic in (count, dim, seed); rows are sequence order (prefix-stable).
Matrix normal_deviates(Eigen::Index count, int dim, std::uint64_t seed, Sequence sequence);

/// Sobol variant of normal_deviates (low-discrepancy points through the
/// inverse normal CDF).
Matrix sobol_normal(Eigen::Index count, int dim, std::uint64_t seed);

}  // namespace preduq
