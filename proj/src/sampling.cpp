#include <preduq/sampling.hpp>

#include <bit>
#include <cmath>
#include <random>

namespace preduq {

namespace {
#include "sobol_joe_kuo.inc"

constexpr int kBits = 32;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::string sequence_name(Sequence s) {
    return s == Sequence::sobol ? "sobol" : "pseudorandom";
}

Sequence sequence_from_name(const std::string& name) {
    if (name == "sobol") return Sequence::sobol;
    if (name == "pseudorandom") return Sequence::pseudorandom;
    throw ContractError("sequence_from_name: unknown sequence '" + name + "'");
}

double inverse_normal_cdf(double p) {
    // Wichura's algorithm AS241, PPND16.
    if (!(p > 0.0 && p < 1.0))
        throw ContractError("inverse_normal_cdf: p must lie strictly in (0, 1)");
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double z;
    if (r <= 5.0) {
        r -= 1.6;
        z = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        z = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -z : z;
}

SobolSequence::SobolSequence(int dim, std::uint64_t seed) : dim_(dim) {
    constexpr int kMaxDim = 1 + sizeof(kJoeKuo) / sizeof(kJoeKuo[0]);
    if (dim < 1) throw ContractError("SobolSequence: dim must be >= 1");
    if (dim > kMaxDim)
        throw ContractError("SobolSequence: dim > " + std::to_string(kMaxDim) +
                            " not supported; use the pseudorandom sequence");
    direction_.assign(size_t(dim) * kBits, 0);
    // Dimension 0: van der Corput.
    for (int j = 0; j < kBits; ++j) direction_[j] = 1u << (kBits - 1 - j);
    for (int k = 1; k < dim; ++k) {
        const JoeKuoEntry& e = kJoeKuo[k - 1];
        const int s = int(e.degree);
        std::uint32_t* v = &direction_[size_t(k) * kBits];
        for (int j = 0; j < s; ++j) v[j] = e.m[j] << (kBits - 1 - j);
        for (int j = s; j < kBits; ++j) {
            std::uint32_t val = (v[j - s] >> s) ^ v[j - s];
            for (int t = 1; t < s; ++t)
                if ((e.poly >> (s - 1 - t)) & 1u) val ^= v[j - t];
            v[j] = val;
        }
    }
    shift_.resize(dim);
    for (int k = 0; k < dim; ++k)
        shift_[k] = std::uint32_t(splitmix64(seed ^ splitmix64(0x50b0u + std::uint64_t(k))) >> 32);
    state_.assign(dim, 0);
    index_ = 0;
}

void SobolSequence::next(double* out) {
    // Advance from index_ to index_+1 via the Gray-code recurrence; index 0
    // (the all-zeros point) is never emitted.
    const int flip = std::countr_one(index_);
    ++index_;
    if (index_ == 0) throw NumericError("SobolSequence: 2^32 point budget exhausted");
    for (int k = 0; k < dim_; ++k) {
        state_[size_t(k)] ^= direction_[size_t(k) * kBits + flip];
        const std::uint32_t bits = state_[size_t(k)] ^ shift_[size_t(k)];
        out[k] = (double(bits) + 0.5) * 0x1.0p-32;
    }
}

Matrix normal_deviates(Eigen::Index count, int dim, std::uint64_t seed, Sequence sequence) {
    if (dim < 1) throw ContractError("normal_deviates: dim must be >= 1");
    if (count < 0) throw ContractError("normal_deviates: negative count");
    Matrix out(count, dim);
    if (sequence == Sequence::sobol) {
        SobolSequence sobol(dim, seed);
        std::vector<double> u(static_cast<size_t>(dim), 0.0);
        for (Eigen::Index i = 0; i < count; ++i) {
            sobol.next(u.data());
            for (int k = 0; k < dim; ++k) out(i, k) = inverse_normal_cdf(u[size_t(k)]);
        }
    } else {
        std::mt19937_64 rng(splitmix64(seed));
        for (Eigen::Index i = 0; i < count; ++i)
            for (int k = 0; k < dim; ++k) {
                // (0,1) uniform with 52-bit resolution, never exactly 0 or 1
                const double u = (double(rng() >> 12) + 0.5) * 0x1.0p-52;
                out(i, k) = inverse_normal_cdf(u);
            }
    }
    return out;
}

Matrix sobol_normal(Eigen::Index count, int dim, std::uint64_t seed) {
    return normal_deviates(count, dim, seed, Sequence::sobol);
}

}  // namespace preduq
