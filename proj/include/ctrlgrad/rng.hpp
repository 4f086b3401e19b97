#pragma once

#include <cstdint>
#include <random>

#include "ctrlgrad/linalg.hpp"

namespace ctrlgrad {

/// Reproducible random stream.
///
/// Generator: std::mt19937_64 (its output sequence is fixed by the C++
/// standard). Uniform doubles take the top 53 bits of one draw. Gaussian
/// variates use the Box–Muller transform on two uniforms (u1, u2), returning
/// sqrt(-2 ln(1-u1))·cos(2π u2) first and caching the matching sin branch for
/// the next call. Matrices are filled row-major.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform();
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);
    double gaussian();

    Vector gaussian_vector(std::size_t n);
    Matrix gaussian_matrix(std::size_t rows, std::size_t cols);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// splitmix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace ctrlgrad
