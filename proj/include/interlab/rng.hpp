#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "interlab/tensor_fwd.hpp"

namespace interlab {

// Seeded generator with hierarchical splitting: child(stream, index) derives an
// independent generator, so adding samples to one stream never perturbs another.
// All floating-point draws are produced from raw 64-bit words (no
// std::*_distribution), which keeps scenario output bit-identical across
// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    Rng child(std::uint64_t stream, std::uint64_t index = 0) const;

    std::uint64_t next_u64();
    double uniform();                 // [0, 1)
    double uniform(double lo, double hi);
    double gaussian();                // standard normal, Box-Muller

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Haar-random unitary of the given dimension (QR of a complex Gaussian matrix
// with the positive-diagonal phase convention).
ComplexOperator haar_unitary(const IndexSpace& space, Rng& rng);

// Haar-random pure state.
StateVector random_state(const IndexSpace& space, Rng& rng);

// Random density operator (normalized Wishart), kind = psd.
ComplexOperator random_density(const IndexSpace& space, Rng& rng);

// Random binary POVM effect E with 0 <= E <= 1 (its complement is 1 - E).
ComplexOperator random_effect(const IndexSpace& space, Rng& rng);

} // namespace interlab
