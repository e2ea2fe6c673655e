#pragma once

#include <cstddef>

namespace interlab {

// Structural checks: unitarity, orthonormality, POVM completeness.
inline constexpr double EPS_NORM = 1e-10;

// Probability comparisons.
inline constexpr double EPS_EQ = 1e-9;

// Spectral and unitary reconstruction residuals.
inline constexpr double RECON_TOL = 1e-8;

// Spatial support detection in canonical forms.
inline constexpr double SUPPORT_TOL = 1e-10;

// Gate for the maximal-interference precondition of the completion builders.
inline constexpr double MAXIMALITY_TOL = 1e-7;

// Default cap on composite dimensions for tensor products.
inline constexpr std::size_t DIM_CAP = 4096;

} // namespace interlab
