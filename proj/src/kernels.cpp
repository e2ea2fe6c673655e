#include "interlab/kernels.hpp"

#include <complex>
#include <cstdint>

namespace interlab::kernels {

namespace {
// Below this dimension the OpenMP fork costs more than the work.
constexpr std::size_t kParallelThreshold = 64;
}

void multiply(cdouble* c, const cdouble* a, const cdouble* b, std::size_t dim) {
    const std::int64_t n = static_cast<std::int64_t>(dim);
#pragma omp parallel for schedule(static) if (dim >= kParallelThreshold)
    for (std::int64_t i = 0; i < n; ++i) {
        const cdouble* arow = a + i * n;
        cdouble* crow = c + i * n;
        for (std::int64_t j = 0; j < n; ++j) {
            cdouble acc(0.0, 0.0);
            for (std::int64_t k = 0; k < n; ++k) acc += arow[k] * b[k * n + j];
            crow[j] = acc;
        }
    }
}

void kron(cdouble* c, const cdouble* a, std::size_t da, const cdouble* b,
          std::size_t db) {
    const std::int64_t na = static_cast<std::int64_t>(da);
    const std::int64_t nb = static_cast<std::int64_t>(db);
    const std::int64_t n = na * nb;
#pragma omp parallel for schedule(static) if (da * db >= kParallelThreshold)
    for (std::int64_t r = 0; r < n; ++r) {
        const std::int64_t ia = r / nb;
        const std::int64_t ib = r % nb;
        const cdouble* arow = a + ia * na;
        const cdouble* brow = b + ib * nb;
        cdouble* crow = c + r * n;
        for (std::int64_t ja = 0; ja < na; ++ja) {
            const cdouble av = arow[ja];
            cdouble* cblk = crow + ja * nb;
            for (std::int64_t jb = 0; jb < nb; ++jb) cblk[jb] = av * brow[jb];
        }
    }
}

void matvec(cdouble* y, const cdouble* a, const cdouble* x, std::size_t dim) {
    const std::int64_t n = static_cast<std::int64_t>(dim);
#pragma omp parallel for schedule(static) if (dim >= kParallelThreshold)
    for (std::int64_t i = 0; i < n; ++i) {
        cdouble acc(0.0, 0.0);
        const cdouble* arow = a + i * n;
        for (std::int64_t j = 0; j < n; ++j) acc += arow[j] * x[j];
        y[i] = acc;
    }
}

} // namespace interlab::kernels
