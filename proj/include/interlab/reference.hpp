#pragma once

#include <cstddef>
#include <vector>

#include "interlab/tensor_fwd.hpp"

namespace interlab::reference {

// Serial reference implementations of the parallel kernels, kept for testing
// and benchmarking. Plain triple loops, no tiling, no pragmas.

void multiply(cdouble* c, const cdouble* a, const cdouble* b, std::size_t dim);
void kron(cdouble* c, const cdouble* a, std::size_t da, const cdouble* b,
          std::size_t db);
void matvec(cdouble* y, const cdouble* a, const cdouble* x, std::size_t dim);

// Serial partial trace over discarded factors, index arithmetic spelled out.
ComplexOperator partial_trace(const ComplexOperator& op,
                              const std::vector<std::string>& keep);

} // namespace interlab::reference
