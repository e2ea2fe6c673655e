#pragma once

#include <cstddef>

#include "interlab/tensor_fwd.hpp"

namespace interlab::kernels {

// Dense kernels behind ComplexOperator. OpenMP-parallel above a size
// threshold; every write goes to a disjoint slot so results are identical for
// any thread count. Serial reference versions live in reference.hpp.

// c = a * b, all dim x dim row-major.
void multiply(cdouble* c, const cdouble* a, const cdouble* b, std::size_t dim);

// c = kron(a, b), a is da x da, b is db x db.
void kron(cdouble* c, const cdouble* a, std::size_t da, const cdouble* b,
          std::size_t db);

// y = a * x.
void matvec(cdouble* y, const cdouble* a, const cdouble* x, std::size_t dim);

} // namespace interlab::kernels
