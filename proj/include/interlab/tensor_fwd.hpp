#pragma once

#include <complex>

namespace interlab {

using cdouble = std::complex<double>;

class IndexSpace;
struct StateVector;
class ComplexOperator;

} // namespace interlab
