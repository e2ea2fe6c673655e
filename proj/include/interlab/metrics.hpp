#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "interlab/experiment.hpp"
#include "interlab/tensor.hpp"

namespace interlab {

struct InterferenceReport {
    int order = 0;
    double value = 0.0;
    bool maximal = false;  // |value - 1/2| <= EPS_EQ
    std::map<std::string, double> per_y;  // slit tables only
};

// Alternating-sum interference term per screen position:
// I_m(y) = sum_a (-1)^{sum a_i} P(y|a). Requires a complete 2^m table.
std::map<std::string, double> slit_interference(const ConditionalTable& table);

// Parity-correlation interference term:
// I_m = 2^-m sum_a P(parity(a) | a) - 1/2.
InterferenceReport semi_general_interference(const ConditionalTable& table);

struct PrimeDReport {
    double raw = 0.0;       // d^-m sum_a P(s_a | a), s_a = sum a_i mod d
    double centered = 0.0;  // raw - 1/2 (the binary convention)
};

// d-ary interference for prime d; reduces to the binary term at d = 2.
PrimeDReport prime_d_interference(const ConditionalTable& table, int d);

// Parity-split averages rho^(s) = 2^{-(m-1)} sum_{parity(a)=s} U(a) rho U(a)^dag.
std::pair<ComplexOperator, ComplexOperator> split_states(const ExperimentTriple& triple);

struct HelstromResult {
    double bound = 0.0;  // trace_norm(rho1 - rho0) / 4
    BinaryPovm povm;     // eigen-split measurement attaining it
};

// Optimal binary discrimination of two density operators. The positive
// eigenspace of rho1 - rho0 is assigned to outcome 1; the zero eigenspace
// goes to outcome 0.
HelstromResult helstrom(const ComplexOperator& rho0, const ComplexOperator& rho1);

// I_m achieved by a POVM against a split-state pair:
// (tr Pi_0 rho0 + tr Pi_1 rho1)/2 - 1/2.
double discrimination_value(const BinaryPovm& povm, const ComplexOperator& rho0,
                            const ComplexOperator& rho1);

} // namespace interlab
