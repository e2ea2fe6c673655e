#pragma once

#include <map>
#include <string>
#include <vector>

#include "interlab/tensor.hpp"

namespace interlab {

// Configuration strings a = (a_1 ... a_m) are enumerated lexicographically
// with a_1 the most significant digit; tables and reports use that order
// everywhere.
std::vector<int> config_from_index(std::size_t index, int length, int arity = 2);
std::size_t config_to_index(const std::vector<int>& config, int arity = 2);
std::string config_label(const std::vector<int>& config);

// Family of m local devices acting on n particles. Each particle carries a
// spatial factor (dimension spatial_dim, basis state j = "this particle sits
// at device j") and an internal factor (dimension internal_dim). The global
// unitary for a configuration is block-diagonal in the spatial product basis;
// blocks of collision-free spatial strings factor into per-device unitaries.
struct DeviceFamily {
    int device_count = 0;    // m
    int particle_count = 0;  // n
    int internal_dim = 1;    // d
    int spatial_dim = 0;     // per-particle spatial dimension
    int config_arity = 2;

    // unitaries[j][x]: action of device j under configuration x, on one
    // particle's internal factor.
    std::vector<std::vector<ComplexOperator>> unitaries;

    // Optional blocks for spatial strings with repeated entries, keyed by
    // (spatial string, full configuration). set_collision_override expands a
    // sub-configuration over all full configurations that agree on it, which
    // keeps the family local by construction; entries inserted directly may
    // violate locality and are caught by verify_device_locality.
    std::map<std::pair<std::vector<int>, std::vector<int>>, ComplexOperator>
        collision_overrides;

    IndexSpace internal_space_one() const;   // one particle's internal factor
    IndexSpace internal_space_all() const;   // int1 ... intn
    IndexSpace spatial_space_all() const;    // pos1 ... posn
    IndexSpace composite_space() const;      // pos1..posn, int1..intn

    std::size_t spatial_string_count() const;
    std::vector<int> spatial_string(std::size_t index) const;

    void validate() const;
};

// Expand an override for (spatial string, sub-configuration a_i) over all full
// configurations consistent with it.
void set_collision_override(DeviceFamily& family, const std::vector<int>& string,
                            const std::vector<int>& sub_config,
                            const ComplexOperator& block);

// Block of the global unitary at one spatial string.
ComplexOperator device_block(const DeviceFamily& family,
                             const std::vector<int>& string,
                             const std::vector<int>& config);

// Full global unitary for one configuration (Kronecker-assembled, spatial
// factors grouped before internal factors).
ComplexOperator assemble_global_unitary(const DeviceFamily& family,
                                        const std::vector<int>& config);

// Apply the global unitary without materializing it: per-block action on the
// internal components of each spatial string.
StateVector apply_global_unitary(const DeviceFamily& family,
                                 const std::vector<int>& config,
                                 const StateVector& state);

// Assembles blocks under configuration pairs agreeing on each sub-config and
// throws LocalityError if any pair of blocks differs.
void verify_device_locality(const DeviceFamily& family);

struct WeightedState {
    double weight = 1.0;
    StateVector state;
};

struct BinaryPovm {
    ComplexOperator effect0;
    ComplexOperator effect1;

    BinaryPovm() = default;
    // Validates PSD-ness and completeness.
    BinaryPovm(ComplexOperator e0, ComplexOperator e1);
    static BinaryPovm from_effect0(const ComplexOperator& e0);
};

struct ExperimentTriple {
    std::vector<WeightedState> ensemble;  // weights sum to 1
    DeviceFamily devices;
    BinaryPovm measurement;

    void validate() const;
};

struct ConditionalTable {
    int input_count = 0;
    int input_arity = 2;
    std::vector<std::string> outcome_labels;
    // rows[k]: outcome distribution for the k-th configuration (lexicographic).
    std::vector<std::vector<double>> rows;

    std::size_t row_count() const { return rows.size(); }
    const std::vector<double>& row(const std::vector<int>& config) const;
    bool complete() const;
};

// P(b|a) = sum_psi w_psi <psi| U(a)^dag Pi_b U(a) |psi> over all configurations.
ConditionalTable simulate(const ExperimentTriple& triple);

// Single-particle multiple-slit scenario. Closed slits annihilate the
// amplitude on their mode, so rows may be sub-normalized; the deficit is the
// no-detection probability.
struct SlitScenario {
    int slit_count = 0;
    StateVector input_state;          // on C^m
    ComplexOperator propagation;      // unitary slit modes -> screen modes
    std::vector<std::string> screen_positions;
};

std::map<std::string, double> simulate_slits(const SlitScenario& scenario,
                                             const std::vector<int>& config);

// All 2^m configurations of a slit scenario as a (sub-normalized) table with
// one outcome column per screen position.
ConditionalTable simulate_slit_table(const SlitScenario& scenario);

// Built-in families and triples.
DeviceFamily phase_family(int m, int n, int spatial_dim);  // pi-phase devices, d = 1
ExperimentTriple example1_triple();
ExperimentTriple example2_triple();
ExperimentTriple example3_triple(int n);
SlitScenario fourier_slits(int m);

} // namespace interlab
