#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "interlab/experiment.hpp"
#include "interlab/tensor.hpp"

namespace interlab {

enum class Statistics { boson, fermion };

// Truncated occupation-number register. The Fock space is the tensor product
// of one (cap+1)-dimensional factor per mode, in register order.
struct ModeRegister {
    std::vector<std::string> modes;
    int max_occupation = 1;  // fermions force 1
    Statistics statistics = Statistics::boson;
    bool charge_superselected = false;

    IndexSpace space() const;
    std::size_t mode_index(const std::string& mode) const;
    void validate() const;
};

struct FockVector {
    ModeRegister reg;
    StateVector state;
};

FockVector vacuum(const ModeRegister& reg);

// Creation operator for one mode: bosonic sqrt(k+1) matrix elements
// (truncated at the cap), fermionic +-1 with the Jordan-Wigner sign string in
// register order. Annihilation is the adjoint.
ComplexOperator creation(const ModeRegister& reg, const std::string& mode);

ComplexOperator total_number_operator(const ModeRegister& reg);
ComplexOperator parity_operator(const ModeRegister& reg);

// Probabilities of the total-occupation sectors.
std::map<int, double> number_distribution(const FockVector& v);

// True iff the effect commutes with the total number operator (charge
// superselection) or with the number parity (uncharged fermions). Registers
// with neither rule accept everything.
bool superselection_check(const ComplexOperator& effect, const ModeRegister& reg);

// Throws SuperselectionViolation if the effect fails superselection_check.
void require_superselection(const ComplexOperator& effect, const ModeRegister& reg);

ModeRegister photon_register();    // 2 bosonic modes, cap 2
ModeRegister electron_register();  // 4 fermionic modes {11,21,12,22}, superselected

struct PhotonMediationResult {
    // outcome_dist[b1][b2] = P(b1 b2 | a1 a2)
    std::array<std::array<double, 2>, 2> outcome_dist{};
    std::array<std::array<FockVector, 2>, 2> post_states;
    std::array<std::array<std::map<int, double>, 2>, 2> post_number_dist;
};

// Interferometric mediation of the delocalized-photon correlation: projective
// measurement on single-mode superpositions of vacuum and one photon. These
// effects superpose number sectors, so a charge-superselected register rejects
// them.
PhotonMediationResult photon_mediation(int a1, int a2,
                                       const ModeRegister& reg = photon_register());

struct ElectronMediationResult {
    std::array<double, 2> stage1_dist{};  // P(sector 1), P(sector 2)
    // stage2_dist[sector][b1][b2] = P(b1 b2 | sector, a1 a2)
    std::array<std::array<std::array<double, 2>, 2>, 2> stage2_dist{};
    // final_dist[b1][b2] = sum_sector P(sector) P(b1 b2 | sector)
    std::array<std::array<double, 2>, 2> final_dist{};
    bool number_check = false;  // every applied effect commutes with N
    // total-number distributions: initial, post-stage-1 per sector,
    // post-stage-2 per (sector, b1, b2)
    std::map<int, double> initial_numbers;
    std::array<std::map<int, double>, 2> stage1_numbers;
    std::array<std::array<std::array<std::map<int, double>, 2>, 2>, 2> stage2_numbers;
};

// Two-electron mediation under charge superselection: a parity-sector
// projection {Pi_1, Pi_2} followed by the sector-conditioned interferometric
// measurement. All effects are number-preserving.
ElectronMediationResult electron_mediation(int a1, int a2,
                                           const ModeRegister& reg = electron_register());

// P(b|a) with b = b1 xor b2, as a two-input conditional table (bridges the
// mediation scenarios into the interference metrics).
ConditionalTable photon_mediation_table();
ConditionalTable electron_mediation_table();

} // namespace interlab
