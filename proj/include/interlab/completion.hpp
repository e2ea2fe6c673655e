#pragma once

#include <optional>
#include <string>
#include <vector>

#include "interlab/experiment.hpp"
#include "interlab/metrics.hpp"
#include "interlab/rng.hpp"
#include "interlab/tensor.hpp"

namespace interlab {

// Split of the device set {0..2n-1} into two size-n halves; zero_half holds
// device 0, which makes the representation canonical.
struct Bipartition {
    std::vector<int> zero_half;  // ascending
    std::vector<int> one_half;   // ascending
};

std::vector<Bipartition> canonical_bipartitions(int n);

// One parity branch of the canonical form. beta0/beta1 are the normalized
// side components (zero_half strings / one_half strings); the branch phase is
// absorbed into them, so the reconstruction of the evolved state reads
//   sum_B (-1)^{sum_{j in B0} a_j} sqrt(q_B/2) (beta0 + (-1)^{sum a} beta1).
struct BranchForm {
    Bipartition parts;
    double weight = 0.0;  // q_B
    StateVector beta0;
    StateVector beta1;
};

struct ComponentForm {
    double weight = 1.0;  // ensemble weight
    std::vector<std::vector<int>> support_strings;
    std::vector<BranchForm> branches;
};

struct CanonicalForm {
    ComplexOperator G;
    std::vector<ComponentForm> components;
};

// G = sum_i |i><i| (x) prod_l U_{i_l}^(0): the configuration-0 frame. Its
// blocks are pure products even on collision strings.
ComplexOperator compute_G(const DeviceFamily& devices);

// Extract the canonical form of a maximal even-order experiment. Throws
// NotMaximal below the I = 1/2 gate, FormViolation naming the failed
// condition otherwise (support on colliding strings, unbalanced weights,
// missing -1 eigenvector, parity reconstruction error).
CanonicalForm canonicalize(const ExperimentTriple& triple);

struct CheckEntry {
    std::string name;
    bool pass = false;
    double residual = 0.0;
    std::string detail;
};

struct Transcript {
    std::vector<CheckEntry> entries;
    bool all_pass() const;
    const CheckEntry* find(const std::string& name) const;
};

// Interferometric readout of one particle: projectors onto
// (|mode_i> +- |mode_j>)/sqrt(2) on that particle's spatial factor.
struct MediatorPair {
    int particle = 0;
    int mode_i = 0;
    int mode_j = 0;
};

// One branch of the mediating pipeline, conditioned on an ensemble component
// (the classical GHJW index): project with E, apply the stage unitaries in
// order, then read the mediators and the parity.
struct SectorPipeline {
    int component = 0;
    std::vector<std::vector<int>> strings;  // spatial strings E projects onto
    double weight = 0.0;                    // P(sector | component), a-independent
    ComplexOperator projector;
    std::vector<ComplexOperator> stages;
    std::vector<MediatorPair> mediators;
};

struct CompletionArtifact {
    ExperimentTriple source;
    int mediator_count = 0;  // n
    bool degenerate = false;  // m = n = 1: the final readout is its own mediator
    ComplexOperator G;
    std::vector<SectorPipeline> sectors;

    // P(B|a): one column per distinct sector string-set, rows over configs.
    ConditionalTable sector_table;
    // P(b_1..b_n | a, B) per distinct string-set, then pooled over B.
    std::vector<ConditionalTable> mediator_tables;
    ConditionalTable pooled_mediator_table;
    ConditionalTable final_table;  // P(b|a) through the pipeline
    Transcript transcript;
};

// Mediating completion of a maximal even-order experiment.
CompletionArtifact build_even_completion(const ExperimentTriple& triple);

// Mediating completion of a maximal odd-order experiment whose components
// sit on exactly two spatial strings (both repetition cases), plus the
// three-support family. Throws UnsupportedSupport for anything else.
CompletionArtifact build_odd_completion(const ExperimentTriple& triple);

// n = 2, m = 3 instance supported on spatial strings (0,0), (1,2), (0,1) with
// the overlaps pinned by p11, p12 and a01; its measurement is the optimal
// discrimination POVM, so simulate gives I_3 = 1/2. Throws
// ConstraintInfeasible when the derived b01 = 2 p12 (1 - a01) - 1 leaves
// [-1, 1].
ExperimentTriple build_three_support_instance(double p11, double p12, double a01);

// Recomputes every table from the stored matrices and checks: mediator
// conditionals are a-independent and parity-deterministic, the chain identity
// P(b|a) = sum_bvec P(b|bvec) P(bvec|a), preservation against the source
// table, sector weights a-independent, first-quantized number preservation,
// and mediator locality (commutation with operators on other particles).
Transcript verify_mediation(const CompletionArtifact& artifact);

// Artifact wrapping a bare triple with no mediating pipeline; verify_mediation
// reports the absence.
CompletionArtifact raw_artifact(const ExperimentTriple& triple);

// Maximal even-order instance sampled directly in canonical form: Haar-dressed
// devices whose folded unitaries have a -1 eigenvector, random branch weights
// over occupied bipartitions, optimal final measurement.
ExperimentTriple random_maximal_even_instance(int n, int d, Rng& rng);

// Two-support odd instances for both repetition cases (n = 2, m = 3), with
// Haar dressing drawn from the generator.
ExperimentTriple odd_case1_instance(Rng& rng);
ExperimentTriple odd_case2_instance(double alpha, Rng& rng);

struct ObstructionWitness {
    double max_outcome_tvd = 0.0;     // intermediate outcome distributions vs a
    double max_poststate_diff = 0.0;  // conditional post-states vs a
    double max_downstream_tvd = 0.0;  // final readout rows vs a
};

// Exhaustive search over per-mode position measurements in the delocalized
// single-particle experiment: every choice erases the configuration
// dependence of everything downstream.
ObstructionWitness example2_obstruction_witness();

} // namespace interlab
