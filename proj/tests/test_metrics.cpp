#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "interlab/experiment.hpp"
#include "interlab/metrics.hpp"
#include "interlab/rng.hpp"

using namespace interlab;

namespace {

ExperimentTriple random_single_particle_triple(int m, int d, Rng& rng,
                                               bool helstrom_povm = false) {
    ExperimentTriple triple;
    DeviceFamily family;
    family.device_count = m;
    family.particle_count = 1;
    family.internal_dim = d;
    family.spatial_dim = m;
    const IndexSpace internal = IndexSpace::single("int", static_cast<std::size_t>(d));
    for (int j = 0; j < m; ++j) {
        Rng local = rng.child(40 + j);
        family.unitaries.push_back(
            {haar_unitary(internal, local), haar_unitary(internal, local)});
    }
    triple.devices = family;
    Rng state_rng = rng.child(50);
    triple.ensemble = {{1.0, random_state(family.composite_space(), state_rng)}};
    if (helstrom_povm) {
        triple.measurement =
            BinaryPovm::from_effect0(ComplexOperator::identity(family.composite_space()));
        const auto [rho0, rho1] = split_states(triple);
        triple.measurement = helstrom(rho0, rho1).povm;
    } else {
        Rng povm_rng = rng.child(51);
        triple.measurement = BinaryPovm::from_effect0(
            random_effect(family.composite_space(), povm_rng));
    }
    return triple;
}

// Independent oracle: interference terms evaluated by direct loops over the
// raw rows, no shared code with the metrics module.
double oracle_semi_general(const ConditionalTable& table) {
    double acc = 0.0;
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        int parity = 0;
        std::size_t rem = k;
        for (int i = 0; i < table.input_count; ++i) {
            parity ^= static_cast<int>(rem % 2);
            rem /= 2;
        }
        acc += table.rows[k][static_cast<std::size_t>(parity)];
    }
    return acc / static_cast<double>(table.rows.size()) - 0.5;
}

} // namespace

TEST_CASE("slit interference kills affine tables and vanishes at order 3") {
    // P(y|a) affine in the open pattern: I_m = 0 exactly.
    ConditionalTable affine;
    affine.input_count = 3;
    affine.outcome_labels = {"y0"};
    for (std::size_t k = 0; k < 8; ++k) {
        const auto config = config_from_index(k, 3);
        const double p = 0.1 * config[0] + 0.2 * config[1] + 0.05 * config[2];
        affine.rows.push_back({p});
    }
    const auto i3 = slit_interference(affine);
    CHECK(std::abs(i3.at("y0")) < 1e-15);

    // Any single-particle 3-slit quantum scenario: I_3(y) = 0.
    const ConditionalTable table = simulate_slit_table(fourier_slits(3));
    for (const auto& [y, v] : slit_interference(table)) CHECK(std::abs(v) < 1e-9);

    // Balanced double slit: a fringe exists.
    const ConditionalTable dbl = simulate_slit_table(fourier_slits(2));
    bool fringe = false;
    for (const auto& [y, v] : slit_interference(dbl))
        if (std::abs(v) > 0.1) fringe = true;
    CHECK(fringe);

    ConditionalTable missing = affine;
    missing.rows.pop_back();
    CHECK_THROWS_AS(slit_interference(missing), IncompleteTable);
}

TEST_CASE("semi-general interference: constant, example 2, example 3") {
    ConditionalTable constant;
    constant.input_count = 3;
    constant.outcome_labels = {"0", "1"};
    constant.rows.assign(8, {0.3, 0.7});
    CHECK(std::abs(semi_general_interference(constant).value) < 1e-15);

    const ConditionalTable ex2 = simulate(example2_triple());
    const InterferenceReport r2 = semi_general_interference(ex2);
    CHECK(r2.value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r2.maximal);
    CHECK(r2.value == doctest::Approx(oracle_semi_general(ex2)).epsilon(1e-12));

    const ConditionalTable ex3 = simulate(example3_triple(2));
    const InterferenceReport r3 = semi_general_interference(ex3);
    CHECK(r3.order == 4);
    CHECK(r3.value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r3.value == doctest::Approx(oracle_semi_general(ex3)).epsilon(1e-12));
}

TEST_CASE("semi-general interference is bounded and relabeling-invariant") {
    Rng rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        Rng local = rng.child(1, static_cast<std::uint64_t>(trial));
        const ExperimentTriple triple = random_single_particle_triple(3, 2, local);
        const ConditionalTable table = simulate(triple);
        const double value = semi_general_interference(table).value;
        CHECK(std::abs(value) <= 0.5 + EPS_EQ);

        // Permute device order (here: swap devices 0 and 2 along with their
        // unitaries); the parity functional cannot tell.
        ExperimentTriple permuted = triple;
        std::swap(permuted.devices.unitaries[0], permuted.devices.unitaries[2]);
        // Swapping spatial mode labels means permuting the state and POVM
        // accordingly; for a single particle this is a basis permutation.
        const IndexSpace space = triple.devices.composite_space();
        const std::size_t dim = space.total_dim();
        std::vector<cdouble> perm(dim * dim, cdouble(0, 0));
        const int d = triple.devices.internal_dim;
        for (std::size_t mode = 0; mode < 3; ++mode) {
            const std::size_t target = (mode == 0) ? 2 : (mode == 2 ? 0 : 1);
            for (std::size_t q = 0; q < static_cast<std::size_t>(d); ++q)
                perm[(target * d + q) * dim + (mode * d + q)] = cdouble(1, 0);
        }
        const ComplexOperator p(space, std::move(perm), OpKind::unitary);
        permuted.ensemble[0].state = p.apply(triple.ensemble[0].state);
        permuted.measurement = BinaryPovm(
            (p * triple.measurement.effect0 * p.adjoint()).with_kind(OpKind::psd),
            (p * triple.measurement.effect1 * p.adjoint()).with_kind(OpKind::psd));

        const double permuted_value =
            semi_general_interference(simulate(permuted)).value;
        CHECK(permuted_value == doctest::Approx(value).epsilon(1e-9));
    }
}

TEST_CASE("single-particle impossibility: I_3 vanishes, I_2 does not") {
    Rng rng(42);
    double max_i3 = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        Rng local = rng.child(2, static_cast<std::uint64_t>(trial));
        const ExperimentTriple triple = random_single_particle_triple(3, 2, local);
        max_i3 = std::max(max_i3,
                          std::abs(semi_general_interference(simulate(triple)).value));
    }
    CHECK(max_i3 <= 1e-9);

    double best_i2 = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        Rng local = rng.child(3, static_cast<std::uint64_t>(trial));
        const ExperimentTriple triple =
            random_single_particle_triple(2, 2, local, /*helstrom_povm=*/true);
        best_i2 = std::max(best_i2,
                           std::abs(semi_general_interference(simulate(triple)).value));
    }
    CHECK(best_i2 > 0.1);
}

TEST_CASE("prime-d interference: reduction at d = 2, constant tables, qutrit readout") {
    const ConditionalTable ex2 = simulate(example2_triple());
    const PrimeDReport reduction = prime_d_interference(ex2, 2);
    CHECK(reduction.centered ==
          doctest::Approx(semi_general_interference(ex2).value).epsilon(1e-12));

    ConditionalTable constant;
    constant.input_count = 2;
    constant.input_arity = 3;
    constant.outcome_labels = {"0", "1", "2"};
    constant.rows.assign(9, {0.2, 0.5, 0.3});
    CHECK(prime_d_interference(constant, 3).raw == doctest::Approx(1.0 / 3.0));

    CHECK_THROWS_AS(prime_d_interference(constant, 4), DomainError);

    // Qutrit phase-encoding readout: one parked particle, one device applying
    // Z^a to its internal qutrit, Fourier-basis readout. P(a|a) = 1, raw = 1.
    // Built directly from tensor ops as an independent route.
    const IndexSpace qutrit = IndexSpace::single("int", 3);
    const cdouble w = std::polar(1.0, 2.0 * M_PI / 3.0);
    ConditionalTable qutrit_table;
    qutrit_table.input_count = 1;
    qutrit_table.input_arity = 3;
    qutrit_table.outcome_labels = {"0", "1", "2"};
    for (int a = 0; a < 3; ++a) {
        std::vector<cdouble> amps(3);
        for (int q = 0; q < 3; ++q)
            amps[static_cast<std::size_t>(q)] =
                std::pow(w, q * a) / std::sqrt(3.0);  // Z^a on (1,1,1)/sqrt 3
        const StateVector state(qutrit, std::move(amps));
        std::vector<double> row;
        for (int s = 0; s < 3; ++s) {
            std::vector<cdouble> f(3);
            for (int q = 0; q < 3; ++q)
                f[static_cast<std::size_t>(q)] = std::pow(w, q * s) / std::sqrt(3.0);
            const StateVector fourier(qutrit, std::move(f));
            row.push_back(std::norm(inner(fourier, state)));
        }
        qutrit_table.rows.push_back(row);
    }
    const PrimeDReport qutrit_report = prime_d_interference(qutrit_table, 3);
    CHECK(qutrit_report.raw == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("split states: a-independence, example 2 orthogonality, unit traces") {
    DeviceFamily trivial = phase_family(2, 1, 2);
    const IndexSpace internal = IndexSpace::single("int", 1);
    const ComplexOperator one(internal, {cdouble(1, 0)}, OpKind::unitary);
    trivial.unitaries.assign(2, {one, one});
    Rng rng(43);
    const StateVector psi = random_state(trivial.composite_space(), rng);
    const BinaryPovm povm =
        BinaryPovm::from_effect0(random_effect(trivial.composite_space(), rng));
    const auto [same0, same1] = split_states({{{1.0, psi}}, trivial, povm});
    CHECK(max_abs_diff(same0, same1) < 1e-12);

    const auto [rho0, rho1] = split_states(example2_triple());
    CHECK(rho0.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rho1.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    // The split difference has unit eigenvalues and trace norm 2.
    const ComplexOperator diff = (rho1 - rho0).with_kind(OpKind::hermitian);
    CHECK(trace_norm(diff) == doctest::Approx(2.0).epsilon(1e-10));
    const EigenSystem diff_es = hermitian_eigensystem(diff);
    CHECK(diff_es.eigenvalues.front() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(diff_es.eigenvalues.back() == doctest::Approx(-1.0).epsilon(1e-10));
    // Oracle: assemble the four configurations by hand.
    const IndexSpace space = rho0.space();
    StateVector plus(space, {cdouble(M_SQRT1_2, 0), cdouble(M_SQRT1_2, 0)});
    StateVector minus(space, {cdouble(M_SQRT1_2, 0), cdouble(-M_SQRT1_2, 0)});
    CHECK(max_abs_diff(rho0, ComplexOperator::outer(plus, plus)) < 1e-12);
    CHECK(max_abs_diff(rho1, ComplexOperator::outer(minus, minus)) < 1e-12);

    // Reproduces I_m via (tr Pi_0 rho0 + tr Pi_1 rho1)/2 - 1/2.
    const ExperimentTriple ex2 = example2_triple();
    const double via_split = discrimination_value(ex2.measurement, rho0, rho1);
    CHECK(via_split ==
          doctest::Approx(semi_general_interference(simulate(ex2)).value).epsilon(1e-10));
}

TEST_CASE("helstrom bound: trivial cases and attainment against sampling") {
    const IndexSpace space = IndexSpace::single("x", 4);
    Rng rng(44);
    const ComplexOperator rho = random_density(space, rng);
    const HelstromResult equal = helstrom(rho, rho);
    CHECK(equal.bound == doctest::Approx(0.0).epsilon(1e-10));

    // Orthogonal pure states: bound 1/2.
    const StateVector e0 = StateVector::basis(space, 0);
    const StateVector e1 = StateVector::basis(space, 1);
    const HelstromResult ortho = helstrom(
        ComplexOperator::outer(e0, e0).with_kind(OpKind::psd),
        ComplexOperator::outer(e1, e1).with_kind(OpKind::psd));
    CHECK(ortho.bound == doctest::Approx(0.5).epsilon(1e-12));

    for (int trial = 0; trial < 20; ++trial) {
        Rng local = rng.child(4, static_cast<std::uint64_t>(trial));
        const ComplexOperator rho0 = random_density(space, local);
        const ComplexOperator rho1 = random_density(space, local);
        const HelstromResult result = helstrom(rho0, rho1);
        const double attained = discrimination_value(result.povm, rho0, rho1);
        CHECK(attained == doctest::Approx(result.bound).epsilon(1e-8));
        for (int sample = 0; sample < 200; ++sample) {
            const BinaryPovm random_povm =
                BinaryPovm::from_effect0(random_effect(space, local));
            CHECK(discrimination_value(random_povm, rho0, rho1) <=
                  result.bound + 1e-8);
        }
    }
}
