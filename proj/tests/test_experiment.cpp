#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "interlab/experiment.hpp"
#include "interlab/metrics.hpp"
#include "interlab/rng.hpp"

using namespace interlab;

namespace {

DeviceFamily random_family(int m, int n, int d, Rng& rng) {
    DeviceFamily family;
    family.device_count = m;
    family.particle_count = n;
    family.internal_dim = d;
    family.spatial_dim = m;
    const IndexSpace internal = IndexSpace::single("int", static_cast<std::size_t>(d));
    for (int j = 0; j < m; ++j) {
        Rng local = rng.child(100 + j);
        family.unitaries.push_back(
            {haar_unitary(internal, local), haar_unitary(internal, local)});
    }
    return family;
}

ExperimentTriple random_triple(int m, int n, int d, Rng& rng) {
    ExperimentTriple triple;
    triple.devices = random_family(m, n, d, rng);
    Rng state_rng = rng.child(7);
    triple.ensemble = {{1.0, random_state(triple.devices.composite_space(), state_rng)}};
    Rng povm_rng = rng.child(8);
    triple.measurement = BinaryPovm::from_effect0(
        random_effect(triple.devices.composite_space(), povm_rng));
    return triple;
}

} // namespace

TEST_CASE("identity devices make the global unitary the identity") {
    DeviceFamily family;
    family.device_count = 3;
    family.particle_count = 2;
    family.internal_dim = 2;
    family.spatial_dim = 3;
    const IndexSpace internal = IndexSpace::single("int", 2);
    family.unitaries.assign(3, {ComplexOperator::identity(internal),
                                ComplexOperator::identity(internal)});
    for (std::size_t k = 0; k < 8; ++k) {
        const ComplexOperator u =
            assemble_global_unitary(family, config_from_index(k, 3));
        CHECK(max_abs_diff(u, ComplexOperator::identity(u.space())) < 1e-15);
    }
}

TEST_CASE("example 2 phase family produces diag(-1, 1) at config (1,0)") {
    const DeviceFamily family = phase_family(2, 1, 2);
    const ComplexOperator u = assemble_global_unitary(family, {1, 0});
    CHECK(std::abs(u.at(0, 0) - cdouble(-1, 0)) < 1e-15);
    CHECK(std::abs(u.at(1, 1) - cdouble(1, 0)) < 1e-15);
    CHECK(std::abs(u.at(0, 1)) < 1e-15);
}

TEST_CASE("blocks depend only on the sub-configuration (locality)") {
    Rng rng(31);
    const DeviceFamily family = random_family(4, 2, 2, rng);
    // Configs agreeing on devices (0, 2): blocks of string (0,2) must agree.
    const std::vector<int> string = {0, 2};
    const ComplexOperator block_a = device_block(family, string, {1, 0, 1, 0});
    const ComplexOperator block_b = device_block(family, string, {1, 1, 1, 1});
    CHECK(max_abs_diff(block_a, block_b) < EPS_NORM);

    for (std::size_t k = 0; k < 16; ++k) {
        const ComplexOperator u =
            assemble_global_unitary(family, config_from_index(k, 4));
        CHECK(is_unitary(u, EPS_NORM));
    }
}

TEST_CASE("collision overrides: sub-config expansion is local, raw insertion is not") {
    Rng rng(32);
    DeviceFamily family = random_family(3, 2, 2, rng);
    const IndexSpace pair_internal = family.internal_space_all();
    Rng block_rng = rng.child(9);
    const ComplexOperator block = haar_unitary(pair_internal, block_rng);

    set_collision_override(family, {1, 1}, {0, 0}, block);
    CHECK_NOTHROW(verify_device_locality(family));
    CHECK(max_abs_diff(device_block(family, {1, 1}, {0, 0, 0}), block) == 0.0);
    CHECK(max_abs_diff(device_block(family, {1, 1}, {1, 0, 1}), block) == 0.0);

    // A block that depends on device 0's configuration violates locality.
    const ComplexOperator other = haar_unitary(pair_internal, block_rng);
    family.collision_overrides[{{1, 1}, {0, 1, 0}}] = other;
    family.collision_overrides[{{1, 1}, {1, 1, 0}}] = block;
    CHECK_THROWS_AS(verify_device_locality(family), LocalityError);
}

TEST_CASE("apply_global_unitary agrees with the assembled matrix") {
    Rng rng(33);
    const DeviceFamily family = random_family(3, 2, 2, rng);
    Rng state_rng = rng.child(5);
    const StateVector psi = random_state(family.composite_space(), state_rng);
    for (std::size_t k = 0; k < 8; ++k) {
        const auto config = config_from_index(k, 3);
        const StateVector fast = apply_global_unitary(family, config, psi);
        const StateVector slow = assemble_global_unitary(family, config).apply(psi);
        CHECK((fast - slow).norm() < 1e-12);
    }
}

TEST_CASE("a-independent devices give identical rows") {
    DeviceFamily family;
    family.device_count = 2;
    family.particle_count = 1;
    family.internal_dim = 2;
    family.spatial_dim = 2;
    const IndexSpace internal = IndexSpace::single("int", 2);
    family.unitaries.assign(2, {ComplexOperator::identity(internal),
                                ComplexOperator::identity(internal)});
    Rng rng(34);
    const StateVector psi = random_state(family.composite_space(), rng);
    const BinaryPovm povm =
        BinaryPovm::from_effect0(random_effect(family.composite_space(), rng));
    const ConditionalTable table = simulate({{{1.0, psi}}, family, povm});
    for (std::size_t k = 1; k < table.rows.size(); ++k) {
        CHECK(table.rows[k][0] == doctest::Approx(table.rows[0][0]).epsilon(1e-12));
        CHECK(table.rows[k][1] == doctest::Approx(table.rows[0][1]).epsilon(1e-12));
    }
}

TEST_CASE("example 2: P(b|a) = parity delta") {
    const ConditionalTable table = simulate(example2_triple());
    for (std::size_t k = 0; k < 4; ++k) {
        const auto config = config_from_index(k, 2);
        const int parity = config[0] ^ config[1];
        CHECK(table.rows[k][static_cast<std::size_t>(parity)] ==
              doctest::Approx(1.0).epsilon(1e-12));
        CHECK(table.rows[k][static_cast<std::size_t>(1 - parity)] ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("example 1: two pinned particles signal their parity") {
    const ConditionalTable table = simulate(example1_triple());
    for (std::size_t k = 0; k < 4; ++k) {
        const auto config = config_from_index(k, 2);
        const int parity = config[0] ^ config[1];
        CHECK(table.rows[k][static_cast<std::size_t>(parity)] ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("rows sum to 1 for unitary experiments") {
    Rng rng(35);
    for (int trial = 0; trial < 10; ++trial) {
        Rng local = rng.child(20, static_cast<std::uint64_t>(trial));
        const ConditionalTable table = simulate(random_triple(3, 1, 2, local));
        for (const auto& row : table.rows)
            CHECK(row[0] + row[1] == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("G-folding leaves the conditional table invariant") {
    Rng rng(36);
    for (int trial = 0; trial < 8; ++trial) {
        Rng local = rng.child(21, static_cast<std::uint64_t>(trial));
        // Half the trials use two particles, whose repeated spatial strings
        // exercise the default collision blocks.
        const int n = (trial % 2 == 0) ? 1 : 2;
        ExperimentTriple triple = random_triple(3, n, 2, local);
        const ConditionalTable base = simulate(triple);

        // Fold: device unitaries become U0^dag Ux, the measurement rotates by
        // G = the product-block frame of the config-0 unitaries.
        ExperimentTriple folded = triple;
        for (auto& configs : folded.devices.unitaries) {
            const ComplexOperator u0 = configs[0];
            configs = {(u0.adjoint() * configs[0]).with_kind(OpKind::unitary),
                       (u0.adjoint() * configs[1]).with_kind(OpKind::unitary)};
        }
        const ComplexOperator g =
            assemble_global_unitary(triple.devices, std::vector<int>(3, 0));
        folded.measurement = BinaryPovm(
            (g.adjoint() * triple.measurement.effect0 * g).with_kind(OpKind::psd),
            (g.adjoint() * triple.measurement.effect1 * g).with_kind(OpKind::psd));

        const ConditionalTable after = simulate(folded);
        for (std::size_t k = 0; k < base.rows.size(); ++k) {
            CHECK(after.rows[k][0] == doctest::Approx(base.rows[k][0]).epsilon(1e-9));
            CHECK(after.rows[k][1] == doctest::Approx(base.rows[k][1]).epsilon(1e-9));
        }
    }
}

TEST_CASE("slit scenarios: closed plate, single slit norm, double-slit fringe") {
    const SlitScenario slits = fourier_slits(2);
    const auto closed = simulate_slits(slits, {0, 0});
    for (const auto& [y, p] : closed) CHECK(p == 0.0);

    const auto single = simulate_slits(slits, {1, 0});
    double total = 0.0;
    for (const auto& [y, p] : single) total += p;
    CHECK(total == doctest::Approx(0.5).epsilon(1e-12));

    // Oracle for the double-slit fringe: evaluate the alternating sum
    // P(y|11) - P(y|10) - P(y|01) + P(y|00) by hand on the simulated rows.
    const auto open_both = simulate_slits(slits, {1, 1});
    const auto open_second = simulate_slits(slits, {0, 1});
    bool some_fringe = false;
    for (const auto& [y, p] : open_both) {
        const double i2 = p - single.at(y) - open_second.at(y) + closed.at(y);
        if (std::abs(i2) > 0.1) some_fringe = true;
    }
    CHECK(some_fringe);
}
