#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "interlab/rng.hpp"
#include "interlab/tensor.hpp"

using namespace interlab;

namespace {

IndexSpace qubit(const std::string& label) { return IndexSpace::single(label, 2); }

ComplexOperator hadamard(const std::string& label) {
    const double h = M_SQRT1_2;
    return ComplexOperator(qubit(label),
                           {cdouble(h, 0), cdouble(h, 0), cdouble(h, 0), cdouble(-h, 0)},
                           OpKind::unitary);
}

ComplexOperator random_hermitian(const IndexSpace& space, Rng& rng) {
    const std::size_t d = space.total_dim();
    std::vector<cdouble> m(d * d);
    for (std::size_t r = 0; r < d; ++r) {
        m[r * d + r] = cdouble(rng.gaussian(), 0.0);
        for (std::size_t c = r + 1; c < d; ++c) {
            const cdouble v(rng.gaussian(), rng.gaussian());
            m[r * d + c] = v;
            m[c * d + r] = std::conj(v);
        }
    }
    return ComplexOperator(space, std::move(m), OpKind::hermitian);
}

} // namespace

TEST_CASE("index space flatten/unflatten round trip, row-major order") {
    IndexSpace space({{"a", 2}, {"b", 3}, {"c", 2}});
    CHECK(space.total_dim() == 12);
    CHECK(space.stride(0) == 6);
    CHECK(space.stride(1) == 2);
    CHECK(space.stride(2) == 1);
    for (std::size_t i = 0; i < 12; ++i)
        CHECK(space.flatten(space.unflatten(i)) == i);
    CHECK_THROWS_AS(IndexSpace({{"x", 2}, {"x", 2}}), LabelError);
    CHECK_THROWS_AS(space.factor_index("nope"), LabelError);
}

TEST_CASE("tensor product identities and sign pattern") {
    const ComplexOperator i2 = ComplexOperator::identity(qubit("a"));
    const ComplexOperator i3 = ComplexOperator::identity(IndexSpace::single("b", 3));
    const ComplexOperator i6 = tensor_product(i2, i3);
    CHECK(max_abs_diff(i6, ComplexOperator::identity(i6.space())) == 0.0);

    const ComplexOperator z1(qubit("a"), {1, 0, 0, -1}, OpKind::unitary);
    const ComplexOperator z2(qubit("b"), {1, 0, 0, -1}, OpKind::unitary);
    const ComplexOperator zz = tensor_product(z1, z2);
    CHECK(zz.at(0, 0) == cdouble(1, 0));
    CHECK(zz.at(1, 1) == cdouble(-1, 0));
    CHECK(zz.at(2, 2) == cdouble(-1, 0));
    CHECK(zz.at(3, 3) == cdouble(1, 0));
}

TEST_CASE("H tensor H on |00> matches brute-force 4x4 multiply") {
    const ComplexOperator hh = tensor_product(hadamard("a"), hadamard("b"));
    const StateVector v00 = StateVector::basis(hh.space(), 0);

    // Oracle: explicit 4x4 matrix-vector multiply, no library paths.
    std::vector<cdouble> expected(4, cdouble(0, 0));
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) expected[r] += hh.at(r, c) * v00.amps[c];

    const StateVector got = hh.apply(v00);
    for (std::size_t r = 0; r < 4; ++r) {
        CHECK(std::abs(got.amps[r] - expected[r]) < 1e-15);
        CHECK(std::abs(got.amps[r] - cdouble(0.5, 0.0)) < 1e-15);
    }
}

TEST_CASE("tensor product dimension cap") {
    const IndexSpace big = IndexSpace::single("big", 70);
    const ComplexOperator a = ComplexOperator::identity(big);
    CHECK_THROWS_AS(tensor_product(a, a), CapacityExceeded);
}

TEST_CASE("partial trace of product and entangled states") {
    Rng rng(11);
    const IndexSpace sa = qubit("A");
    const IndexSpace sb = qubit("B");
    const ComplexOperator rho_a = random_density(sa, rng);
    const ComplexOperator rho_b = random_density(sb, rng);
    const ComplexOperator joint = tensor_product(rho_a, rho_b);

    const ComplexOperator reduced = partial_trace(joint, {"A"});
    CHECK(max_abs_diff(reduced, rho_a) < 1e-12);

    // Maximally entangled pair: marginal is I/2.
    const IndexSpace pair = IndexSpace::concat(sa, sb);
    StateVector phi(pair, {cdouble(M_SQRT1_2, 0), 0, 0, cdouble(M_SQRT1_2, 0)});
    const ComplexOperator bell = ComplexOperator::outer(phi, phi);
    const ComplexOperator half = partial_trace(bell, {"A"});
    CHECK(std::abs(half.at(0, 0) - cdouble(0.5, 0)) < 1e-15);
    CHECK(std::abs(half.at(1, 1) - cdouble(0.5, 0)) < 1e-15);
    CHECK(std::abs(half.at(0, 1)) < 1e-15);

    CHECK_THROWS_AS(partial_trace(joint, {"nope"}), LabelError);
}

TEST_CASE("partial trace preserves trace on random psd inputs") {
    Rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        Rng local = rng.child(1, static_cast<std::uint64_t>(trial));
        const IndexSpace space({{"A", 2}, {"B", 2}, {"C", 3}});
        const ComplexOperator rho = random_density(space, local);
        const ComplexOperator reduced = partial_trace(rho, {"B"});
        CHECK(std::abs(reduced.trace() - rho.trace()) < EPS_EQ);
    }
}

TEST_CASE("hermitian eigensystem basics") {
    const IndexSpace s3 = IndexSpace::single("x", 3);
    const ComplexOperator diag(s3, {3, 0, 0, 0, 1, 0, 0, 0, -2}, OpKind::hermitian);
    const EigenSystem es = hermitian_eigensystem(diag);
    CHECK(es.eigenvalues[0] == doctest::Approx(3.0));
    CHECK(es.eigenvalues[1] == doctest::Approx(1.0));
    CHECK(es.eigenvalues[2] == doctest::Approx(-2.0));

    const ComplexOperator sx(qubit("q"), {0, 1, 1, 0}, OpKind::hermitian);
    const EigenSystem es2 = hermitian_eigensystem(sx);
    CHECK(es2.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(es2.eigenvalues[1] == doctest::Approx(-1.0));

    const ComplexOperator bad(qubit("q"), {0, 1, 0, 0});
    CHECK_THROWS_AS(hermitian_eigensystem(bad), KindError);
}

TEST_CASE("eigensystem reconstruction on 100 random hermitian matrices") {
    Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        Rng local = rng.child(2, static_cast<std::uint64_t>(trial));
        const std::size_t d = 2 + static_cast<std::size_t>(local.next_u64() % 63);
        const IndexSpace space = IndexSpace::single("x", d);
        const ComplexOperator h = random_hermitian(space, local);
        const EigenSystem es = hermitian_eigensystem(h);

        ComplexOperator rebuilt = ComplexOperator::zero(space);
        for (std::size_t k = 0; k < d; ++k) {
            std::vector<cdouble> col(d);
            for (std::size_t r = 0; r < d; ++r) col[r] = es.eigenvectors.at(r, k);
            const StateVector vk(space, std::move(col));
            rebuilt = rebuilt + (cdouble(es.eigenvalues[k], 0.0) *
                                 ComplexOperator::outer(vk, vk));
        }
        CHECK(max_abs_diff(rebuilt, h) <= 1e-8);
        CHECK(is_unitary(es.eigenvectors, 1e-10));
    }
}

TEST_CASE("trace norm values and invariances") {
    const ComplexOperator z(qubit("q"), {1, 0, 0, -1}, OpKind::hermitian);
    CHECK(trace_norm(z) == doctest::Approx(2.0));
    CHECK(trace_norm(ComplexOperator::zero(qubit("q"))) == doctest::Approx(0.0));

    Rng rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        Rng local = rng.child(3, static_cast<std::uint64_t>(trial));
        const IndexSpace space = IndexSpace::single("x", 6);
        const ComplexOperator a = random_hermitian(space, local);
        const double n = trace_norm(a);
        CHECK(trace_norm(cdouble(-1.0, 0.0) * a) == doctest::Approx(n).epsilon(1e-8));
        const ComplexOperator u = haar_unitary(space, local);
        const ComplexOperator rotated =
            (u * a * u.adjoint()).with_kind(OpKind::hermitian);
        CHECK(trace_norm(rotated) == doctest::Approx(n).epsilon(1e-8));
    }
}

TEST_CASE("extend_to_unitary: identity, swap, random orthonormal pair") {
    const IndexSpace s2 = qubit("q");
    const StateVector e0 = StateVector::basis(s2, 0);
    const StateVector e1 = StateVector::basis(s2, 1);

    const ComplexOperator id = extend_to_unitary({{e0, e0}});
    CHECK(max_abs_diff(id, ComplexOperator::identity(s2)) < 1e-10);

    const ComplexOperator swap = extend_to_unitary({{e0, e1}, {e1, e0}});
    CHECK(std::abs(swap.at(1, 0) - cdouble(1, 0)) < 1e-10);
    CHECK(std::abs(swap.at(0, 1) - cdouble(1, 0)) < 1e-10);

    // Random orthonormal pair mapped to a product pair in dim 8.
    Rng rng(15);
    const IndexSpace s8 = IndexSpace::single("x", 8);
    StateVector b0 = random_state(s8, rng);
    StateVector b1 = random_state(s8, rng);
    const cdouble overlap = inner(b0, b1);
    for (std::size_t i = 0; i < 8; ++i) b1.amps[i] -= overlap * b0.amps[i];
    b1 = b1.normalized();
    const ComplexOperator u =
        extend_to_unitary({{b0, StateVector::basis(s8, 0)}, {b1, StateVector::basis(s8, 4)}});
    CHECK(is_unitary(u, 1e-8));
    CHECK((u.apply(b0) - StateVector::basis(s8, 0)).norm() < 1e-8);
    CHECK((u.apply(b1) - StateVector::basis(s8, 4)).norm() < 1e-8);

    CHECK_THROWS_AS(extend_to_unitary({{e0, e0}, {e0, e1}}), GeometryError);
}

TEST_CASE("constructed unitaries stay unitary within 1e-8") {
    Rng rng(16);
    for (int trial = 0; trial < 25; ++trial) {
        Rng local = rng.child(4, static_cast<std::uint64_t>(trial));
        const std::size_t d = 2 + static_cast<std::size_t>(local.next_u64() % 15);
        const ComplexOperator u = haar_unitary(IndexSpace::single("x", d), local);
        CHECK(is_unitary(u, 1e-8));
    }
}

TEST_CASE("operator kind validation") {
    CHECK_THROWS_AS(ComplexOperator(qubit("q"), {1, 1, 0, 1}, OpKind::unitary), KindError);
    CHECK_THROWS_AS(ComplexOperator(qubit("q"), {0, 1, 0, 0}, OpKind::hermitian), KindError);
    CHECK_THROWS_AS(ComplexOperator(qubit("q"), {-1, 0, 0, 1}, OpKind::psd), KindError);
    CHECK_NOTHROW(ComplexOperator(qubit("q"), {1, 0, 0, 0}, OpKind::psd));
}
