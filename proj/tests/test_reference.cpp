#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "interlab/kernels.hpp"
#include "interlab/reference.hpp"
#include "interlab/rng.hpp"
#include "interlab/tensor.hpp"

using namespace interlab;

// The OpenMP kernels against their serial reference twins.

namespace {

std::vector<cdouble> random_matrix(std::size_t dim, Rng& rng) {
    std::vector<cdouble> m(dim * dim);
    for (auto& x : m) x = cdouble(rng.gaussian(), rng.gaussian());
    return m;
}

} // namespace

TEST_CASE("parallel multiply matches serial reference") {
    Rng rng(21);
    for (std::size_t dim : {3UL, 17UL, 64UL, 130UL}) {
        const auto a = random_matrix(dim, rng);
        const auto b = random_matrix(dim, rng);
        std::vector<cdouble> fast(dim * dim), slow(dim * dim);
        kernels::multiply(fast.data(), a.data(), b.data(), dim);
        reference::multiply(slow.data(), a.data(), b.data(), dim);
        double diff = 0.0;
        for (std::size_t i = 0; i < fast.size(); ++i)
            diff = std::max(diff, std::abs(fast[i] - slow[i]));
        CHECK(diff < 1e-11);
    }
}

TEST_CASE("parallel kron matches serial reference") {
    Rng rng(22);
    for (auto [da, db] : {std::pair<std::size_t, std::size_t>{2, 3},
                          {5, 7},
                          {8, 16}}) {
        const auto a = random_matrix(da, rng);
        const auto b = random_matrix(db, rng);
        const std::size_t n = da * db;
        std::vector<cdouble> fast(n * n), slow(n * n);
        kernels::kron(fast.data(), a.data(), da, b.data(), db);
        reference::kron(slow.data(), a.data(), da, b.data(), db);
        for (std::size_t i = 0; i < fast.size(); ++i)
            CHECK(fast[i] == slow[i]);
    }
}

TEST_CASE("parallel matvec matches serial reference") {
    Rng rng(23);
    for (std::size_t dim : {4UL, 63UL, 128UL}) {
        const auto a = random_matrix(dim, rng);
        std::vector<cdouble> x(dim);
        for (auto& v : x) v = cdouble(rng.gaussian(), rng.gaussian());
        std::vector<cdouble> fast(dim), slow(dim);
        kernels::matvec(fast.data(), a.data(), x.data(), dim);
        reference::matvec(slow.data(), a.data(), x.data(), dim);
        for (std::size_t i = 0; i < dim; ++i)
            CHECK(std::abs(fast[i] - slow[i]) < 1e-11);
    }
}

TEST_CASE("strided partial trace matches the spelled-out reference") {
    Rng rng(24);
    const IndexSpace space({{"A", 2}, {"B", 3}, {"C", 2}, {"D", 2}});
    for (int trial = 0; trial < 10; ++trial) {
        Rng local = rng.child(1, static_cast<std::uint64_t>(trial));
        const ComplexOperator rho = random_density(space, local);
        for (const auto& keep : std::vector<std::vector<std::string>>{
                 {"A"}, {"B", "D"}, {"A", "B", "C"}, {"C"}}) {
            const ComplexOperator fast = partial_trace(rho, keep);
            const ComplexOperator slow = reference::partial_trace(rho, keep);
            CHECK(max_abs_diff(fast, slow) < 1e-12);
        }
    }
}
