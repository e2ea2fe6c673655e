// Compares the OpenMP kernels against the serial reference implementations
// and times the per-configuration simulation loop.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "interlab/experiment.hpp"
#include "interlab/kernels.hpp"
#include "interlab/metrics.hpp"
#include "interlab/reference.hpp"
#include "interlab/rng.hpp"

using namespace interlab;

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <typename F>
double time_ms(int repeats, F&& f) {
    const double start = now_ms();
    for (int i = 0; i < repeats; ++i) f();
    return (now_ms() - start) / repeats;
}

std::vector<cdouble> random_matrix(std::size_t dim, Rng& rng) {
    std::vector<cdouble> m(dim * dim);
    for (auto& x : m) x = cdouble(rng.gaussian(), rng.gaussian());
    return m;
}

void bench_multiply(std::size_t dim, int repeats) {
    Rng rng(100 + dim);
    const auto a = random_matrix(dim, rng);
    const auto b = random_matrix(dim, rng);
    std::vector<cdouble> c(dim * dim);
    const double serial = time_ms(repeats, [&] {
        reference::multiply(c.data(), a.data(), b.data(), dim);
    });
    const double parallel = time_ms(repeats, [&] {
        kernels::multiply(c.data(), a.data(), b.data(), dim);
    });
    std::printf("multiply %4zu x %-4zu  serial %8.2f ms  parallel %8.2f ms  speedup %.2fx\n",
                dim, dim, serial, parallel, serial / parallel);
}

void bench_kron(std::size_t da, std::size_t db, int repeats) {
    Rng rng(200 + da * db);
    const auto a = random_matrix(da, rng);
    const auto b = random_matrix(db, rng);
    std::vector<cdouble> c(da * db * da * db);
    const double serial = time_ms(repeats, [&] {
        reference::kron(c.data(), a.data(), da, b.data(), db);
    });
    const double parallel = time_ms(repeats, [&] {
        kernels::kron(c.data(), a.data(), da, b.data(), db);
    });
    std::printf("kron     %4zu x %-4zu  serial %8.2f ms  parallel %8.2f ms  speedup %.2fx\n",
                da, db, serial, parallel, serial / parallel);
}

void bench_simulate(int n, int repeats) {
    const ExperimentTriple triple = example3_triple(n);
    const int m = triple.devices.device_count;
    // Same block-apply algorithm, plain serial loop over configurations.
    const double serial = time_ms(repeats, [&] {
        std::vector<std::vector<double>> rows;
        for (std::size_t k = 0; k < (1ULL << m); ++k) {
            const auto config = config_from_index(k, m);
            const StateVector evolved =
                apply_global_unitary(triple.devices, config, triple.ensemble[0].state);
            rows.push_back({triple.measurement.effect0.expectation(evolved),
                            triple.measurement.effect1.expectation(evolved)});
        }
    });
    const double parallel = time_ms(repeats, [&] { simulate(triple); });
    std::printf(
        "simulate example3 n=%d  serial %8.2f ms  parallel %8.2f ms  speedup %.2fx\n", n,
        serial, parallel, serial / parallel);

    // The block-apply route against materializing every global unitary.
    const double assembled = time_ms(repeats, [&] {
        for (std::size_t k = 0; k < (1ULL << m); ++k) {
            const auto config = config_from_index(k, m);
            const ComplexOperator u = assemble_global_unitary(triple.devices, config);
            const StateVector evolved = u.apply(triple.ensemble[0].state);
            (void)triple.measurement.effect0.expectation(evolved);
            (void)triple.measurement.effect1.expectation(evolved);
        }
    });
    std::printf(
        "         n=%d routes    block-apply %8.2f ms  assembled matrices %8.2f ms\n", n,
        serial, assembled);
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled (serial build)\n");
#endif
    bench_multiply(128, 10);
    bench_multiply(256, 5);
    bench_multiply(512, 2);
    bench_kron(16, 16, 10);
    bench_kron(32, 32, 3);
    bench_simulate(2, 20);
    bench_simulate(3, 3);
    return 0;
}
