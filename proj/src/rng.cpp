#include "interlab/rng.hpp"

#include <cmath>

#include "interlab/tensor.hpp"

namespace interlab {

namespace {

// splitmix64 finalizer, used to mix seeds for hierarchical splitting.
std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), gen_(mix(seed)) {}

Rng Rng::child(std::uint64_t stream, std::uint64_t index) const {
    return Rng(mix(seed_ ^ mix(stream ^ mix(index + 0x51ed2701ULL))));
}

std::uint64_t Rng::next_u64() { return gen_(); }

double Rng::uniform() {
    // 53 random bits -> [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

ComplexOperator haar_unitary(const IndexSpace& space, Rng& rng) {
    const std::size_t d = space.total_dim();
    // Columns of a complex Gaussian matrix, orthonormalized in order. Modified
    // Gram-Schmidt QR with positive diagonal gives Haar measure.
    std::vector<std::vector<cdouble>> cols(d, std::vector<cdouble>(d));
    for (auto& col : cols)
        for (auto& entry : col) entry = cdouble(rng.gaussian(), rng.gaussian());

    for (std::size_t k = 0; k < d; ++k) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < k; ++j) {
                cdouble overlap(0.0, 0.0);
                for (std::size_t i = 0; i < d; ++i)
                    overlap += std::conj(cols[j][i]) * cols[k][i];
                for (std::size_t i = 0; i < d; ++i) cols[k][i] -= overlap * cols[j][i];
            }
        }
        double n = 0.0;
        for (const auto& c : cols[k]) n += std::norm(c);
        n = std::sqrt(n);
        for (auto& c : cols[k]) c /= n;
    }

    std::vector<cdouble> m(d * d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) m[r * d + c] = cols[c][r];
    return ComplexOperator(space, std::move(m), OpKind::unitary);
}

StateVector random_state(const IndexSpace& space, Rng& rng) {
    std::vector<cdouble> amps(space.total_dim());
    for (auto& a : amps) a = cdouble(rng.gaussian(), rng.gaussian());
    return StateVector(space, std::move(amps)).normalized();
}

ComplexOperator random_density(const IndexSpace& space, Rng& rng) {
    const std::size_t d = space.total_dim();
    std::vector<cdouble> g(d * d);
    for (auto& x : g) x = cdouble(rng.gaussian(), rng.gaussian());
    // G G^dag, normalized to unit trace.
    std::vector<cdouble> m(d * d, cdouble(0.0, 0.0));
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            cdouble acc(0.0, 0.0);
            for (std::size_t k = 0; k < d; ++k)
                acc += g[r * d + k] * std::conj(g[c * d + k]);
            m[r * d + c] = acc;
        }
    cdouble tr(0.0, 0.0);
    for (std::size_t i = 0; i < d; ++i) tr += m[i * d + i];
    for (auto& x : m) x /= tr.real();
    // Symmetrize away rounding noise before tagging psd.
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = r; c < d; ++c) {
            const cdouble avg = 0.5 * (m[r * d + c] + std::conj(m[c * d + r]));
            m[r * d + c] = avg;
            m[c * d + r] = std::conj(avg);
        }
    return ComplexOperator(space, std::move(m), OpKind::psd);
}

ComplexOperator random_effect(const IndexSpace& space, Rng& rng) {
    const std::size_t d = space.total_dim();
    ComplexOperator v = haar_unitary(space, rng);
    std::vector<double> evs(d);
    for (auto& e : evs) e = rng.uniform();
    // V diag(u) V^dag with u in [0,1]
    std::vector<cdouble> m(d * d, cdouble(0.0, 0.0));
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            cdouble acc(0.0, 0.0);
            for (std::size_t k = 0; k < d; ++k)
                acc += v.at(r, k) * evs[k] * std::conj(v.at(c, k));
            m[r * d + c] = acc;
        }
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = r; c < d; ++c) {
            const cdouble avg = 0.5 * (m[r * d + c] + std::conj(m[c * d + r]));
            m[r * d + c] = avg;
            m[c * d + r] = std::conj(avg);
        }
    return ComplexOperator(space, std::move(m), OpKind::psd);
}

} // namespace interlab
