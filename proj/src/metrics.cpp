#include "interlab/metrics.hpp"

#include <cmath>

namespace interlab {

namespace {

int config_parity(const std::vector<int>& config) {
    int parity = 0;
    for (int a : config) parity ^= (a & 1);
    return parity;
}

void require_complete_binary(const ConditionalTable& table) {
    if (table.input_arity != 2)
        throw DomainError("binary interference term on a non-binary table");
    if (!table.complete())
        throw IncompleteTable("conditional table is missing configuration rows");
}

bool is_prime(int d) {
    if (d < 2) return false;
    for (int k = 2; k * k <= d; ++k)
        if (d % k == 0) return false;
    return true;
}

} // namespace

std::map<std::string, double> slit_interference(const ConditionalTable& table) {
    require_complete_binary(table);
    std::map<std::string, double> out;
    for (std::size_t y = 0; y < table.outcome_labels.size(); ++y) {
        double acc = 0.0;
        for (std::size_t k = 0; k < table.rows.size(); ++k) {
            const auto config = config_from_index(k, table.input_count);
            int ones = 0;
            for (int a : config) ones += a;
            acc += ((ones % 2 == 0) ? 1.0 : -1.0) * table.rows[k][y];
        }
        out[table.outcome_labels[y]] = acc;
    }
    return out;
}

InterferenceReport semi_general_interference(const ConditionalTable& table) {
    require_complete_binary(table);
    if (table.outcome_labels.size() < 2)
        throw IncompleteTable("binary outcome column missing");
    double acc = 0.0;
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const auto config = config_from_index(k, table.input_count);
        acc += table.rows[k][static_cast<std::size_t>(config_parity(config))];
    }
    InterferenceReport report;
    report.order = table.input_count;
    report.value = acc / static_cast<double>(table.rows.size()) - 0.5;
    report.maximal = std::abs(report.value - 0.5) <= EPS_EQ;
    return report;
}

PrimeDReport prime_d_interference(const ConditionalTable& table, int d) {
    if (!is_prime(d)) throw DomainError("interference arity must be prime");
    if (table.input_arity != d)
        throw DomainError("table arity does not match requested d");
    if (!table.complete())
        throw IncompleteTable("conditional table is missing configuration rows");
    if (static_cast<int>(table.outcome_labels.size()) < d)
        throw IncompleteTable("d-ary table needs at least d outcome columns");

    double acc = 0.0;
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const auto config = config_from_index(k, table.input_count, d);
        int s = 0;
        for (int a : config) s = (s + a) % d;
        acc += table.rows[k][static_cast<std::size_t>(s)];
    }
    PrimeDReport report;
    report.raw = acc / static_cast<double>(table.rows.size());
    report.centered = report.raw - 0.5;
    return report;
}

std::pair<ComplexOperator, ComplexOperator> split_states(const ExperimentTriple& triple) {
    triple.validate();
    const int m = triple.devices.device_count;
    const IndexSpace space = triple.devices.composite_space();
    ComplexOperator rho0 = ComplexOperator::zero(space);
    ComplexOperator rho1 = ComplexOperator::zero(space);
    const std::size_t config_count = 1ULL << m;
    const double weight = 1.0 / static_cast<double>(config_count / 2);

    for (std::size_t k = 0; k < config_count; ++k) {
        const auto config = config_from_index(k, m);
        ComplexOperator term = ComplexOperator::zero(space);
        for (const auto& [p, psi] : triple.ensemble) {
            const StateVector evolved = apply_global_unitary(triple.devices, config, psi);
            term = term + (cdouble(p * weight, 0.0) *
                           ComplexOperator::outer(evolved, evolved));
        }
        if (config_parity(config) == 0)
            rho0 = rho0 + term;
        else
            rho1 = rho1 + term;
    }
    return {rho0.with_kind(OpKind::psd), rho1.with_kind(OpKind::psd)};
}

HelstromResult helstrom(const ComplexOperator& rho0, const ComplexOperator& rho1) {
    const ComplexOperator delta = (rho1 - rho0).with_kind(OpKind::hermitian);
    const EigenSystem es = hermitian_eigensystem(delta);

    double norm = 0.0;
    for (double v : es.eigenvalues) norm += std::abs(v);

    // Outcome 1 on strictly positive eigenvalues; zero eigenspace to outcome 0.
    const std::size_t d = delta.dim();
    std::vector<cdouble> p1(d * d, cdouble(0.0, 0.0));
    for (std::size_t k = 0; k < d; ++k) {
        if (es.eigenvalues[k] <= EPS_NORM) continue;
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c)
                p1[r * d + c] += es.eigenvectors.at(r, k) *
                                 std::conj(es.eigenvectors.at(c, k));
    }
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = r; c < d; ++c) {
            const cdouble avg = 0.5 * (p1[r * d + c] + std::conj(p1[c * d + r]));
            p1[r * d + c] = avg;
            p1[c * d + r] = std::conj(avg);
        }

    ComplexOperator effect1(delta.space(), std::move(p1), OpKind::psd);
    HelstromResult out;
    out.bound = norm / 4.0;
    out.povm = BinaryPovm(ComplexOperator::identity(delta.space()) - effect1, effect1);
    return out;
}

double discrimination_value(const BinaryPovm& povm, const ComplexOperator& rho0,
                            const ComplexOperator& rho1) {
    const double t0 = (povm.effect0 * rho0).trace().real();
    const double t1 = (povm.effect1 * rho1).trace().real();
    return 0.5 * (t0 + t1) - 0.5;
}

} // namespace interlab
