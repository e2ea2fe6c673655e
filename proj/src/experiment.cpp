#include "interlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace interlab {

std::vector<int> config_from_index(std::size_t index, int length, int arity) {
    std::vector<int> config(length, 0);
    for (int i = length; i-- > 0;) {
        config[i] = static_cast<int>(index % arity);
        index /= arity;
    }
    return config;
}

std::size_t config_to_index(const std::vector<int>& config, int arity) {
    std::size_t index = 0;
    for (int digit : config) index = index * arity + static_cast<std::size_t>(digit);
    return index;
}

std::string config_label(const std::vector<int>& config) {
    std::string out;
    out.reserve(config.size());
    for (int digit : config) out += static_cast<char>('0' + digit);
    return out;
}

// ---------------------------------------------------------------------------
// DeviceFamily

IndexSpace DeviceFamily::internal_space_one() const {
    return IndexSpace::single("int", static_cast<std::size_t>(internal_dim));
}

IndexSpace DeviceFamily::internal_space_all() const {
    std::vector<Factor> factors;
    for (int k = 0; k < particle_count; ++k)
        factors.push_back({"int" + std::to_string(k + 1),
                           static_cast<std::size_t>(internal_dim)});
    return IndexSpace(std::move(factors));
}

IndexSpace DeviceFamily::spatial_space_all() const {
    std::vector<Factor> factors;
    for (int k = 0; k < particle_count; ++k)
        factors.push_back({"pos" + std::to_string(k + 1),
                           static_cast<std::size_t>(spatial_dim)});
    return IndexSpace(std::move(factors));
}

IndexSpace DeviceFamily::composite_space() const {
    return IndexSpace::concat(spatial_space_all(), internal_space_all());
}

std::size_t DeviceFamily::spatial_string_count() const {
    std::size_t count = 1;
    for (int k = 0; k < particle_count; ++k) count *= static_cast<std::size_t>(spatial_dim);
    return count;
}

std::vector<int> DeviceFamily::spatial_string(std::size_t index) const {
    return config_from_index(index, particle_count, spatial_dim);
}

void DeviceFamily::validate() const {
    if (device_count < 1 || particle_count < 1 || spatial_dim < 1 || internal_dim < 1)
        throw DomainError("device family with empty dimensions");
    if (spatial_dim > device_count)
        throw DomainError("spatial modes without an attached device");
    if (static_cast<int>(unitaries.size()) != device_count)
        throw DomainError("per-device unitary list does not match device count");
    for (const auto& configs : unitaries) {
        if (static_cast<int>(configs.size()) != config_arity)
            throw DomainError("device is missing configuration unitaries");
        for (const auto& u : configs) {
            if (u.dim() != static_cast<std::size_t>(internal_dim))
                throw SpaceError("device unitary on the wrong internal dimension");
            if (!is_unitary(u)) throw KindError("device operator is not unitary");
        }
    }
}

void set_collision_override(DeviceFamily& family, const std::vector<int>& string,
                            const std::vector<int>& sub_config,
                            const ComplexOperator& block) {
    if (sub_config.size() != string.size())
        throw DomainError("sub-configuration length must match the spatial string");
    std::size_t total = 1;
    for (int i = 0; i < family.device_count; ++i)
        total *= static_cast<std::size_t>(family.config_arity);
    for (std::size_t k = 0; k < total; ++k) {
        auto config = config_from_index(k, family.device_count, family.config_arity);
        bool agrees = true;
        for (std::size_t l = 0; l < string.size(); ++l)
            if (config[static_cast<std::size_t>(string[l])] != sub_config[l]) {
                agrees = false;
                break;
            }
        if (agrees) family.collision_overrides[{string, config}] = block;
    }
}

ComplexOperator device_block(const DeviceFamily& family,
                             const std::vector<int>& string,
                             const std::vector<int>& config) {
    const auto override_it = family.collision_overrides.find({string, config});
    if (override_it != family.collision_overrides.end()) return override_it->second;
    // Default: product of single-device unitaries. Exact for collision-free
    // strings, and a valid locality-respecting choice otherwise.
    ComplexOperator block = family.unitaries[static_cast<std::size_t>(string[0])]
                                            [static_cast<std::size_t>(
                                                config[static_cast<std::size_t>(string[0])])];
    std::vector<Factor> factors{{"int1", static_cast<std::size_t>(family.internal_dim)}};
    block = ComplexOperator(IndexSpace(factors), block.data(), OpKind::unitary);
    for (int l = 1; l < family.particle_count; ++l) {
        const int device = string[static_cast<std::size_t>(l)];
        const ComplexOperator& u =
            family.unitaries[static_cast<std::size_t>(device)]
                            [static_cast<std::size_t>(config[static_cast<std::size_t>(device)])];
        ComplexOperator relabeled(
            IndexSpace::single("int" + std::to_string(l + 1),
                               static_cast<std::size_t>(family.internal_dim)),
            u.data(), OpKind::unitary);
        block = tensor_product(block, relabeled);
    }
    return block;
}

ComplexOperator assemble_global_unitary(const DeviceFamily& family,
                                        const std::vector<int>& config) {
    if (static_cast<int>(config.size()) != family.device_count)
        throw DomainError("configuration length does not match device count");
    const IndexSpace space = family.composite_space();
    const std::size_t spatial = family.spatial_string_count();
    const std::size_t block_dim = family.internal_space_all().total_dim();
    const std::size_t dim = space.total_dim();

    std::vector<cdouble> m(dim * dim, cdouble(0.0, 0.0));
    for (std::size_t s = 0; s < spatial; ++s) {
        const ComplexOperator block = device_block(family, family.spatial_string(s), config);
        const std::size_t base = s * block_dim;
        for (std::size_t r = 0; r < block_dim; ++r)
            for (std::size_t c = 0; c < block_dim; ++c)
                m[(base + r) * dim + base + c] = block.at(r, c);
    }
    return ComplexOperator(space, std::move(m), OpKind::unitary);
}

StateVector apply_global_unitary(const DeviceFamily& family,
                                 const std::vector<int>& config,
                                 const StateVector& state) {
    const std::size_t spatial = family.spatial_string_count();
    const std::size_t block_dim = family.internal_space_all().total_dim();
    if (state.dim() != spatial * block_dim)
        throw SpaceError("state does not live on the family's composite space");

    std::vector<cdouble> out(state.dim(), cdouble(0.0, 0.0));
    for (std::size_t s = 0; s < spatial; ++s) {
        const std::size_t base = s * block_dim;
        bool occupied = false;
        for (std::size_t i = 0; i < block_dim; ++i)
            if (state.amps[base + i] != cdouble(0.0, 0.0)) {
                occupied = true;
                break;
            }
        if (!occupied) continue;
        const ComplexOperator block = device_block(family, family.spatial_string(s), config);
        for (std::size_t r = 0; r < block_dim; ++r) {
            cdouble acc(0.0, 0.0);
            for (std::size_t c = 0; c < block_dim; ++c)
                acc += block.at(r, c) * state.amps[base + c];
            out[base + r] = acc;
        }
    }
    return StateVector(state.space, std::move(out), state.lossy);
}

void verify_device_locality(const DeviceFamily& family) {
    family.validate();
    // Group full configurations by their restriction to each overridden
    // string; blocks within a group must agree.
    std::map<std::pair<std::vector<int>, std::vector<int>>, const ComplexOperator*> rep;
    for (const auto& [key, block] : family.collision_overrides) {
        const auto& [string, config] = key;
        std::vector<int> restriction;
        restriction.reserve(string.size());
        for (int device : string) restriction.push_back(config[static_cast<std::size_t>(device)]);
        const auto group = std::make_pair(string, restriction);
        const auto it = rep.find(group);
        if (it == rep.end()) {
            rep[group] = &block;
        } else if (max_abs_diff(*it->second, block) > EPS_NORM) {
            throw LocalityError("collision block at string " + config_label(string) +
                                " depends on configurations outside its sub-config");
        }
    }
}

// ---------------------------------------------------------------------------
// Triple and simulation

BinaryPovm::BinaryPovm(ComplexOperator e0, ComplexOperator e1)
    : effect0(std::move(e0)), effect1(std::move(e1)) {
    effect0 = effect0.with_kind(OpKind::psd);
    effect1 = effect1.with_kind(OpKind::psd);
    const ComplexOperator sum = effect0 + effect1;
    if (max_abs_diff(sum, ComplexOperator::identity(effect0.space())) > EPS_NORM)
        throw KindError("binary POVM does not sum to the identity");
}

BinaryPovm BinaryPovm::from_effect0(const ComplexOperator& e0) {
    return BinaryPovm(e0, ComplexOperator::identity(e0.space()) - e0);
}

void ExperimentTriple::validate() const {
    devices.validate();
    if (ensemble.empty()) throw DomainError("empty ensemble");
    double total = 0.0;
    const std::size_t dim = devices.composite_space().total_dim();
    for (const auto& [weight, state] : ensemble) {
        if (weight < -EPS_EQ) throw DomainError("negative ensemble weight");
        if (state.dim() != dim)
            throw SpaceError("ensemble member off the composite space");
        total += weight;
    }
    if (std::abs(total - 1.0) > EPS_EQ)
        throw DomainError("ensemble weights do not sum to 1");
    if (measurement.effect0.dim() != dim)
        throw SpaceError("measurement off the composite space");
}

const std::vector<double>& ConditionalTable::row(const std::vector<int>& config) const {
    return rows.at(config_to_index(config, input_arity));
}

bool ConditionalTable::complete() const {
    std::size_t expected = 1;
    for (int i = 0; i < input_count; ++i) expected *= static_cast<std::size_t>(input_arity);
    return rows.size() == expected;
}

ConditionalTable simulate(const ExperimentTriple& triple) {
    triple.validate();
    const int m = triple.devices.device_count;
    const int arity = triple.devices.config_arity;
    std::size_t config_count = 1;
    for (int i = 0; i < m; ++i) config_count *= static_cast<std::size_t>(arity);

    ConditionalTable table;
    table.input_count = m;
    table.input_arity = arity;
    table.outcome_labels = {"0", "1"};
    table.rows.assign(config_count, std::vector<double>(2, 0.0));

    const std::int64_t total = static_cast<std::int64_t>(config_count);
#pragma omp parallel for schedule(static) if (total >= 8)
    for (std::int64_t k = 0; k < total; ++k) {
        const auto config = config_from_index(static_cast<std::size_t>(k), m, arity);
        double p0 = 0.0;
        double p1 = 0.0;
        for (const auto& [weight, state] : triple.ensemble) {
            const StateVector evolved = apply_global_unitary(triple.devices, config, state);
            p0 += weight * triple.measurement.effect0.expectation(evolved);
            p1 += weight * triple.measurement.effect1.expectation(evolved);
        }
        table.rows[static_cast<std::size_t>(k)] = {p0, p1};
    }
    return table;
}

// ---------------------------------------------------------------------------
// Slits

std::map<std::string, double> simulate_slits(const SlitScenario& scenario,
                                             const std::vector<int>& config) {
    if (static_cast<int>(config.size()) != scenario.slit_count)
        throw DomainError("slit configuration length mismatch");
    StateVector masked = scenario.input_state;
    for (std::size_t j = 0; j < masked.amps.size(); ++j)
        if (config[j] == 0) masked.amps[j] = cdouble(0.0, 0.0);
    masked.lossy = true;
    const StateVector at_screen = scenario.propagation.apply(masked);

    std::map<std::string, double> out;
    for (std::size_t y = 0; y < scenario.screen_positions.size(); ++y)
        out[scenario.screen_positions[y]] = std::norm(at_screen.amps[y]);
    return out;
}

ConditionalTable simulate_slit_table(const SlitScenario& scenario) {
    const int m = scenario.slit_count;
    const std::size_t config_count = 1ULL << m;

    ConditionalTable table;
    table.input_count = m;
    table.input_arity = 2;
    table.outcome_labels = scenario.screen_positions;
    table.rows.assign(config_count,
                      std::vector<double>(scenario.screen_positions.size(), 0.0));
    for (std::size_t k = 0; k < config_count; ++k) {
        const auto row = simulate_slits(scenario, config_from_index(k, m));
        for (std::size_t y = 0; y < scenario.screen_positions.size(); ++y)
            table.rows[k][y] = row.at(scenario.screen_positions[y]);
    }
    return table;
}

// ---------------------------------------------------------------------------
// Built-in families

DeviceFamily phase_family(int m, int n, int spatial_dim) {
    DeviceFamily family;
    family.device_count = m;
    family.particle_count = n;
    family.internal_dim = 1;
    family.spatial_dim = spatial_dim;
    const IndexSpace internal = IndexSpace::single("int", 1);
    const ComplexOperator plus(internal, {cdouble(1.0, 0.0)}, OpKind::unitary);
    const ComplexOperator minus(internal, {cdouble(-1.0, 0.0)}, OpKind::unitary);
    family.unitaries.assign(static_cast<std::size_t>(m), {plus, minus});
    return family;
}

ExperimentTriple example2_triple() {
    // One particle shared between two parties; each either leaves it intact or
    // applies a pi phase; readout in the |+>/|-> basis.
    DeviceFamily family = phase_family(2, 1, 2);
    const IndexSpace space = family.composite_space();

    StateVector psi(space, {cdouble(M_SQRT1_2, 0.0), cdouble(M_SQRT1_2, 0.0)});
    StateVector plus = psi;
    StateVector minus(space, {cdouble(M_SQRT1_2, 0.0), cdouble(-M_SQRT1_2, 0.0)});

    BinaryPovm povm(ComplexOperator::outer(plus, plus),
                    ComplexOperator::outer(minus, minus));
    return ExperimentTriple{{{1.0, psi}}, family, povm};
}

ExperimentTriple example3_triple(int n) {
    // n particles, 2n phase devices; particle k is delocalized over devices
    // (2k-1, 2k) and read out in the corresponding |+>/|-> basis. The final
    // bit is the parity of the n readouts.
    const int m = 2 * n;
    DeviceFamily family = phase_family(m, n, m);
    const IndexSpace space = family.composite_space();
    const std::size_t dim = space.total_dim();

    std::vector<cdouble> amps(dim, cdouble(0.0, 0.0));
    // Product of (|2k-1> + |2k>)/sqrt(2) over particles (0-based modes).
    const std::size_t spatial_count = family.spatial_string_count();
    const double weight = std::pow(0.5, 0.5 * n);
    for (std::size_t s = 0; s < spatial_count; ++s) {
        const auto string = family.spatial_string(s);
        bool in_support = true;
        for (int k = 0; k < n; ++k)
            if (string[static_cast<std::size_t>(k)] != 2 * k &&
                string[static_cast<std::size_t>(k)] != 2 * k + 1) {
                in_support = false;
                break;
            }
        if (in_support) amps[s] = cdouble(weight, 0.0);
    }
    StateVector psi(space, std::move(amps));

    // Pi_b = sum over parity-b sign patterns of the product |s_1..s_n><...|
    // where |s_k> = (|2k-1> + (-1)^{s_k} |2k>)/sqrt(2); the orthogonal
    // complement of the supported subspace is assigned to outcome 0.
    ComplexOperator pi0 = ComplexOperator::zero(space);
    ComplexOperator pi1 = ComplexOperator::zero(space);
    for (std::size_t pattern = 0; pattern < (1ULL << n); ++pattern) {
        std::vector<cdouble> v(dim, cdouble(0.0, 0.0));
        int parity = 0;
        for (std::size_t s = 0; s < spatial_count; ++s) {
            const auto string = family.spatial_string(s);
            double sign = 1.0;
            bool in_support = true;
            for (int k = 0; k < n; ++k) {
                const int mode = string[static_cast<std::size_t>(k)];
                if (mode == 2 * k) continue;
                if (mode == 2 * k + 1) {
                    if ((pattern >> k) & 1ULL) sign = -sign;
                    continue;
                }
                in_support = false;
                break;
            }
            if (in_support) v[s] = cdouble(sign * weight, 0.0);
        }
        for (int k = 0; k < n; ++k)
            if ((pattern >> k) & 1ULL) parity ^= 1;
        const StateVector vec(space, std::move(v));
        const ComplexOperator proj = ComplexOperator::outer(vec, vec);
        if (parity == 0)
            pi0 = pi0 + proj;
        else
            pi1 = pi1 + proj;
    }
    // Complement to outcome 0.
    pi0 = pi0 + (ComplexOperator::identity(space) - pi0 - pi1);
    return ExperimentTriple{{{1.0, psi}}, family, BinaryPovm(pi0, pi1)};
}

ExperimentTriple example1_triple() {
    // Two spatially pinned particles with one internal qubit each; device j
    // flips particle j's qubit when configured to 1. The readout is the
    // z-basis parity of the two qubits.
    DeviceFamily family;
    family.device_count = 2;
    family.particle_count = 2;
    family.internal_dim = 2;
    family.spatial_dim = 2;
    const IndexSpace internal = IndexSpace::single("int", 2);
    const ComplexOperator id = ComplexOperator::identity(internal);
    const ComplexOperator flip(internal,
                               {cdouble(0.0, 0.0), cdouble(1.0, 0.0),
                                cdouble(1.0, 0.0), cdouble(0.0, 0.0)},
                               OpKind::unitary);
    family.unitaries = {{id, flip}, {id, flip}};

    const IndexSpace space = family.composite_space();
    // Particle 1 at device 1, particle 2 at device 2, both qubits |0>.
    std::vector<std::size_t> digits = {0, 1, 0, 0};
    StateVector psi = StateVector::basis(space, space.flatten(digits));

    ComplexOperator pi0 = ComplexOperator::zero(space);
    ComplexOperator pi1 = ComplexOperator::zero(space);
    const std::size_t dim = space.total_dim();
    for (std::size_t i = 0; i < dim; ++i) {
        const auto d = space.unflatten(i);
        const int parity = static_cast<int>((d[2] + d[3]) % 2);
        std::vector<cdouble> v(dim, cdouble(0.0, 0.0));
        v[i] = cdouble(1.0, 0.0);
        const StateVector vec(space, std::move(v));
        const ComplexOperator proj = ComplexOperator::outer(vec, vec);
        if (parity == 0)
            pi0 = pi0 + proj;
        else
            pi1 = pi1 + proj;
    }
    return ExperimentTriple{{{1.0, psi}}, family, BinaryPovm(pi0, pi1)};
}

SlitScenario fourier_slits(int m) {
    SlitScenario scenario;
    scenario.slit_count = m;
    const IndexSpace space = IndexSpace::single("mode", static_cast<std::size_t>(m));
    std::vector<cdouble> amps(static_cast<std::size_t>(m),
                              cdouble(1.0 / std::sqrt(static_cast<double>(m)), 0.0));
    scenario.input_state = StateVector(space, std::move(amps));

    std::vector<cdouble> f(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
    const double norm = 1.0 / std::sqrt(static_cast<double>(m));
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) {
            const double phase = 2.0 * M_PI * r * c / m;
            f[static_cast<std::size_t>(r) * m + c] =
                norm * cdouble(std::cos(phase), std::sin(phase));
        }
    scenario.propagation = ComplexOperator(space, std::move(f), OpKind::unitary);
    for (int y = 0; y < m; ++y) scenario.screen_positions.push_back("y" + std::to_string(y));
    return scenario;
}

} // namespace interlab
