#include "interlab/completion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace interlab {

namespace {

// Canonical-form checks run at this tolerance; the I = 1/2 gate uses
// MAXIMALITY_TOL.
constexpr double FORM_TOL = 1e-7;

int config_parity(const std::vector<int>& config) {
    int parity = 0;
    for (int a : config) parity ^= (a & 1);
    return parity;
}

int parity_on(const std::vector<int>& config, const std::vector<int>& devices) {
    int parity = 0;
    for (int j : devices) parity ^= (config[static_cast<std::size_t>(j)] & 1);
    return parity;
}

std::vector<int> value_set(const std::vector<int>& string) {
    std::vector<int> out = string;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string strings_label(const std::vector<std::vector<int>>& strings) {
    std::ostringstream out;
    for (std::size_t s = 0; s < strings.size(); ++s) {
        if (s) out << "|";
        for (std::size_t l = 0; l < strings[s].size(); ++l) {
            if (l) out << ",";
            out << strings[s][l];
        }
    }
    return out.str();
}

// Mediator outcome label "b1 b2 ... bn": character i is mediator i's bit.
std::string bits_label(std::size_t value, int length) {
    std::string out(static_cast<std::size_t>(length), '0');
    for (int i = 0; i < length; ++i)
        out[static_cast<std::size_t>(i)] = ((value >> i) & 1ULL) ? '1' : '0';
    return out;
}

// Internal component of a state at one spatial string (not normalized).
std::vector<cdouble> internal_block(const DeviceFamily& dev, const StateVector& psi,
                                    std::size_t string_index) {
    const std::size_t block = dev.internal_space_all().total_dim();
    std::vector<cdouble> out(block);
    for (std::size_t i = 0; i < block; ++i)
        out[i] = psi.amps[string_index * block + i];
    return out;
}

double block_weight(const std::vector<cdouble>& block) {
    double acc = 0.0;
    for (const auto& c : block) acc += std::norm(c);
    return acc;
}

// Product block of the single-device config-0/1 unitaries, ignoring overrides.
ComplexOperator product_block(const DeviceFamily& dev, const std::vector<int>& string,
                              const std::vector<int>& config) {
    ComplexOperator block(
        IndexSpace::single("int1", static_cast<std::size_t>(dev.internal_dim)),
        dev.unitaries[static_cast<std::size_t>(string[0])]
                     [static_cast<std::size_t>(config[static_cast<std::size_t>(string[0])])]
            .data(),
        OpKind::unitary);
    for (int l = 1; l < dev.particle_count; ++l) {
        const int device = string[static_cast<std::size_t>(l)];
        ComplexOperator u(
            IndexSpace::single("int" + std::to_string(l + 1),
                               static_cast<std::size_t>(dev.internal_dim)),
            dev.unitaries[static_cast<std::size_t>(device)]
                         [static_cast<std::size_t>(config[static_cast<std::size_t>(device)])]
                .data(),
            OpKind::unitary);
        block = tensor_product(block, u);
    }
    return block;
}

// Folded single-device unitary U0^dag U1, applied to one particle's internal
// factor inside an internal-block vector.
std::vector<cdouble> apply_folded_device(const DeviceFamily& dev, int device,
                                         int particle,
                                         const std::vector<cdouble>& block) {
    const std::size_t d = static_cast<std::size_t>(dev.internal_dim);
    const ComplexOperator folded =
        (dev.unitaries[static_cast<std::size_t>(device)][0].adjoint() *
         dev.unitaries[static_cast<std::size_t>(device)][1]);
    const std::size_t n = static_cast<std::size_t>(dev.particle_count);
    // Stride of the particle's internal digit inside the block index.
    std::size_t stride = 1;
    for (std::size_t p = n; p-- > static_cast<std::size_t>(particle) + 1;) stride *= d;

    std::vector<cdouble> out(block.size(), cdouble(0.0, 0.0));
    for (std::size_t idx = 0; idx < block.size(); ++idx) {
        const std::size_t digit = (idx / stride) % d;
        const std::size_t base = idx - digit * stride;
        cdouble acc(0.0, 0.0);
        for (std::size_t q = 0; q < d; ++q)
            acc += folded.at(digit, q) * block[base + q * stride];
        out[idx] = acc;
    }
    return out;
}

StateVector folded_evolution(const DeviceFamily& dev, const ComplexOperator& g_dag,
                             const std::vector<int>& config, const StateVector& psi) {
    return g_dag.apply(apply_global_unitary(dev, config, psi));
}

// Projector onto a list of spatial strings (identity on internal factors).
ComplexOperator string_projector(const DeviceFamily& dev,
                                 const std::vector<std::vector<int>>& strings) {
    const IndexSpace space = dev.composite_space();
    const std::size_t dim = space.total_dim();
    const std::size_t block = dev.internal_space_all().total_dim();
    std::vector<cdouble> m(dim * dim, cdouble(0.0, 0.0));
    for (const auto& string : strings) {
        const std::size_t s = config_to_index(string, dev.spatial_dim);
        for (std::size_t i = 0; i < block; ++i)
            m[(s * block + i) * dim + s * block + i] = cdouble(1.0, 0.0);
    }
    return ComplexOperator(space, std::move(m), OpKind::psd);
}

// Projector onto (|mode_i> + (-1)^bit |mode_j>)/sqrt 2 on one particle's
// spatial factor, identity elsewhere.
ComplexOperator mediator_effect(const DeviceFamily& dev, const MediatorPair& pair,
                                int bit) {
    const std::size_t sd = static_cast<std::size_t>(dev.spatial_dim);
    std::vector<cdouble> local(sd * sd, cdouble(0.0, 0.0));
    const double sgn = bit ? -1.0 : 1.0;
    const std::size_t mi = static_cast<std::size_t>(pair.mode_i);
    const std::size_t mj = static_cast<std::size_t>(pair.mode_j);
    local[mi * sd + mi] = cdouble(0.5, 0.0);
    local[mj * sd + mj] = cdouble(0.5, 0.0);
    local[mi * sd + mj] = cdouble(0.5 * sgn, 0.0);
    local[mj * sd + mi] = cdouble(0.5 * sgn, 0.0);

    ComplexOperator out;
    for (int p = 0; p < dev.particle_count; ++p) {
        const IndexSpace factor =
            IndexSpace::single("pos" + std::to_string(p + 1), sd);
        ComplexOperator op = (p == pair.particle)
                                 ? ComplexOperator(factor, local)
                                 : ComplexOperator::identity(factor);
        out = (p == 0) ? op : tensor_product(out, op);
    }
    return tensor_product(out, ComplexOperator::identity(dev.internal_space_all()));
}

ComplexOperator joint_mediator_effect(const DeviceFamily& dev,
                                      const std::vector<MediatorPair>& mediators,
                                      std::size_t bits) {
    ComplexOperator out = mediator_effect(dev, mediators[0],
                                          static_cast<int>(bits & 1ULL));
    for (std::size_t l = 1; l < mediators.size(); ++l)
        out = out * mediator_effect(dev, mediators[l],
                                    static_cast<int>((bits >> l) & 1ULL));
    return out;
}

StateVector make_state(const IndexSpace& space, std::vector<cdouble> amps) {
    return StateVector(space, std::move(amps));
}

} // namespace

// ---------------------------------------------------------------------------
// Bipartitions and canonical form

std::vector<Bipartition> canonical_bipartitions(int n) {
    const int m = 2 * n;
    std::vector<Bipartition> out;
    // All size-n subsets of {0..m-1} containing 0.
    std::vector<int> subset;
    const std::function<void(int)> recurse = [&](int next) {
        if (static_cast<int>(subset.size()) == n) {
            Bipartition b;
            b.zero_half = subset;
            for (int j = 0; j < m; ++j)
                if (!std::binary_search(subset.begin(), subset.end(), j))
                    b.one_half.push_back(j);
            out.push_back(std::move(b));
            return;
        }
        for (int j = next; j < m; ++j) {
            subset.push_back(j);
            recurse(j + 1);
            subset.pop_back();
        }
    };
    subset.push_back(0);
    recurse(1);
    return out;
}

ComplexOperator compute_G(const DeviceFamily& devices) {
    devices.validate();
    const IndexSpace space = devices.composite_space();
    const std::size_t dim = space.total_dim();
    const std::size_t block_dim = devices.internal_space_all().total_dim();
    const std::vector<int> zero_config(static_cast<std::size_t>(devices.device_count), 0);

    std::vector<cdouble> m(dim * dim, cdouble(0.0, 0.0));
    for (std::size_t s = 0; s < devices.spatial_string_count(); ++s) {
        const ComplexOperator block =
            product_block(devices, devices.spatial_string(s), zero_config);
        const std::size_t base = s * block_dim;
        for (std::size_t r = 0; r < block_dim; ++r)
            for (std::size_t c = 0; c < block_dim; ++c)
                m[(base + r) * dim + base + c] = block.at(r, c);
    }
    return ComplexOperator(space, std::move(m), OpKind::unitary);
}

CanonicalForm canonicalize(const ExperimentTriple& triple) {
    triple.validate();
    const DeviceFamily& dev = triple.devices;
    const int m = dev.device_count;
    if (m % 2 != 0) throw DomainError("canonical form requires an even order");
    const int n = m / 2;
    if (dev.particle_count != n)
        throw DomainError("even-order canonical form expects m = 2n devices");
    if (dev.spatial_dim != m)
        throw DomainError("canonical form expects per-particle spatial dimension 2n");

    const double interference = semi_general_interference(simulate(triple)).value;
    if (interference < 0.5 - MAXIMALITY_TOL)
        throw NotMaximal("interference " + std::to_string(interference) +
                         " below the maximal gate");

    CanonicalForm form;
    form.G = compute_G(dev);
    const ComplexOperator g_dag = form.G.adjoint();
    const std::size_t block_dim = dev.internal_space_all().total_dim();

    for (const auto& [weight, psi] : triple.ensemble) {
        ComponentForm component;
        component.weight = weight;

        // Support strings of the component; collisions are forbidden on the
        // support of a maximal experiment.
        std::map<std::vector<int>, std::vector<std::size_t>> by_set;
        for (std::size_t s = 0; s < dev.spatial_string_count(); ++s) {
            const auto block = internal_block(dev, psi, s);
            if (block_weight(block) <= SUPPORT_TOL) continue;
            const auto string = dev.spatial_string(s);
            component.support_strings.push_back(string);
            const auto set = value_set(string);
            if (static_cast<int>(set.size()) != n)
                throw FormViolation("support on a colliding spatial string " +
                                    config_label(string));
            by_set[set].push_back(s);
        }

        // Pair complementary value sets into bipartitions.
        std::set<std::vector<int>> consumed;
        double total_q = 0.0;
        for (const auto& [set, strings] : by_set) {
            if (consumed.count(set)) continue;
            std::vector<int> complement;
            for (int j = 0; j < m; ++j)
                if (!std::binary_search(set.begin(), set.end(), j))
                    complement.push_back(j);
            const auto partner = by_set.find(complement);
            if (partner == by_set.end())
                throw FormViolation("unpaired bipartition side " +
                                    strings_label({set}));
            consumed.insert(set);
            consumed.insert(complement);

            const bool set_is_zero = std::binary_search(set.begin(), set.end(), 0);
            const auto& zero_side = set_is_zero ? strings : partner->second;
            const auto& one_side = set_is_zero ? partner->second : strings;

            BranchForm branch;
            branch.parts.zero_half = set_is_zero ? set : complement;
            branch.parts.one_half = set_is_zero ? complement : set;

            const std::size_t dim = psi.dim();
            std::vector<cdouble> w0(dim, cdouble(0.0, 0.0));
            std::vector<cdouble> w1(dim, cdouble(0.0, 0.0));
            for (const auto s : zero_side)
                for (std::size_t i = 0; i < block_dim; ++i)
                    w0[s * block_dim + i] = psi.amps[s * block_dim + i];
            for (const auto s : one_side)
                for (std::size_t i = 0; i < block_dim; ++i)
                    w1[s * block_dim + i] = psi.amps[s * block_dim + i];
            StateVector side0 = make_state(psi.space, std::move(w0));
            StateVector side1 = make_state(psi.space, std::move(w1));

            const double q0 = side0.norm_sq();
            const double q1 = side1.norm_sq();
            if (std::abs(q0 - q1) > FORM_TOL)
                throw FormViolation("unbalanced bipartition weights at " +
                                    strings_label({branch.parts.zero_half,
                                                   branch.parts.one_half}));
            branch.weight = q0 + q1;
            branch.beta0 = side0.normalized();
            branch.beta1 = side1.normalized();
            total_q += branch.weight;
            component.branches.push_back(std::move(branch));
        }
        if (std::abs(total_q - 1.0) > FORM_TOL)
            throw FormViolation("bipartition weights sum to " + std::to_string(total_q));

        // -1 eigenvector conditions: each folded device acts as -1 on the
        // internal component of every support string it appears in.
        for (const auto& string : component.support_strings) {
            const std::size_t s = config_to_index(string, dev.spatial_dim);
            const auto block = internal_block(dev, psi, s);
            const double norm = std::sqrt(block_weight(block));
            for (int l = 0; l < n; ++l) {
                const auto rotated = apply_folded_device(
                    dev, string[static_cast<std::size_t>(l)], l, block);
                double residual = 0.0;
                for (std::size_t i = 0; i < block.size(); ++i)
                    residual = std::max(residual,
                                        std::abs(rotated[i] + block[i]) / norm);
                if (residual > FORM_TOL)
                    throw FormViolation(
                        "device " + std::to_string(string[static_cast<std::size_t>(l)]) +
                        " is not a -1 eigen-action on string " + config_label(string));
            }
        }

        // Parity reconstruction over every configuration.
        for (std::size_t k = 0; k < (1ULL << m); ++k) {
            const auto config = config_from_index(k, m);
            const StateVector actual = folded_evolution(dev, g_dag, config, psi);
            std::vector<cdouble> rebuilt(psi.dim(), cdouble(0.0, 0.0));
            for (const auto& branch : component.branches) {
                const double zero_phase =
                    parity_on(config, branch.parts.zero_half) ? -1.0 : 1.0;
                const double rel = config_parity(config) ? -1.0 : 1.0;
                const double coeff = std::sqrt(branch.weight / 2.0);
                for (std::size_t i = 0; i < rebuilt.size(); ++i)
                    rebuilt[i] += coeff * zero_phase *
                                  (branch.beta0.amps[i] + rel * branch.beta1.amps[i]);
            }
            double err = 0.0;
            for (std::size_t i = 0; i < rebuilt.size(); ++i)
                err += std::norm(rebuilt[i] - actual.amps[i]);
            if (std::sqrt(err) > FORM_TOL)
                throw FormViolation("parity reconstruction failed at configuration " +
                                    config_label(config));
        }
        form.components.push_back(std::move(component));
    }
    return form;
}

// ---------------------------------------------------------------------------
// Transcript

bool Transcript::all_pass() const {
    for (const auto& e : entries)
        if (!e.pass) return false;
    return !entries.empty();
}

const CheckEntry* Transcript::find(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return &e;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Pipeline simulation shared by the builders and the verifier

namespace {

struct PipelineOutcome {
    ConditionalTable sector_table;
    std::vector<ConditionalTable> mediator_tables;
    ConditionalTable pooled_mediator_table;
    ConditionalTable final_table;
    // max |P(b | bvec, a, sector) - delta_{b, parity(bvec)}|
    double readout_residual = 0.0;
    // max deviation of P(bvec | a, B) from 2^{1-n} delta_{parity(bvec), parity(a)}
    double mediator_residual = 0.0;
    // max |P(B|a) - P(B|a')|
    double sector_residual = 0.0;
    double weight_deficit = 0.0;  // |sum_B P(B|a) - 1|
};

PipelineOutcome run_pipeline(const CompletionArtifact& artifact) {
    const ExperimentTriple& triple = artifact.source;
    const DeviceFamily& dev = triple.devices;
    const int m = dev.device_count;
    const int n = artifact.mediator_count;
    const std::size_t config_count = 1ULL << m;
    const std::size_t bvec_count = 1ULL << n;

    PipelineOutcome out;

    if (artifact.degenerate) {
        // m = n = 1: the final readout doubles as the single mediator.
        const ConditionalTable table = simulate(triple);
        out.final_table = table;
        out.pooled_mediator_table = table;
        out.mediator_tables = {table};
        out.sector_table.input_count = m;
        out.sector_table.outcome_labels = {"all"};
        out.sector_table.rows.assign(config_count, {1.0});
        return out;
    }

    // Distinct sector labels in stable order.
    std::vector<std::string> sector_labels;
    std::map<std::string, std::size_t> sector_index;
    for (const auto& sector : artifact.sectors) {
        const std::string label = strings_label(sector.strings);
        if (!sector_index.count(label)) {
            sector_index[label] = sector_labels.size();
            sector_labels.push_back(label);
        }
    }
    const std::size_t sector_count = sector_labels.size();

    // Accumulators.
    std::vector<std::vector<double>> sector_weight(
        config_count, std::vector<double>(sector_count, 0.0));
    std::vector<std::vector<std::vector<double>>> mediator_joint(
        config_count, std::vector<std::vector<double>>(
                          sector_count, std::vector<double>(bvec_count, 0.0)));
    std::vector<std::vector<double>> final_rows(config_count,
                                                std::vector<double>(2, 0.0));

    const ComplexOperator g_dag = artifact.G.adjoint();

    // One mediator-readout projector per sector and outcome string.
    std::vector<std::vector<ComplexOperator>> sector_effects;
    for (const auto& sector : artifact.sectors) {
        std::vector<ComplexOperator> effects;
        for (std::size_t bits = 0; bits < bvec_count; ++bits)
            effects.push_back(joint_mediator_effect(dev, sector.mediators, bits));
        sector_effects.push_back(std::move(effects));
    }

    for (std::size_t k = 0; k < config_count; ++k) {
        const auto config = config_from_index(k, m);
        for (std::size_t sc = 0; sc < artifact.sectors.size(); ++sc) {
            const auto& sector = artifact.sectors[sc];
            const auto& member = triple.ensemble[static_cast<std::size_t>(sector.component)];
            const std::size_t si = sector_index.at(strings_label(sector.strings));

            StateVector v = folded_evolution(dev, g_dag, config, member.state);
            StateVector w = sector.projector.apply(v);
            const double sector_prob = w.norm_sq();
            sector_weight[k][si] += member.weight * sector_prob;
            if (sector_prob <= 1e-15) continue;
            w = w.normalized();
            for (const auto& stage : sector.stages) w = stage.apply(w);

            for (std::size_t bits = 0; bits < bvec_count; ++bits) {
                const StateVector u = sector_effects[sc][bits].apply(w);
                const double p_bits = u.norm_sq();
                mediator_joint[k][si][bits] += member.weight * sector_prob * p_bits;
                if (p_bits <= 1e-12) continue;

                // Final parity readout Pi_b = sum_{parity = b} (x) effects,
                // applied to the post-mediator state.
                const int bits_parity =
                    static_cast<int>(std::popcount(bits) & 1U);
                double p_match = 0.0;
                for (std::size_t other = 0; other < bvec_count; ++other) {
                    if ((std::popcount(other) & 1U) !=
                        static_cast<unsigned>(bits_parity))
                        continue;
                    p_match += sector_effects[sc][other].apply(u).norm_sq() / p_bits;
                }
                out.readout_residual =
                    std::max(out.readout_residual, std::abs(p_match - 1.0));
                final_rows[k][static_cast<std::size_t>(bits_parity)] +=
                    member.weight * sector_prob * p_bits * p_match;
                final_rows[k][static_cast<std::size_t>(1 - bits_parity)] +=
                    member.weight * sector_prob * p_bits * (1.0 - p_match);
            }
        }
    }

    // Assemble tables.
    out.sector_table.input_count = m;
    out.sector_table.outcome_labels = sector_labels;
    out.sector_table.rows = sector_weight;

    out.pooled_mediator_table.input_count = m;
    for (std::size_t bits = 0; bits < bvec_count; ++bits)
        out.pooled_mediator_table.outcome_labels.push_back(
            bits_label(bits, n));
    out.pooled_mediator_table.rows.assign(config_count,
                                          std::vector<double>(bvec_count, 0.0));

    out.mediator_tables.assign(sector_count, ConditionalTable{});
    for (std::size_t si = 0; si < sector_count; ++si) {
        out.mediator_tables[si].input_count = m;
        out.mediator_tables[si].outcome_labels = out.pooled_mediator_table.outcome_labels;
        out.mediator_tables[si].rows.assign(config_count,
                                            std::vector<double>(bvec_count, 0.0));
    }

    const double uniform = 1.0 / std::pow(2.0, n - 1);
    for (std::size_t k = 0; k < config_count; ++k) {
        const auto config = config_from_index(k, m);
        const int a_parity = config_parity(config);
        double total = 0.0;
        for (std::size_t si = 0; si < sector_count; ++si) {
            total += sector_weight[k][si];
            for (std::size_t bits = 0; bits < bvec_count; ++bits) {
                const double conditional =
                    sector_weight[k][si] > 1e-15
                        ? mediator_joint[k][si][bits] / sector_weight[k][si]
                        : 0.0;
                out.mediator_tables[si].rows[k][bits] = conditional;
                out.pooled_mediator_table.rows[k][bits] +=
                    mediator_joint[k][si][bits];
                const double expected =
                    (static_cast<int>(std::popcount(bits) & 1U) == a_parity)
                        ? uniform
                        : 0.0;
                if (sector_weight[k][si] > 1e-12)
                    out.mediator_residual = std::max(
                        out.mediator_residual, std::abs(conditional - expected));
            }
        }
        out.weight_deficit = std::max(out.weight_deficit, std::abs(total - 1.0));
        // a-independence of the sector weights.
        for (std::size_t si = 0; si < sector_count; ++si)
            out.sector_residual =
                std::max(out.sector_residual,
                         std::abs(sector_weight[k][si] - sector_weight[0][si]));
    }

    out.final_table.input_count = m;
    out.final_table.outcome_labels = {"0", "1"};
    out.final_table.rows = final_rows;
    return out;
}

void attach_tables(CompletionArtifact& artifact) {
    PipelineOutcome out = run_pipeline(artifact);
    artifact.sector_table = std::move(out.sector_table);
    artifact.mediator_tables = std::move(out.mediator_tables);
    artifact.pooled_mediator_table = std::move(out.pooled_mediator_table);
    artifact.final_table = std::move(out.final_table);
}

} // namespace

// ---------------------------------------------------------------------------
// Even-order completion pipeline

CompletionArtifact build_even_completion(const ExperimentTriple& triple) {
    const CanonicalForm form = canonicalize(triple);
    const DeviceFamily& dev = triple.devices;
    const int n = dev.particle_count;
    const std::size_t block_dim = dev.internal_space_all().total_dim();

    CompletionArtifact artifact;
    artifact.source = triple;
    artifact.mediator_count = n;
    artifact.G = form.G;

    const IndexSpace space = dev.composite_space();
    for (std::size_t c = 0; c < form.components.size(); ++c) {
        const ComponentForm& component = form.components[c];
        for (const auto& branch : component.branches) {
            SectorPipeline sector;
            sector.component = static_cast<int>(c);
            sector.weight = branch.weight;

            // E projects onto every ordering of either half.
            std::vector<std::vector<int>> strings;
            for (std::size_t s = 0; s < dev.spatial_string_count(); ++s) {
                const auto string = dev.spatial_string(s);
                const auto set = value_set(string);
                if (set == branch.parts.zero_half || set == branch.parts.one_half)
                    strings.push_back(string);
            }
            sector.strings = {branch.parts.zero_half, branch.parts.one_half};
            sector.projector = string_projector(dev, strings);

            // H maps the branch vectors onto the sorted strings with a fixed
            // internal reference vector.
            const std::size_t s0 =
                config_to_index(branch.parts.zero_half, dev.spatial_dim);
            const std::size_t s1 =
                config_to_index(branch.parts.one_half, dev.spatial_dim);
            const StateVector target0 =
                StateVector::basis(space, s0 * block_dim);  // |S0> (x) e_0
            const StateVector target1 = StateVector::basis(space, s1 * block_dim);
            sector.stages = {
                extend_to_unitary({{branch.beta0, target0}, {branch.beta1, target1}})};

            for (int l = 0; l < n; ++l)
                sector.mediators.push_back(
                    {l, branch.parts.zero_half[static_cast<std::size_t>(l)],
                     branch.parts.one_half[static_cast<std::size_t>(l)]});
            artifact.sectors.push_back(std::move(sector));
        }
    }

    attach_tables(artifact);
    artifact.transcript = verify_mediation(artifact);
    return artifact;
}

// ---------------------------------------------------------------------------
// Odd-order completion pipeline (both repetition cases, plus the
// three-support pattern)

namespace {

struct OddSupport {
    std::vector<std::vector<int>> strings;  // support strings of the component
    std::vector<StateVector> internals;     // normalized internal components
    std::vector<double> weights;
};

OddSupport odd_support(const DeviceFamily& dev, const StateVector& psi) {
    OddSupport out;
    const IndexSpace internal_space = dev.internal_space_all();
    for (std::size_t s = 0; s < dev.spatial_string_count(); ++s) {
        auto block = internal_block(dev, psi, s);
        const double weight = block_weight(block);
        if (weight <= SUPPORT_TOL) continue;
        out.strings.push_back(dev.spatial_string(s));
        const double norm = std::sqrt(weight);
        for (auto& c : block) c /= norm;
        out.internals.emplace_back(internal_space, std::move(block));
        out.weights.push_back(weight);
    }
    return out;
}

// Apply the folded unitary of `device` to `particle` inside an internal-space
// state.
StateVector folded_on_particle(const DeviceFamily& dev, int device, int particle,
                               const StateVector& phi) {
    auto rotated = apply_folded_device(dev, device, particle, phi.amps);
    return StateVector(phi.space, std::move(rotated), phi.lossy);
}

double minus_one_residual(const StateVector& rotated, const StateVector& phi) {
    double acc = 0.0;
    for (std::size_t i = 0; i < phi.amps.size(); ++i)
        acc = std::max(acc, std::abs(rotated.amps[i] + phi.amps[i]));
    return acc;
}

// Embed an internal-space vector at a spatial string.
StateVector at_string(const DeviceFamily& dev, const std::vector<int>& string,
                      const StateVector& phi) {
    const IndexSpace space = dev.composite_space();
    const std::size_t block_dim = phi.dim();
    std::vector<cdouble> amps(space.total_dim(), cdouble(0.0, 0.0));
    const std::size_t s = config_to_index(string, dev.spatial_dim);
    for (std::size_t i = 0; i < block_dim; ++i) amps[s * block_dim + i] = phi.amps[i];
    return StateVector(space, std::move(amps));
}

// First permutation of l's entries that is componentwise distinct from k.
std::vector<int> componentwise_distinct(const std::vector<int>& k,
                                        std::vector<int> l) {
    std::sort(l.begin(), l.end());
    do {
        bool ok = true;
        for (std::size_t i = 0; i < k.size(); ++i)
            if (l[i] == k[i]) {
                ok = false;
                break;
            }
        if (ok) return l;
    } while (std::next_permutation(l.begin(), l.end()));
    throw UnsupportedSupport("no componentwise-distinct arrangement of the branch");
}

// Transposition of two spatial basis strings (identity if equal).
ComplexOperator string_swap(const DeviceFamily& dev, const std::vector<int>& from,
                            const std::vector<int>& to) {
    const IndexSpace space = dev.composite_space();
    if (from == to) return ComplexOperator::identity(space);
    const std::size_t block_dim = dev.internal_space_all().total_dim();
    const std::size_t dim = space.total_dim();
    std::vector<cdouble> m(dim * dim, cdouble(0.0, 0.0));
    const std::size_t a = config_to_index(from, dev.spatial_dim);
    const std::size_t b = config_to_index(to, dev.spatial_dim);
    for (std::size_t s = 0; s < dev.spatial_string_count(); ++s) {
        std::size_t target = s;
        if (s == a) target = b;
        if (s == b) target = a;
        for (std::size_t i = 0; i < block_dim; ++i)
            m[(target * block_dim + i) * dim + s * block_dim + i] = cdouble(1.0, 0.0);
    }
    return ComplexOperator(space, std::move(m), OpKind::unitary);
}

struct ThreeSupportPattern {
    std::size_t repeated;  // index of the (v,v) string
    std::size_t bridge;    // index of the string sharing v
    std::size_t isolated;  // index of the remaining string
};

std::optional<ThreeSupportPattern> match_three_support(
    const std::vector<std::vector<int>>& strings) {
    if (strings.size() != 3) return std::nullopt;
    std::optional<std::size_t> repeated;
    for (std::size_t i = 0; i < 3; ++i) {
        if (value_set(strings[i]).size() == 1) {
            if (repeated) return std::nullopt;
            repeated = i;
        }
    }
    if (!repeated) return std::nullopt;
    const int v = strings[*repeated][0];
    std::optional<std::size_t> bridge, isolated;
    for (std::size_t i = 0; i < 3; ++i) {
        if (i == *repeated) continue;
        const auto set = value_set(strings[i]);
        const bool has_v = std::binary_search(set.begin(), set.end(), v);
        if (has_v) {
            if (bridge) return std::nullopt;
            bridge = i;
        } else {
            if (isolated) return std::nullopt;
            isolated = i;
        }
    }
    if (!bridge || !isolated) return std::nullopt;
    return ThreeSupportPattern{*repeated, *bridge, *isolated};
}

} // namespace

CompletionArtifact build_odd_completion(const ExperimentTriple& triple) {
    triple.validate();
    const DeviceFamily& dev = triple.devices;
    const int m = dev.device_count;
    const int n = dev.particle_count;
    if (m != 2 * n - 1)
        throw DomainError("odd-order completion expects m = 2n - 1 devices");

    CompletionArtifact artifact;
    artifact.source = triple;
    artifact.mediator_count = n;

    if (m == 1 && n == 1) {
        // Degenerate base case: the final readout is its own mediating event.
        const double interference =
            semi_general_interference(simulate(triple)).value;
        if (interference < 0.5 - MAXIMALITY_TOL)
            throw NotMaximal("interference below the maximal gate");
        artifact.degenerate = true;
        artifact.G = ComplexOperator::identity(dev.composite_space());
        attach_tables(artifact);
        artifact.transcript = verify_mediation(artifact);
        return artifact;
    }

    const double interference = semi_general_interference(simulate(triple)).value;
    if (interference < 0.5 - MAXIMALITY_TOL)
        throw NotMaximal("interference " + std::to_string(interference) +
                         " below the maximal gate");

    artifact.G = compute_G(dev);
    const IndexSpace space = dev.composite_space();
    const IndexSpace internal_space = dev.internal_space_all();

    for (std::size_t c = 0; c < triple.ensemble.size(); ++c) {
        const StateVector& psi = triple.ensemble[c].state;
        OddSupport support = odd_support(dev, psi);

        if (const auto pattern = match_three_support(support.strings)) {
            // Three-support family: merge the repeated and bridge strings into
            // the bridge, then interfere bridge against the isolated string.
            const auto& s_rep = support.strings[pattern->repeated];
            const auto& s_bri = support.strings[pattern->bridge];
            const auto& s_iso = support.strings[pattern->isolated];
            if (n != 2)
                throw UnsupportedSupport("three-support pipeline is built for n = 2");

            // Devices: v repeated, w shared between bridge and isolated, z only
            // in the isolated string.
            const int v = s_rep[0];
            int w = -1;
            for (int x : s_bri)
                if (x != v) w = x;
            if (w < 0 || std::count(s_iso.begin(), s_iso.end(), w) != 1)
                throw UnsupportedSupport("three-support strings lack the shared device");
            const int w_pos_bridge = (s_bri[0] == w) ? 0 : 1;
            const int w_pos_iso = (s_iso[0] == w) ? 0 : 1;

            const StateVector& phi_rep = support.internals[pattern->repeated];
            const StateVector& phi_bri = support.internals[pattern->bridge];
            const StateVector& phi_iso = support.internals[pattern->isolated];
            const double p_rep = support.weights[pattern->repeated];
            const double p_bri = support.weights[pattern->bridge];
            const double p_iso = support.weights[pattern->isolated];
            if (std::abs(p_iso - 0.5) > FORM_TOL)
                throw FormViolation("isolated-string weight must be 1/2");

            // phi_iso under the shared device, decomposed as alpha|0> + beta|1>.
            const StateVector phi_iso_1 =
                folded_on_particle(dev, w, w_pos_iso, phi_iso);
            const cdouble alpha = inner(phi_iso, phi_iso_1);
            StateVector hat1 = phi_iso_1;
            for (std::size_t i = 0; i < hat1.amps.size(); ++i)
                hat1.amps[i] -= alpha * phi_iso.amps[i];
            const double beta = hat1.norm();
            if (beta > 1e-9) hat1 = hat1.normalized();

            // theta_x = sqrt(2 p_rep) |rep> phi_rep + sqrt(2 p_bri) |bri> W^x phi_bri.
            const StateVector phi_bri_1 =
                folded_on_particle(dev, w, w_pos_bridge, phi_bri);
            const auto theta = [&](const StateVector& bri_part) {
                StateVector t = cdouble(std::sqrt(2.0 * p_rep), 0.0) *
                                at_string(dev, s_rep, phi_rep);
                return t + cdouble(std::sqrt(2.0 * p_bri), 0.0) *
                               at_string(dev, s_bri, bri_part);
            };
            const StateVector theta0 = theta(phi_bri);
            const StateVector theta1 = theta(phi_bri_1);
            const cdouble gamma = inner(theta0, theta1);
            if (std::abs(gamma + alpha) > FORM_TOL)
                throw FormViolation("three-support overlap constraint violated");

            // M: fold theta-span onto |bri> (x) {phi_iso, hat1}, pin the
            // isolated branch.
            std::vector<std::pair<StateVector, StateVector>> pairs;
            pairs.push_back({at_string(dev, s_iso, phi_iso),
                             at_string(dev, s_iso, phi_iso)});
            pairs.push_back({theta0, at_string(dev, s_bri, phi_iso)});
            if (beta > 1e-9) {
                pairs.push_back({at_string(dev, s_iso, hat1),
                                 at_string(dev, s_iso, hat1)});
                StateVector theta_perp = theta1;
                for (std::size_t i = 0; i < theta_perp.amps.size(); ++i)
                    theta_perp.amps[i] -= gamma * theta0.amps[i];
                theta_perp = theta_perp.normalized();
                pairs.push_back({theta_perp, at_string(dev, s_bri, hat1)});
            }
            SectorPipeline sector;
            sector.component = static_cast<int>(c);
            sector.weight = 1.0;
            sector.strings = {s_rep, s_bri, s_iso};
            sector.projector = string_projector(dev, sector.strings);
            sector.stages.push_back(extend_to_unitary(pairs));
            if (beta > 1e-9) {
                // Flip |bri>(x)|hat1>.
                const StateVector flip_target = at_string(dev, s_bri, hat1);
                sector.stages.push_back(
                    (ComplexOperator::identity(space) -
                     cdouble(2.0, 0.0) *
                         ComplexOperator::outer(flip_target, flip_target))
                        .with_kind(OpKind::unitary));
            }
            // Arrange the bridge string so every mode pair is distinct.
            const std::vector<int> bri_arranged = componentwise_distinct(s_iso, s_bri);
            sector.stages.push_back(string_swap(dev, s_bri, bri_arranged));
            for (int l = 0; l < n; ++l)
                sector.mediators.push_back({l, s_iso[static_cast<std::size_t>(l)],
                                            bri_arranged[static_cast<std::size_t>(l)]});
            artifact.sectors.push_back(std::move(sector));
            continue;
        }

        if (support.strings.size() != 2)
            throw UnsupportedSupport("component is supported on " +
                                     std::to_string(support.strings.size()) +
                                     " spatial strings");
        std::vector<int> k = support.strings[0];
        std::vector<int> l = support.strings[1];
        StateVector phi_k = support.internals[0];
        StateVector phi_l = support.internals[1];
        double p_k = support.weights[0];
        double p_l = support.weights[1];

        std::vector<int> joint = k;
        joint.insert(joint.end(), l.begin(), l.end());
        if (static_cast<int>(value_set(joint).size()) != m)
            throw UnsupportedSupport("support strings do not cover 2n - 1 devices");
        if (std::abs(p_k - 0.5) > FORM_TOL || std::abs(p_l - 0.5) > FORM_TOL)
            throw FormViolation("branch weights must both be 1/2");

        const bool k_has_repeat = static_cast<int>(value_set(k).size()) < n;
        const bool l_has_repeat = static_cast<int>(value_set(l).size()) < n;
        if (k_has_repeat && l_has_repeat)
            throw UnsupportedSupport("both strings carry internal repetitions");
        if (l_has_repeat) {
            std::swap(k, l);
            std::swap(phi_k, phi_l);
            std::swap(p_k, p_l);
        }

        SectorPipeline sector;
        sector.component = static_cast<int>(c);
        sector.weight = 1.0;
        sector.strings = {k, l};
        sector.projector = string_projector(dev, sector.strings);

        if (static_cast<int>(value_set(k).size()) < n) {
            // Case: repetition inside one string. Check the -1 conditions:
            // the repeated device acts as -1 jointly on its two particles,
            // every other device singly.
            int rep_r = -1, rep_s = -1;
            for (int i = 0; i < n && rep_s < 0; ++i)
                for (int j = i + 1; j < n && rep_s < 0; ++j)
                    if (k[static_cast<std::size_t>(i)] == k[static_cast<std::size_t>(j)]) {
                        rep_r = i;
                        rep_s = j;
                    }
            const StateVector pair_rotated = folded_on_particle(
                dev, k[static_cast<std::size_t>(rep_r)], rep_s,
                folded_on_particle(dev, k[static_cast<std::size_t>(rep_r)], rep_r, phi_k));
            if (minus_one_residual(pair_rotated, phi_k) > FORM_TOL)
                throw FormViolation("repeated device is not a joint -1 eigen-action");
            for (int i = 0; i < n; ++i) {
                if (i != rep_r && i != rep_s &&
                    minus_one_residual(
                        folded_on_particle(dev, k[static_cast<std::size_t>(i)], i, phi_k),
                        phi_k) > FORM_TOL)
                    throw FormViolation("device " +
                                        std::to_string(k[static_cast<std::size_t>(i)]) +
                                        " is not a -1 eigen-action on the first branch");
                if (minus_one_residual(
                        folded_on_particle(dev, l[static_cast<std::size_t>(i)], i, phi_l),
                        phi_l) > FORM_TOL)
                    throw FormViolation("device " +
                                        std::to_string(l[static_cast<std::size_t>(i)]) +
                                        " is not a -1 eigen-action on the second branch");
            }

            // One unitary aligns both internal components.
            const StateVector reference = StateVector::basis(internal_space, 0);
            sector.stages = {extend_to_unitary(
                {{at_string(dev, k, phi_k), at_string(dev, k, reference)},
                 {at_string(dev, l, phi_l), at_string(dev, l, reference)}})};
            for (int i = 0; i < n; ++i)
                sector.mediators.push_back({i, k[static_cast<std::size_t>(i)],
                                            l[static_cast<std::size_t>(i)]});
        } else {
            // Case: one device shared across the strings.
            int r = -1, s = -1;
            for (int i = 0; i < n && r < 0; ++i)
                for (int j = 0; j < n && r < 0; ++j)
                    if (k[static_cast<std::size_t>(i)] == l[static_cast<std::size_t>(j)]) {
                        r = i;
                        s = j;
                    }
            if (r < 0) throw UnsupportedSupport("no shared device between the strings");
            const int shared = k[static_cast<std::size_t>(r)];

            for (int i = 0; i < n; ++i) {
                if (i != r &&
                    minus_one_residual(
                        folded_on_particle(dev, k[static_cast<std::size_t>(i)], i, phi_k),
                        phi_k) > FORM_TOL)
                    throw FormViolation("device " +
                                        std::to_string(k[static_cast<std::size_t>(i)]) +
                                        " is not a -1 eigen-action on the first branch");
                if (i != s &&
                    minus_one_residual(
                        folded_on_particle(dev, l[static_cast<std::size_t>(i)], i, phi_l),
                        phi_l) > FORM_TOL)
                    throw FormViolation("device " +
                                        std::to_string(l[static_cast<std::size_t>(i)]) +
                                        " is not a -1 eigen-action on the second branch");
            }

            const StateVector phi_k1 = folded_on_particle(dev, shared, r, phi_k);
            const StateVector phi_l1 = folded_on_particle(dev, shared, s, phi_l);
            const cdouble alpha = inner(phi_k, phi_k1);
            const cdouble gamma = inner(phi_l, phi_l1);
            if (std::abs(gamma + alpha) > FORM_TOL)
                throw FormViolation("cross-repetition overlap constraint violated");

            StateVector hat1 = phi_k1;
            for (std::size_t i = 0; i < hat1.amps.size(); ++i)
                hat1.amps[i] -= alpha * phi_k.amps[i];
            const double beta = hat1.norm();
            if (beta > 1e-9) hat1 = hat1.normalized();

            std::vector<std::pair<StateVector, StateVector>> pairs;
            pairs.push_back({at_string(dev, k, phi_k), at_string(dev, k, phi_k)});
            pairs.push_back({at_string(dev, l, phi_l), at_string(dev, l, phi_k)});
            if (beta > 1e-9) {
                pairs.push_back({at_string(dev, k, hat1), at_string(dev, k, hat1)});
                StateVector l_perp = phi_l1;
                for (std::size_t i = 0; i < l_perp.amps.size(); ++i)
                    l_perp.amps[i] -= gamma * phi_l.amps[i];
                l_perp = l_perp.normalized();
                pairs.push_back({at_string(dev, l, l_perp), at_string(dev, l, hat1)});
            }
            sector.stages.push_back(extend_to_unitary(pairs));
            if (beta > 1e-9) {
                const StateVector flip_target = at_string(dev, l, hat1);
                sector.stages.push_back(
                    (ComplexOperator::identity(space) -
                     cdouble(2.0, 0.0) *
                         ComplexOperator::outer(flip_target, flip_target))
                        .with_kind(OpKind::unitary));
            }
            const std::vector<int> l_arranged = componentwise_distinct(k, l);
            sector.stages.push_back(string_swap(dev, l, l_arranged));
            for (int i = 0; i < n; ++i)
                sector.mediators.push_back({i, k[static_cast<std::size_t>(i)],
                                            l_arranged[static_cast<std::size_t>(i)]});
        }
        artifact.sectors.push_back(std::move(sector));
    }

    attach_tables(artifact);
    artifact.transcript = verify_mediation(artifact);
    return artifact;
}

// ---------------------------------------------------------------------------
// Three-support instance (odd order, n = 2)

ExperimentTriple build_three_support_instance(double p11, double p12, double a01) {
    if (p11 <= 0.0 || p12 <= 0.0)
        throw DomainError("support weights must be positive");
    if (std::abs(p11 + p12 - 0.5) > EPS_EQ)
        throw DomainError("p11 + p12 must equal 1/2");
    if (std::abs(a01) > 1.0) throw DomainError("|a01| must not exceed 1");
    const double b01 = 2.0 * p12 * (1.0 - a01) - 1.0;
    if (b01 < -1.0 - EPS_EQ || b01 > 1.0 + EPS_EQ)
        throw ConstraintInfeasible("derived overlap b01 = " + std::to_string(b01) +
                                   " leaves [-1, 1]");

    DeviceFamily family;
    family.device_count = 3;
    family.particle_count = 2;
    family.internal_dim = 2;
    family.spatial_dim = 3;

    const IndexSpace internal = IndexSpace::single("int", 2);
    const ComplexOperator id = ComplexOperator::identity(internal);
    const ComplexOperator neg(internal, {-1, 0, 0, -1}, OpKind::unitary);
    const ComplexOperator zphase(internal, {1, 0, 0, -1}, OpKind::unitary);
    // Device 0 and 2 flip the sign of any internal state; device 1 carries the
    // tunable overlap.
    family.unitaries = {{id, neg}, {id, zphase}, {id, neg}};

    // Repeated string (0,0) needs its own two-particle block; -1 on the
    // component the state occupies.
    const IndexSpace pair_internal = family.internal_space_all();
    set_collision_override(family, {0, 0}, {0, 0},
                           ComplexOperator::identity(pair_internal));
    set_collision_override(
        family, {0, 0}, {1, 1},
        (cdouble(-1.0, 0.0) * ComplexOperator::identity(pair_internal))
            .with_kind(OpKind::unitary));

    const IndexSpace space = family.composite_space();
    std::vector<cdouble> amps(space.total_dim(), cdouble(0.0, 0.0));
    const std::size_t block = pair_internal.total_dim();

    const auto put = [&](const std::vector<int>& string,
                         const std::vector<cdouble>& phi, double weight) {
        const std::size_t s = config_to_index(string, family.spatial_dim);
        for (std::size_t i = 0; i < block; ++i)
            amps[s * block + i] += std::sqrt(weight) * phi[i];
    };

    // phi on (0,0): any unit vector (the override is -1 on everything).
    put({0, 0}, {1, 0, 0, 0}, p11);
    // phi on (1,2): (d0|0> + d1|1>) (x) |0> with <Z (x) 1> = b01.
    const double d0 = std::sqrt((1.0 + b01) / 2.0);
    const double d1 = std::sqrt(std::max(0.0, (1.0 - b01) / 2.0));
    put({1, 2}, {d0, 0, d1, 0}, 0.5);
    // phi on (0,1): |0> (x) (c0|0> + c1|1>) with <1 (x) Z> = a01.
    const double c0 = std::sqrt((1.0 + a01) / 2.0);
    const double c1 = std::sqrt(std::max(0.0, (1.0 - a01) / 2.0));
    put({0, 1}, {c0, c1, 0, 0}, p12);

    ExperimentTriple triple;
    triple.devices = family;
    triple.ensemble = {{1.0, StateVector(space, std::move(amps))}};
    // Placeholder measurement, replaced by the optimal discrimination POVM.
    triple.measurement =
        BinaryPovm::from_effect0(ComplexOperator::identity(space));
    const auto [rho0, rho1] = split_states(triple);
    triple.measurement = helstrom(rho0, rho1).povm;
    return triple;
}

// ---------------------------------------------------------------------------
// Verification

Transcript verify_mediation(const CompletionArtifact& artifact) {
    Transcript transcript;
    const auto add = [&](const std::string& name, bool pass, double residual,
                         const std::string& detail = "") {
        transcript.entries.push_back({name, pass, residual, detail});
    };

    if (artifact.sectors.empty() && !artifact.degenerate) {
        add("mediators-present", false, 0.0,
            "artifact carries no mediating measurements");
        return transcript;
    }

    const PipelineOutcome out = run_pipeline(artifact);
    const ConditionalTable source_table = simulate(artifact.source);
    const int n = artifact.mediator_count;

    if (artifact.degenerate) {
        add("mediators-present", true, 0.0, "degenerate order-1 pipeline");
        double residual = 0.0;
        for (std::size_t k = 0; k < source_table.rows.size(); ++k)
            for (std::size_t b = 0; b < 2; ++b)
                residual = std::max(residual,
                                    std::abs(out.final_table.rows[k][b] -
                                             source_table.rows[k][b]));
        add("preservation", residual <= EPS_EQ, residual);
        const double value = semi_general_interference(out.final_table).value;
        add("maximal-interference", std::abs(value - 0.5) <= EPS_EQ,
            std::abs(value - 0.5));
        add("number-preservation", true, 0.0,
            "first-quantized pipeline: all effects preserve the particle count");
        return transcript;
    }

    add("mediators-present", true, 0.0,
        std::to_string(artifact.sectors.size()) + " sector pipelines");

    // Parity readout is deterministic given the mediator outcomes.
    add("readout-parity", out.readout_residual <= EPS_EQ, out.readout_residual,
        "P(b | b1..bn) = delta against the mediator parity");

    // Mediator conditionals: 2^{1-n} delta on the input parity.
    add("mediator-correlation", out.mediator_residual <= EPS_EQ,
        out.mediator_residual,
        "P(b1..bn | a, B) = 2^{1-n} delta(parity b, parity a)");

    // Sector weights independent of the configuration and complete.
    add("sector-a-independence", out.sector_residual <= EPS_EQ, out.sector_residual);
    add("sector-completeness", out.weight_deficit <= EPS_EQ, out.weight_deficit);

    // Chain identity with the pooled readout conditional.
    double chain_residual = 0.0;
    const std::size_t bvec_count = 1ULL << n;
    for (std::size_t k = 0; k < out.final_table.rows.size(); ++k) {
        for (std::size_t b = 0; b < 2; ++b) {
            double chained = 0.0;
            for (std::size_t bits = 0; bits < bvec_count; ++bits) {
                const double p_b_given =
                    (static_cast<unsigned>(std::popcount(bits)) & 1U) == b ? 1.0 : 0.0;
                chained += p_b_given * out.pooled_mediator_table.rows[k][bits];
            }
            chain_residual = std::max(
                chain_residual, std::abs(chained - out.final_table.rows[k][b]));
        }
    }
    add("chain-identity", chain_residual <= EPS_EQ, chain_residual,
        "P(b|a) = sum_bvec P(b|bvec) P(bvec|a)");

    // Preservation against the source experiment.
    double preservation = 0.0;
    for (std::size_t k = 0; k < source_table.rows.size(); ++k)
        for (std::size_t b = 0; b < 2; ++b)
            preservation = std::max(preservation,
                                    std::abs(out.final_table.rows[k][b] -
                                             source_table.rows[k][b]));
    add("preservation", preservation <= EPS_EQ, preservation);

    const double value = semi_general_interference(out.final_table).value;
    add("maximal-interference", std::abs(value - 0.5) <= EPS_EQ,
        std::abs(value - 0.5));

    // First-quantized number preservation: every effect acts inside the fixed
    // n-particle space by construction; recorded explicitly.
    add("number-preservation", true, 0.0,
        "first-quantized pipeline: all effects preserve the particle count");

    // Mediator locality: each readout commutes with unitaries on the other
    // particles' factors.
    double locality_residual = 0.0;
    const DeviceFamily& dev = artifact.source.devices;
    Rng probe_rng(0x10ca11);
    for (const auto& sector : artifact.sectors) {
        for (const auto& med : sector.mediators) {
            const ComplexOperator effect = mediator_effect(dev, med, 0);
            // Random unitary on every factor except the mediator's particle.
            ComplexOperator other;
            for (int p = 0; p < dev.particle_count; ++p) {
                const IndexSpace factor = IndexSpace::single(
                    "pos" + std::to_string(p + 1),
                    static_cast<std::size_t>(dev.spatial_dim));
                ComplexOperator op = (p == med.particle)
                                         ? ComplexOperator::identity(factor)
                                         : haar_unitary(factor, probe_rng);
                other = (p == 0) ? op : tensor_product(other, op);
            }
            other = tensor_product(other, haar_unitary(dev.internal_space_all(),
                                                       probe_rng));
            locality_residual = std::max(
                locality_residual, (effect * other - other * effect).max_abs());
        }
    }
    add("mediator-locality", locality_residual <= 1e-10, locality_residual,
        "each readout acts on one particle's spatial factor");

    return transcript;
}

CompletionArtifact raw_artifact(const ExperimentTriple& triple) {
    CompletionArtifact artifact;
    artifact.source = triple;
    artifact.mediator_count = 0;
    artifact.G = ComplexOperator::identity(triple.devices.composite_space());
    return artifact;
}

// ---------------------------------------------------------------------------
// Random maximal instances

ExperimentTriple random_maximal_even_instance(int n, int d, Rng& rng) {
    const int m = 2 * n;
    DeviceFamily family;
    family.device_count = m;
    family.particle_count = n;
    family.internal_dim = d;
    family.spatial_dim = m;

    const IndexSpace internal = IndexSpace::single("int", static_cast<std::size_t>(d));
    std::vector<StateVector> minus_vec;  // -1 eigenvector of each folded device
    for (int j = 0; j < m; ++j) {
        Rng dev_rng = rng.child(500, static_cast<std::uint64_t>(j));
        const ComplexOperator frame = haar_unitary(internal, dev_rng);
        // Folded unitary with eigenvalue -1 on the first frame column.
        std::vector<cdouble> diag(static_cast<std::size_t>(d) *
                                      static_cast<std::size_t>(d),
                                  cdouble(0.0, 0.0));
        for (int q = 0; q < d; ++q) {
            const double phase =
                (q == 0) ? M_PI : dev_rng.uniform(0.0, 2.0 * M_PI);
            diag[static_cast<std::size_t>(q) * d + q] =
                std::polar(1.0, phase);
        }
        const ComplexOperator folded =
            (frame * ComplexOperator(internal, std::move(diag)) * frame.adjoint())
                .with_kind(OpKind::unitary);
        std::vector<cdouble> v(static_cast<std::size_t>(d));
        for (int r = 0; r < d; ++r) v[static_cast<std::size_t>(r)] = frame.at(r, 0);
        minus_vec.emplace_back(internal, std::move(v));

        const ComplexOperator dressing = haar_unitary(internal, dev_rng);
        family.unitaries.push_back(
            {dressing, (dressing * folded).with_kind(OpKind::unitary)});
    }

    // Occupied bipartitions and weights.
    const auto all_bips = canonical_bipartitions(n);
    Rng shape_rng = rng.child(501);
    const std::size_t occupied =
        1 + shape_rng.next_u64() % std::min<std::size_t>(all_bips.size(), 2);
    std::vector<std::size_t> picks;
    while (picks.size() < occupied) {
        const std::size_t candidate = shape_rng.next_u64() % all_bips.size();
        if (std::find(picks.begin(), picks.end(), candidate) == picks.end())
            picks.push_back(candidate);
    }
    std::vector<double> weights(occupied);
    double total = 0.0;
    for (auto& w : weights) {
        w = -std::log(1.0 - shape_rng.uniform());
        total += w;
    }
    for (auto& w : weights) w /= total;

    const IndexSpace space = family.composite_space();
    const std::size_t block = family.internal_space_all().total_dim();
    std::vector<cdouble> amps(space.total_dim(), cdouble(0.0, 0.0));

    for (std::size_t p = 0; p < occupied; ++p) {
        const Bipartition& bip = all_bips[picks[p]];
        for (int side = 0; side < 2; ++side) {
            const std::vector<int>& half = side ? bip.one_half : bip.zero_half;
            // One or two orderings of the half, with random sub-weights.
            std::vector<std::vector<int>> orderings = {half};
            if (n > 1 && (shape_rng.next_u64() & 1ULL)) {
                std::vector<int> shuffled = half;
                std::swap(shuffled[0], shuffled[shuffled.size() - 1]);
                orderings.push_back(shuffled);
            }
            std::vector<double> sub(orderings.size());
            double sub_total = 0.0;
            for (auto& x : sub) {
                x = 0.2 + shape_rng.uniform();
                sub_total += x;
            }
            for (std::size_t o = 0; o < orderings.size(); ++o) {
                const double weight = weights[p] / 2.0 * sub[o] / sub_total;
                const double phase = shape_rng.uniform(0.0, 2.0 * M_PI);
                const cdouble coeff =
                    std::sqrt(weight) * std::polar(1.0, phase);
                // Internal vector: product of -1 eigenvectors of the string.
                std::vector<cdouble> vec = {cdouble(1.0, 0.0)};
                for (int l = 0; l < n; ++l) {
                    const auto& v =
                        minus_vec[static_cast<std::size_t>(
                                      orderings[o][static_cast<std::size_t>(l)])]
                            .amps;
                    std::vector<cdouble> next(vec.size() * v.size());
                    for (std::size_t i = 0; i < vec.size(); ++i)
                        for (std::size_t q = 0; q < v.size(); ++q)
                            next[i * v.size() + q] = vec[i] * v[q];
                    vec = std::move(next);
                }
                const std::size_t s = config_to_index(orderings[o], family.spatial_dim);
                for (std::size_t i = 0; i < block; ++i)
                    amps[s * block + i] += coeff * vec[i];
            }
        }
    }

    ExperimentTriple triple;
    triple.devices = family;
    triple.ensemble = {{1.0, StateVector(space, std::move(amps)).normalized()}};
    triple.measurement =
        BinaryPovm::from_effect0(ComplexOperator::identity(space));
    const auto [rho0, rho1] = split_states(triple);
    triple.measurement = helstrom(rho0, rho1).povm;
    return triple;
}

namespace {

DeviceFamily odd_family_with_folds(const std::vector<ComplexOperator>& folds,
                                   int n, Rng& rng) {
    DeviceFamily family;
    family.device_count = static_cast<int>(folds.size());
    family.particle_count = n;
    family.internal_dim = static_cast<int>(folds.front().dim());
    family.spatial_dim = family.device_count;
    const IndexSpace internal =
        IndexSpace::single("int", folds.front().dim());
    for (const auto& fold : folds) {
        const ComplexOperator dressing = haar_unitary(internal, rng);
        family.unitaries.push_back(
            {dressing, (dressing * fold).with_kind(OpKind::unitary)});
    }
    return family;
}

} // namespace

ExperimentTriple odd_case1_instance(Rng& rng) {
    // k = (0,0) with the repeated device, l = (1,2).
    const IndexSpace internal = IndexSpace::single("int", 2);
    const ComplexOperator z(internal, {1, 0, 0, -1}, OpKind::unitary);
    DeviceFamily family = odd_family_with_folds({z, z, z}, 2, rng);

    const IndexSpace space = family.composite_space();
    std::vector<cdouble> amps(space.total_dim(), cdouble(0.0, 0.0));
    const std::size_t block = family.internal_space_all().total_dim();
    // (Z (x) Z) phi = -phi on the repeated string: odd-parity internal state.
    const std::vector<cdouble> phi_k = {0, cdouble(M_SQRT1_2, 0),
                                        cdouble(M_SQRT1_2, 0), 0};
    const std::vector<cdouble> phi_l = {0, 0, 0, cdouble(1.0, 0)};  // |11>
    const std::size_t sk = config_to_index({0, 0}, 3);
    const std::size_t sl = config_to_index({1, 2}, 3);
    for (std::size_t i = 0; i < block; ++i) {
        amps[sk * block + i] += cdouble(M_SQRT1_2, 0.0) * phi_k[i];
        amps[sl * block + i] += cdouble(M_SQRT1_2, 0.0) * phi_l[i];
    }

    ExperimentTriple triple;
    triple.devices = family;
    triple.ensemble = {{1.0, StateVector(space, std::move(amps))}};
    triple.measurement =
        BinaryPovm::from_effect0(ComplexOperator::identity(space));
    const auto [rho0, rho1] = split_states(triple);
    triple.measurement = helstrom(rho0, rho1).povm;
    return triple;
}

ExperimentTriple odd_case2_instance(double alpha, Rng& rng) {
    if (std::abs(alpha) > 1.0) throw DomainError("|alpha| must not exceed 1");
    // k = (0,1), l = (0,2): device 0 shared at the first particle.
    const IndexSpace internal = IndexSpace::single("int", 2);
    const ComplexOperator z(internal, {1, 0, 0, -1}, OpKind::unitary);
    const ComplexOperator neg(internal, {-1, 0, 0, -1}, OpKind::unitary);
    DeviceFamily family = odd_family_with_folds({z, neg, neg}, 2, rng);

    const IndexSpace space = family.composite_space();
    std::vector<cdouble> amps(space.total_dim(), cdouble(0.0, 0.0));
    const std::size_t block = family.internal_space_all().total_dim();
    // <phi_k| Z (x) 1 |phi_k> = alpha, <phi_l| Z (x) 1 |phi_l> = -alpha.
    const double c0 = std::sqrt((1.0 + alpha) / 2.0);
    const double c1 = std::sqrt((1.0 - alpha) / 2.0);
    const std::vector<cdouble> phi_k = {c0, 0, c1, 0};  // (c0|0> + c1|1>) (x) |0>
    const std::vector<cdouble> phi_l = {c1, 0, c0, 0};
    const std::size_t sk = config_to_index({0, 1}, 3);
    const std::size_t sl = config_to_index({0, 2}, 3);
    for (std::size_t i = 0; i < block; ++i) {
        amps[sk * block + i] += cdouble(M_SQRT1_2, 0.0) * phi_k[i];
        amps[sl * block + i] += cdouble(M_SQRT1_2, 0.0) * phi_l[i];
    }

    ExperimentTriple triple;
    triple.devices = family;
    triple.ensemble = {{1.0, StateVector(space, std::move(amps))}};
    triple.measurement =
        BinaryPovm::from_effect0(ComplexOperator::identity(space));
    const auto [rho0, rho1] = split_states(triple);
    triple.measurement = helstrom(rho0, rho1).povm;
    return triple;
}

// ---------------------------------------------------------------------------
// Obstruction witness

ObstructionWitness example2_obstruction_witness() {
    const ExperimentTriple triple = example2_triple();
    const DeviceFamily& dev = triple.devices;
    const IndexSpace space = dev.composite_space();

    ObstructionWitness witness;
    // Every nonempty subset of the two mode locations hosting a presence
    // detector; the remainder projector completes the measurement.
    for (int mask = 1; mask < 4; ++mask) {
        std::vector<ComplexOperator> effects;
        ComplexOperator rest = ComplexOperator::identity(space);
        for (int mode = 0; mode < 2; ++mode) {
            if (!((mask >> mode) & 1)) continue;
            const StateVector basis =
                StateVector::basis(space, static_cast<std::size_t>(mode));
            const ComplexOperator proj = ComplexOperator::outer(basis, basis);
            effects.push_back(proj);
            rest = rest - proj;
        }
        if (rest.max_abs() > EPS_NORM) effects.push_back(rest);

        // Outcome distributions and conditional post-states per configuration.
        std::vector<std::vector<double>> outcome_rows;
        std::vector<std::vector<ComplexOperator>> post_states;
        std::vector<std::vector<double>> downstream_rows;
        for (std::size_t k = 0; k < 4; ++k) {
            const auto config = config_from_index(k, 2);
            const StateVector evolved =
                apply_global_unitary(dev, config, triple.ensemble[0].state);
            std::vector<double> row;
            std::vector<ComplexOperator> posts;
            std::vector<double> downstream = {0.0, 0.0};
            for (const auto& effect : effects) {
                const StateVector projected = effect.apply(evolved);
                const double p = projected.norm_sq();
                row.push_back(p);
                if (p > 1e-15) {
                    const StateVector normalized = projected.normalized();
                    posts.push_back(ComplexOperator::outer(normalized, normalized));
                    downstream[0] +=
                        p * triple.measurement.effect0.expectation(normalized);
                    downstream[1] +=
                        p * triple.measurement.effect1.expectation(normalized);
                } else {
                    posts.push_back(ComplexOperator::zero(space));
                }
            }
            outcome_rows.push_back(std::move(row));
            post_states.push_back(std::move(posts));
            downstream_rows.push_back(std::move(downstream));
        }

        for (std::size_t k = 1; k < 4; ++k) {
            double tvd = 0.0;
            for (std::size_t o = 0; o < outcome_rows[k].size(); ++o)
                tvd += std::abs(outcome_rows[k][o] - outcome_rows[0][o]);
            witness.max_outcome_tvd = std::max(witness.max_outcome_tvd, 0.5 * tvd);

            for (std::size_t o = 0; o < post_states[k].size(); ++o)
                if (outcome_rows[k][o] > 1e-15 && outcome_rows[0][o] > 1e-15)
                    witness.max_poststate_diff =
                        std::max(witness.max_poststate_diff,
                                 max_abs_diff(post_states[k][o], post_states[0][o]));

            double downstream_tvd = 0.0;
            for (std::size_t b = 0; b < 2; ++b)
                downstream_tvd +=
                    std::abs(downstream_rows[k][b] - downstream_rows[0][b]);
            witness.max_downstream_tvd =
                std::max(witness.max_downstream_tvd, 0.5 * downstream_tvd);
        }
    }
    return witness;
}

} // namespace interlab
