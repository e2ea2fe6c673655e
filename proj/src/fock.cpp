#include "interlab/fock.hpp"

#include <cmath>
#include <functional>

namespace interlab {

IndexSpace ModeRegister::space() const {
    std::vector<Factor> factors;
    for (const auto& mode : modes)
        factors.push_back({mode, static_cast<std::size_t>(max_occupation + 1)});
    return IndexSpace(std::move(factors));
}

std::size_t ModeRegister::mode_index(const std::string& mode) const {
    for (std::size_t i = 0; i < modes.size(); ++i)
        if (modes[i] == mode) return i;
    throw LabelError("unknown mode '" + mode + "'");
}

void ModeRegister::validate() const {
    if (modes.empty()) throw DomainError("empty mode register");
    if (max_occupation < 1) throw DomainError("occupation cap below 1");
    if (statistics == Statistics::fermion && max_occupation != 1)
        throw DomainError("fermionic registers force max_occupation = 1");
}

FockVector vacuum(const ModeRegister& reg) {
    reg.validate();
    return FockVector{reg, StateVector::basis(reg.space(), 0)};
}

ComplexOperator creation(const ModeRegister& reg, const std::string& mode) {
    reg.validate();
    const std::size_t target = reg.mode_index(mode);
    const IndexSpace space = reg.space();
    const std::size_t dim = space.total_dim();
    std::vector<cdouble> m(dim * dim, cdouble(0.0, 0.0));

    for (std::size_t col = 0; col < dim; ++col) {
        auto occ = space.unflatten(col);
        const std::size_t k = occ[target];
        if (k + 1 > static_cast<std::size_t>(reg.max_occupation)) continue;
        double amp = 1.0;
        if (reg.statistics == Statistics::boson) {
            amp = std::sqrt(static_cast<double>(k + 1));
        } else {
            // Jordan-Wigner string over earlier modes in register order.
            int string_parity = 0;
            for (std::size_t j = 0; j < target; ++j)
                string_parity ^= static_cast<int>(occ[j] & 1ULL);
            amp = string_parity ? -1.0 : 1.0;
        }
        occ[target] = k + 1;
        m[space.flatten(occ) * dim + col] = cdouble(amp, 0.0);
    }
    return ComplexOperator(space, std::move(m));
}

ComplexOperator total_number_operator(const ModeRegister& reg) {
    const IndexSpace space = reg.space();
    const std::size_t dim = space.total_dim();
    std::vector<cdouble> m(dim * dim, cdouble(0.0, 0.0));
    for (std::size_t i = 0; i < dim; ++i) {
        const auto occ = space.unflatten(i);
        std::size_t total = 0;
        for (auto k : occ) total += k;
        m[i * dim + i] = cdouble(static_cast<double>(total), 0.0);
    }
    return ComplexOperator(space, std::move(m), OpKind::hermitian);
}

ComplexOperator parity_operator(const ModeRegister& reg) {
    const IndexSpace space = reg.space();
    const std::size_t dim = space.total_dim();
    std::vector<cdouble> m(dim * dim, cdouble(0.0, 0.0));
    for (std::size_t i = 0; i < dim; ++i) {
        const auto occ = space.unflatten(i);
        std::size_t total = 0;
        for (auto k : occ) total += k;
        m[i * dim + i] = cdouble((total % 2 == 0) ? 1.0 : -1.0, 0.0);
    }
    return ComplexOperator(space, std::move(m), OpKind::hermitian);
}

std::map<int, double> number_distribution(const FockVector& v) {
    const IndexSpace space = v.reg.space();
    std::map<int, double> out;
    for (std::size_t i = 0; i < v.state.amps.size(); ++i) {
        const double p = std::norm(v.state.amps[i]);
        if (p == 0.0) continue;
        const auto occ = space.unflatten(i);
        int total = 0;
        for (auto k : occ) total += static_cast<int>(k);
        out[total] += p;
    }
    return out;
}

bool superselection_check(const ComplexOperator& effect, const ModeRegister& reg) {
    if (!reg.charge_superselected && reg.statistics != Statistics::fermion) return true;
    const ComplexOperator guard = reg.charge_superselected
                                      ? total_number_operator(reg)
                                      : parity_operator(reg);
    const ComplexOperator comm = effect * guard - guard * effect;
    return comm.max_abs() <= EPS_NORM * std::max(1.0, effect.max_abs() * guard.max_abs());
}

void require_superselection(const ComplexOperator& effect, const ModeRegister& reg) {
    if (!superselection_check(effect, reg))
        throw SuperselectionViolation(
            "effect does not commute with the register's superselection rule");
}

ModeRegister photon_register() {
    return ModeRegister{{"1", "2"}, 2, Statistics::boson, false};
}

ModeRegister electron_register() {
    return ModeRegister{{"11", "21", "12", "22"}, 1, Statistics::fermion, true};
}

namespace {

StateVector apply_normalized(const ComplexOperator& effect, const StateVector& v,
                             double* probability) {
    const StateVector projected = effect.apply(v);
    const double p = projected.norm_sq();
    if (probability) *probability = p;
    if (p <= 0.0) return projected;
    return (cdouble(1.0 / std::sqrt(p), 0.0) * projected);
}

} // namespace

PhotonMediationResult photon_mediation(int a1, int a2, const ModeRegister& reg) {
    reg.validate();
    if (reg.charge_superselected)
        throw SuperselectionViolation(
            "interferometric photon effects superpose number sectors");
    if (reg.modes.size() != 2 || reg.statistics != Statistics::boson)
        throw DomainError("photon mediation expects a 2-mode bosonic register");

    const IndexSpace space = reg.space();
    const ComplexOperator c1 = creation(reg, reg.modes[0]);
    const ComplexOperator c2 = creation(reg, reg.modes[1]);
    const StateVector vac = vacuum(reg).state;

    const double sign = ((a1 + a2) % 2 == 0) ? 1.0 : -1.0;
    StateVector psi = cdouble(M_SQRT1_2, 0.0) *
                      (c1.apply(vac) + cdouble(sign, 0.0) * c2.apply(vac));

    // Pi_x on one mode: projector onto (|0> + (-1)^x |1>)/sqrt(2), identity on
    // its occupation levels above 1 is irrelevant here (never populated).
    const auto mode_effect = [&](std::size_t mode, int x) {
        const IndexSpace one = IndexSpace::single(reg.modes[mode],
                                                  static_cast<std::size_t>(reg.max_occupation + 1));
        std::vector<cdouble> v(one.total_dim(), cdouble(0.0, 0.0));
        v[0] = cdouble(M_SQRT1_2, 0.0);
        v[1] = cdouble(x == 0 ? M_SQRT1_2 : -M_SQRT1_2, 0.0);
        const StateVector vec(one, std::move(v));
        ComplexOperator p = ComplexOperator::outer(vec, vec);
        if (mode == 0) {
            const IndexSpace other = IndexSpace::single(
                reg.modes[1], static_cast<std::size_t>(reg.max_occupation + 1));
            return tensor_product(p, ComplexOperator::identity(other));
        }
        const IndexSpace other = IndexSpace::single(
            reg.modes[0], static_cast<std::size_t>(reg.max_occupation + 1));
        return tensor_product(ComplexOperator::identity(other), p);
    };

    PhotonMediationResult result;
    for (int b1 = 0; b1 < 2; ++b1) {
        for (int b2 = 0; b2 < 2; ++b2) {
            const ComplexOperator joint = mode_effect(0, b1) * mode_effect(1, b2);
            double p = 0.0;
            StateVector post = apply_normalized(joint, psi, &p);
            result.outcome_dist[b1][b2] = p;
            // Relabel the post state onto the register's own space.
            result.post_states[b1][b2] = FockVector{reg, StateVector(space, post.amps)};
            if (p > 0.0)
                result.post_number_dist[b1][b2] =
                    number_distribution(result.post_states[b1][b2]);
        }
    }
    return result;
}

ElectronMediationResult electron_mediation(int a1, int a2, const ModeRegister& reg) {
    reg.validate();
    if (reg.modes.size() != 4 || reg.statistics != Statistics::fermion ||
        !reg.charge_superselected)
        throw DomainError(
            "electron mediation expects a 4-mode charge-superselected fermionic register");

    const IndexSpace space = reg.space();
    const ComplexOperator c11 = creation(reg, reg.modes[0]);
    const ComplexOperator c21 = creation(reg, reg.modes[1]);
    const ComplexOperator c12 = creation(reg, reg.modes[2]);
    const ComplexOperator c22 = creation(reg, reg.modes[3]);
    const StateVector vac = vacuum(reg).state;

    const double sign = ((a1 + a2) % 2 == 0) ? 1.0 : -1.0;
    // psi = 1/2 (c11 + c21)(c12 + s c22)|0>
    const StateVector arm2 = c12.apply(vac) + cdouble(sign, 0.0) * c22.apply(vac);
    StateVector psi = cdouble(0.5, 0.0) * (c11.apply(arm2) + c21.apply(arm2));

    ElectronMediationResult result;
    result.initial_numbers = number_distribution(FockVector{reg, psi});

    // Stage 1: project onto "one electron at each site" vs "both at one site".
    const auto pair_state = [&](const ComplexOperator& a, const ComplexOperator& b) {
        return a.apply(b.apply(vac)).normalized();
    };
    const StateVector e1 = pair_state(c11, c22);
    const StateVector e2 = pair_state(c21, c12);
    const StateVector f1 = pair_state(c11, c12);
    const StateVector f2 = pair_state(c21, c22);
    const ComplexOperator sector1 =
        ComplexOperator::outer(e1, e1) + ComplexOperator::outer(e2, e2);
    const ComplexOperator sector2 =
        ComplexOperator::outer(f1, f1) + ComplexOperator::outer(f2, f2);

    bool numbers_ok = superselection_check(sector1, reg) &&
                      superselection_check(sector2, reg);

    std::array<StateVector, 2> sector_states = {psi, psi};
    for (int sector = 0; sector < 2; ++sector) {
        double p = 0.0;
        sector_states[sector] =
            apply_normalized(sector == 0 ? sector1 : sector2, psi, &p);
        result.stage1_dist[sector] = p;
        result.stage1_numbers[sector] =
            number_distribution(FockVector{reg, StateVector(space, sector_states[sector].amps)});
    }

    // Stage 2, sector 1: each site interferes its own mode pair. Exchanging
    // the two like fermions across the sites flips the parity of the product
    // labels, so the first site's outcome labeling carries the opposite
    // relative sign.
    for (int b1 = 0; b1 < 2; ++b1) {
        for (int b2 = 0; b2 < 2; ++b2) {
            const double s1 = (b1 == 0) ? -1.0 : 1.0;  // -(-1)^{b1}
            const double s2 = (b2 == 0) ? 1.0 : -1.0;  // (-1)^{b2}
            // Sector 1: site 1 holds modes (11,12), site 2 holds (21,22).
            // Two-particle basis state u^dag v^dag |0>.
            const ComplexOperator ud =
                cdouble(M_SQRT1_2, 0.0) * (c11 + cdouble(s1, 0.0) * c12);
            const ComplexOperator vd =
                cdouble(M_SQRT1_2, 0.0) * (c21 + cdouble(s2, 0.0) * c22);
            const StateVector phi = ud.apply(vd.apply(vac));
            const ComplexOperator proj = ComplexOperator::outer(phi, phi);
            numbers_ok = numbers_ok && superselection_check(proj, reg);
            double p = 0.0;
            const StateVector post = apply_normalized(proj, sector_states[0], &p);
            result.stage2_dist[0][b1][b2] = p;
            if (p > 1e-15)
                result.stage2_numbers[0][b1][b2] =
                    number_distribution(FockVector{reg, StateVector(space, post.amps)});

            // Sector 2: the interfered pairs run across the sites
            // ((11,21) and (12,22)); no exchange sign appears.
            const double t1 = (b1 == 0) ? 1.0 : -1.0;
            const double t2 = (b2 == 0) ? 1.0 : -1.0;
            const ComplexOperator wd =
                cdouble(M_SQRT1_2, 0.0) * (c11 + cdouble(t1, 0.0) * c21);
            const ComplexOperator zd =
                cdouble(M_SQRT1_2, 0.0) * (c12 + cdouble(t2, 0.0) * c22);
            const StateVector chi = wd.apply(zd.apply(vac));
            const ComplexOperator proj2 = ComplexOperator::outer(chi, chi);
            numbers_ok = numbers_ok && superselection_check(proj2, reg);
            double q = 0.0;
            const StateVector post2 = apply_normalized(proj2, sector_states[1], &q);
            result.stage2_dist[1][b1][b2] = q;
            if (q > 1e-15)
                result.stage2_numbers[1][b1][b2] =
                    number_distribution(FockVector{reg, StateVector(space, post2.amps)});

            result.final_dist[b1][b2] = result.stage1_dist[0] * p +
                                        result.stage1_dist[1] * q;
        }
    }
    result.number_check = numbers_ok;
    return result;
}

namespace {

ConditionalTable parity_table_from(
    const std::function<std::array<std::array<double, 2>, 2>(int, int)>& dist) {
    ConditionalTable table;
    table.input_count = 2;
    table.input_arity = 2;
    table.outcome_labels = {"0", "1"};
    for (int a1 = 0; a1 < 2; ++a1)
        for (int a2 = 0; a2 < 2; ++a2) {
            const auto d = dist(a1, a2);
            double p0 = 0.0;
            double p1 = 0.0;
            for (int b1 = 0; b1 < 2; ++b1)
                for (int b2 = 0; b2 < 2; ++b2)
                    ((b1 ^ b2) == 0 ? p0 : p1) += d[b1][b2];
            table.rows.push_back({p0, p1});
        }
    return table;
}

} // namespace

ConditionalTable photon_mediation_table() {
    return parity_table_from([](int a1, int a2) {
        return photon_mediation(a1, a2).outcome_dist;
    });
}

ConditionalTable electron_mediation_table() {
    return parity_table_from([](int a1, int a2) {
        return electron_mediation(a1, a2).final_dist;
    });
}

} // namespace interlab
